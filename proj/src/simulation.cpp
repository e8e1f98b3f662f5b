#include "treelocate/simulation.hpp"

#include "treelocate/error.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <string>

namespace treelocate {

std::vector<NodeId> Observation::observers() const
{
    std::vector<NodeId> out;
    out.reserve(times.size());
    for (const auto& [node, time] : times)
        out.push_back(node);
    return out;
}

std::vector<double> Observation::times_for(std::span<const NodeId> observers) const
{
    std::vector<double> out;
    out.reserve(observers.size());
    for (NodeId o : observers) {
        auto it = times.find(o);
        if (it == times.end())
            throw Error(ErrorKind::IncompleteObservation, "no time for observer " + std::to_string(o));
        out.push_back(it->second);
    }
    return out;
}

std::vector<NodeId> normalize_observers(std::size_t node_count, std::span<const NodeId> observers)
{
    std::vector<NodeId> out(observers.begin(), observers.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty())
        throw Error(ErrorKind::EmptyObservers, "observer set is empty");
    if (out.back() >= node_count)
        throw Error(ErrorKind::NodeOutOfRange, "observer " + std::to_string(out.back()));
    if (out.size() >= node_count)
        throw Error(ErrorKind::ObserversCoverAllNodes, "observers must be a proper subset of the nodes");
    return out;
}

FullInfection infection_times(const Tree& tree, std::span<const double> edge_delays, NodeId source)
{
    if (!tree.contains(source))
        throw Error(ErrorKind::NodeOutOfRange, "source " + std::to_string(source));
    if (edge_delays.size() != tree.edge_count())
        throw Error(ErrorKind::DimensionMismatch, "one delay per edge required");
    const Rooting r = root_at(tree, source);
    FullInfection full;
    full.source = source;
    full.times.assign(tree.node_count(), 0.0);
    for (std::size_t i = 1; i < r.order.size(); ++i) {
        const NodeId x = r.order[i];
        full.times[x] = full.times[r.parent[x]] + edge_delays[r.parent_edge[x]];
    }
    return full;
}

FullInfection simulate_tree(const Tree& tree, std::span<const DelayModel> delays, NodeId source, Rng& rng)
{
    if (delays.size() != tree.edge_count())
        throw Error(ErrorKind::DimensionMismatch, "one delay model per edge required");
    if (!tree.contains(source))
        throw Error(ErrorKind::NodeOutOfRange, "source " + std::to_string(source));
    std::vector<double> sampled(delays.size());
    for (std::size_t e = 0; e < delays.size(); ++e)
        sampled[e] = delays[e].sample(rng);
    return infection_times(tree, sampled, source);
}

Observation observe(const FullInfection& full, std::span<const NodeId> observers)
{
    const auto normalized = normalize_observers(full.times.size(), observers);
    Observation obs;
    for (NodeId o : normalized)
        obs.times.emplace(o, full.times[o]);
    return obs;
}

Observation simulate_observation(const Tree& tree, std::span<const DelayModel> delays, NodeId source,
                                 std::span<const NodeId> observers, Rng& rng)
{
    for (;;) {
        Observation obs = observe(simulate_tree(tree, delays, source, rng), observers);
        std::vector<double> times;
        for (const auto& [node, t] : obs.times)
            times.push_back(t);
        std::sort(times.begin(), times.end());
        if (std::adjacent_find(times.begin(), times.end()) == times.end())
            return obs;
    }
}

Graph::Graph(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges)
    : adjacency_(n)
{
    if (n == 0)
        throw Error(ErrorKind::NTooSmall, "graph needs at least one node");
    std::set<std::pair<NodeId, NodeId>> seen;
    for (auto [a, b] : edges) {
        if (a >= n || b >= n)
            throw Error(ErrorKind::NodeOutOfRange, "graph edge endpoint out of range");
        if (a == b)
            throw Error(ErrorKind::SelfLoop, "self-loop at node " + std::to_string(a));
        Edge e{std::min(a, b), std::max(a, b)};
        if (!seen.emplace(e.u, e.v).second)
            throw Error(ErrorKind::DuplicateEdge, "duplicate graph edge");
        const auto id = static_cast<EdgeId>(edges_.size());
        edges_.push_back(e);
        adjacency_[e.u].emplace_back(e.v, id);
        adjacency_[e.v].emplace_back(e.u, id);
    }
    std::vector<char> seen_node(n, 0);
    std::vector<NodeId> stack{0};
    seen_node[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        for (auto [y, e] : adjacency_[x]) {
            if (!seen_node[y]) {
                seen_node[y] = 1;
                ++reached;
                stack.push_back(y);
            }
        }
    }
    if (reached != n)
        throw Error(ErrorKind::Disconnected, "graph is not connected");
}

Graph::Graph(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges)
    : Graph(n, std::span<const std::pair<NodeId, NodeId>>(edges.begin(), edges.size()))
{
}

Graph Graph::from_tree(const Tree& tree)
{
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const Edge& e : tree.edges())
        edges.emplace_back(e.u, e.v);
    return Graph(tree.node_count(), edges);
}

FirstPassage first_passage(const Graph& graph, std::span<const double> edge_delays, NodeId source)
{
    const std::size_t n = graph.node_count();
    if (source >= n)
        throw Error(ErrorKind::NodeOutOfRange, "source " + std::to_string(source));
    if (edge_delays.size() != graph.edge_count())
        throw Error(ErrorKind::DimensionMismatch, "one delay per edge required");

    FirstPassage out;
    out.infection.source = source;
    out.infection.times.assign(n, std::numeric_limits<double>::infinity());
    out.transmission.parent.assign(n, kNoNode);
    std::vector<char> settled(n, 0);

    using Entry = std::pair<double, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    out.infection.times[source] = 0.0;
    frontier.emplace(0.0, source);
    while (!frontier.empty()) {
        auto [time, x] = frontier.top();
        frontier.pop();
        if (settled[x])
            continue;
        settled[x] = 1;
        for (auto [y, e] : graph.incident(x)) {
            const double candidate = time + edge_delays[e];
            if (!settled[y] && candidate < out.infection.times[y]) {
                out.infection.times[y] = candidate;
                out.transmission.parent[y] = x;
                frontier.emplace(candidate, y);
            }
        }
    }
    return out;
}

FirstPassage simulate_graph_first_passage(const Graph& graph, std::span<const DelayModel> delays, NodeId source,
                                          Rng& rng)
{
    if (delays.size() != graph.edge_count())
        throw Error(ErrorKind::DimensionMismatch, "one delay model per edge required");
    std::vector<double> sampled(delays.size());
    for (std::size_t e = 0; e < delays.size(); ++e)
        sampled[e] = delays[e].sample(rng);
    return first_passage(graph, sampled, source);
}

Graph triangle_graph()
{
    using N = TriangleNodes;
    return Graph(3, {{N::s, N::o}, {N::s, N::v}, {N::v, N::o}});
}

TriangleTree classify_triangle(const TransmissionTree& transmission)
{
    using N = TriangleNodes;
    const NodeId parent_o = transmission.parent.at(N::o);
    const NodeId parent_v = transmission.parent.at(N::v);
    if (parent_o == N::s && parent_v == N::o)
        return TriangleTree::T1;
    if (parent_v == N::s && parent_o == N::v)
        return TriangleTree::T2;
    if (parent_v == N::s && parent_o == N::s)
        return TriangleTree::T3;
    throw Error(ErrorKind::InvalidParameter, "transmission tree is not rooted at the triangle source");
}

TriangleCensus triangle_census(const std::array<double, 3>& rates, std::size_t trials, Rng& rng)
{
    const Graph graph = triangle_graph();
    const std::vector<DelayModel> delays{DelayModel::exponential(rates[0]), DelayModel::exponential(rates[1]),
                                         DelayModel::exponential(rates[2])};
    TriangleCensus census;
    census.trials = trials;
    std::vector<double> sampled(3);
    for (std::size_t i = 0; i < trials; ++i) {
        for (std::size_t e = 0; e < 3; ++e)
            sampled[e] = delays[e].sample(rng);
        const FirstPassage fp = first_passage(graph, sampled, TriangleNodes::s);
        const auto which = static_cast<std::size_t>(classify_triangle(fp.transmission));
        ++census.counts[which];
        census.observer_times[which].push_back(fp.infection.times[TriangleNodes::o]);
    }
    return census;
}

TriangleClosedForm triangle_closed_form(const std::array<double, 3>& rates)
{
    const double l1 = rates[0];
    const double l2 = rates[1];
    const double l3 = rates[2];
    for (double l : rates)
        if (!(l > 0.0))
            throw Error(ErrorKind::InvalidParameter, "triangle rates must be > 0");
    TriangleClosedForm out;
    out.probability[0] = l1 * l3 / ((l1 + l2) * (l2 + l3));
    out.probability[1] = l2 * l3 / ((l1 + l2) * (l1 + l3));
    out.probability[2] = l1 * l2 * (l1 + l2 + 2.0 * l3) / ((l1 + l2) * (l2 + l3) * (l3 + l1));
    out.t3_second_stage_probability = (l2 + l3) / (l1 + l2 + 2.0 * l3);
    const double first = 1.0 / (l1 + l2);
    const double second = 1.0 / (l1 + l3);
    out.conditional_mean = {first, first + second, first + out.t3_second_stage_probability * second};
    return out;
}

} // namespace treelocate
