#pragma once

#include "treelocate/delay_model.hpp"
#include "treelocate/rng.hpp"
#include "treelocate/tree.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace treelocate {

/// Infection times of the observer nodes for one outbreak.
struct Observation {
    std::map<NodeId, double> times;

    std::vector<NodeId> observers() const;
    /// Times ordered like `observers`; throws IncompleteObservation on a gap.
    std::vector<double> times_for(std::span<const NodeId> observers) const;
};

struct FullInfection {
    std::vector<double> times;
    NodeId source = kNoNode;
};

/// Sorted, deduplicated observer set; throws EmptyObservers,
/// ObserversCoverAllNodes or NodeOutOfRange.
std::vector<NodeId> normalize_observers(std::size_t node_count, std::span<const NodeId> observers);

/// Infection times given one realized delay per edge.
FullInfection infection_times(const Tree& tree, std::span<const double> edge_delays, NodeId source);

/// Draws every edge delay once (in edge-id order) and accumulates path sums.
FullInfection simulate_tree(const Tree& tree, std::span<const DelayModel> delays, NodeId source, Rng& rng);

Observation observe(const FullInfection& full, std::span<const NodeId> observers);

/// simulate_tree + observe, redrawing the outbreak until the observer times
/// are pairwise distinct (exact ties have probability zero).
Observation simulate_observation(const Tree& tree, std::span<const DelayModel> delays, NodeId source,
                                 std::span<const NodeId> observers, Rng& rng);

/// Small undirected simple graph for first-passage experiments.
class Graph {
public:
    Graph(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);
    Graph(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges);
    static Graph from_tree(const Tree& tree);

    std::size_t node_count() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const Edge& edge(EdgeId e) const { return edges_.at(e); }
    /// (neighbor, edge id) pairs.
    std::span<const std::pair<NodeId, EdgeId>> incident(NodeId x) const { return adjacency_.at(x); }

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<NodeId, EdgeId>>> adjacency_;
};

/// Infecting neighbor of every node; kNoNode at the source.
struct TransmissionTree {
    std::vector<NodeId> parent;
};

struct FirstPassage {
    FullInfection infection;
    TransmissionTree transmission;
};

/// Dijkstra over realized edge delays: the SI infection time of each node.
FirstPassage first_passage(const Graph& graph, std::span<const double> edge_delays, NodeId source);
FirstPassage simulate_graph_first_passage(const Graph& graph, std::span<const DelayModel> delays, NodeId source,
                                          Rng& rng);

// ---------------------------------------------------------------------------
// Triangle network: source s, observer o, bystander v.  Edge ids are
// 0 = {s,o} (rate l1), 1 = {s,v} (rate l2), 2 = {v,o} (rate l3).

struct TriangleNodes {
    static constexpr NodeId s = 0;
    static constexpr NodeId o = 1;
    static constexpr NodeId v = 2;
};

Graph triangle_graph();

enum class TriangleTree { T1 = 0, T2 = 1, T3 = 2 };

/// T1 = {s-o, o-v}, T2 = {s-v, v-o}, T3 = {s-v, s-o}.
TriangleTree classify_triangle(const TransmissionTree& transmission);

struct TriangleCensus {
    std::size_t trials = 0;
    std::array<std::size_t, 3> counts{};
    /// Observer infection times grouped by the realized spanning tree.
    std::array<std::vector<double>, 3> observer_times;
};

TriangleCensus triangle_census(const std::array<double, 3>& rates, std::size_t trials, Rng& rng);

struct TriangleClosedForm {
    std::array<double, 3> probability;
    std::array<double, 3> conditional_mean;
    /// P(B = 1) for the optional second stage under T3.
    double t3_second_stage_probability;
};

TriangleClosedForm triangle_closed_form(const std::array<double, 3>& rates);

} // namespace treelocate
