#include "treelocate/tree.hpp"

#include "treelocate/error.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <string>

namespace treelocate {

namespace {

struct DisjointSets {
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        parent[b] = a;
        return true;
    }

    std::vector<std::size_t> parent;
};

} // namespace

EdgeId Tree::edge_between(NodeId a, NodeId b) const
{
    const auto& nb = adjacency_.at(a);
    auto it = std::lower_bound(nb.begin(), nb.end(), b);
    if (it == nb.end() || *it != b)
        return kNoEdge;
    return incident_[a][static_cast<std::size_t>(it - nb.begin())];
}

Tree build_tree(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges)
{
    if (n == 0)
        throw Error(ErrorKind::NTooSmall, "a tree needs at least one node");

    Tree tree;
    tree.adjacency_.resize(n);
    tree.incident_.resize(n);
    tree.edges_.reserve(edges.size());

    std::set<std::pair<NodeId, NodeId>> seen;
    DisjointSets components(n);
    std::size_t merged = 0;
    for (auto [a, b] : edges) {
        if (a >= n || b >= n)
            throw Error(ErrorKind::NodeOutOfRange,
                        "edge (" + std::to_string(a) + "," + std::to_string(b) + ") with n=" + std::to_string(n));
        if (a == b)
            throw Error(ErrorKind::SelfLoop, "self-loop at node " + std::to_string(a));
        Edge e{std::min(a, b), std::max(a, b)};
        if (!seen.emplace(e.u, e.v).second)
            throw Error(ErrorKind::DuplicateEdge,
                        "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") listed twice");
        if (!components.unite(e.u, e.v))
            throw Error(ErrorKind::CycleDetected,
                        "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") closes a cycle");
        ++merged;
        tree.edges_.push_back(e);
    }
    if (merged != n - 1)
        throw Error(ErrorKind::Disconnected,
                    std::to_string(n) + " nodes but only " + std::to_string(merged) + " edges");

    for (EdgeId id = 0; id < tree.edges_.size(); ++id) {
        const Edge& e = tree.edges_[id];
        tree.adjacency_[e.u].push_back(e.v);
        tree.adjacency_[e.v].push_back(e.u);
    }
    for (NodeId x = 0; x < n; ++x) {
        auto& nb = tree.adjacency_[x];
        std::sort(nb.begin(), nb.end());
        tree.incident_[x].assign(nb.size(), kNoEdge);
    }
    for (EdgeId id = 0; id < tree.edges_.size(); ++id) {
        const Edge& e = tree.edges_[id];
        for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
            const auto& nb = tree.adjacency_[a];
            auto pos = std::lower_bound(nb.begin(), nb.end(), b) - nb.begin();
            tree.incident_[a][static_cast<std::size_t>(pos)] = id;
        }
    }
    return tree;
}

Tree build_tree(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges)
{
    return build_tree(n, std::span<const std::pair<NodeId, NodeId>>(edges.begin(), edges.size()));
}

Rooting root_at(const Tree& tree, NodeId root)
{
    const std::size_t n = tree.node_count();
    if (!tree.contains(root))
        throw Error(ErrorKind::NodeOutOfRange, "root " + std::to_string(root));
    Rooting r;
    r.root = root;
    r.order.reserve(n);
    r.parent.assign(n, kNoNode);
    r.parent_edge.assign(n, kNoEdge);
    r.depth.assign(n, 0);
    std::vector<char> visited(n, 0);
    visited[root] = 1;
    r.order.push_back(root);
    for (std::size_t head = 0; head < r.order.size(); ++head) {
        NodeId x = r.order[head];
        auto nb = tree.neighbors(x);
        auto inc = tree.incident_edges(x);
        for (std::size_t i = 0; i < nb.size(); ++i) {
            NodeId y = nb[i];
            if (visited[y])
                continue;
            visited[y] = 1;
            r.parent[y] = x;
            r.parent_edge[y] = inc[i];
            r.depth[y] = r.depth[x] + 1;
            r.order.push_back(y);
        }
    }
    return r;
}

std::vector<EdgeId> path(const Tree& tree, NodeId u, NodeId v)
{
    if (!tree.contains(v))
        throw Error(ErrorKind::NodeOutOfRange, "node " + std::to_string(v));
    const Rooting r = root_at(tree, u);
    std::vector<EdgeId> edges;
    edges.reserve(r.depth[v]);
    for (NodeId x = v; x != u; x = r.parent[x])
        edges.push_back(r.parent_edge[x]);
    std::reverse(edges.begin(), edges.end());
    return edges;
}

std::vector<NodeId> path_nodes(const Tree& tree, NodeId u, NodeId v)
{
    if (!tree.contains(v))
        throw Error(ErrorKind::NodeOutOfRange, "node " + std::to_string(v));
    const Rooting r = root_at(tree, u);
    std::vector<NodeId> nodes;
    for (NodeId x = v; x != kNoNode; x = r.parent[x])
        nodes.push_back(x);
    std::reverse(nodes.begin(), nodes.end());
    return nodes;
}

std::size_t edge_distance(const Tree& tree, NodeId u, NodeId v)
{
    if (!tree.contains(v))
        throw Error(ErrorKind::NodeOutOfRange, "node " + std::to_string(v));
    return root_at(tree, u).depth[v];
}

std::vector<NodeId> leaves(const Tree& tree)
{
    std::vector<NodeId> out;
    for (NodeId x = 0; x < tree.node_count(); ++x)
        if (tree.degree(x) == 1)
            out.push_back(x);
    return out;
}

std::size_t diameter(const Tree& tree)
{
    const Rooting first = root_at(tree, 0);
    const NodeId far = first.order.back();
    const Rooting second = root_at(tree, far);
    return second.depth[second.order.back()];
}

std::vector<NodeId> prufer_encode(const Tree& tree)
{
    const std::size_t n = tree.node_count();
    if (n < 2)
        throw Error(ErrorKind::NTooSmall, "Prufer codes need n >= 2");
    std::vector<std::size_t> degree(n);
    std::vector<char> removed(n, 0);
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> leaf_queue;
    for (NodeId x = 0; x < n; ++x) {
        degree[x] = tree.degree(x);
        if (degree[x] == 1)
            leaf_queue.push(x);
    }
    std::vector<NodeId> code;
    code.reserve(n - 2);
    while (code.size() < n - 2) {
        NodeId leaf = leaf_queue.top();
        leaf_queue.pop();
        removed[leaf] = 1;
        for (NodeId y : tree.neighbors(leaf)) {
            if (removed[y])
                continue;
            code.push_back(y);
            if (--degree[y] == 1)
                leaf_queue.push(y);
        }
    }
    return code;
}

Tree prufer_decode(std::size_t n, std::span<const NodeId> sequence)
{
    if (n < 2)
        throw Error(ErrorKind::NTooSmall, "Prufer codes need n >= 2");
    if (sequence.size() != n - 2)
        throw Error(ErrorKind::DimensionMismatch, "Prufer sequence must have n-2 entries");
    std::vector<std::size_t> degree(n, 1);
    for (NodeId x : sequence) {
        if (x >= n)
            throw Error(ErrorKind::NodeOutOfRange, "Prufer entry " + std::to_string(x));
        ++degree[x];
    }
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> leaf_queue;
    for (NodeId x = 0; x < n; ++x)
        if (degree[x] == 1)
            leaf_queue.push(x);

    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(n - 1);
    for (NodeId x : sequence) {
        NodeId leaf = leaf_queue.top();
        leaf_queue.pop();
        edges.emplace_back(leaf, x);
        if (--degree[x] == 1)
            leaf_queue.push(x);
    }
    NodeId a = leaf_queue.top();
    leaf_queue.pop();
    NodeId b = leaf_queue.top();
    edges.emplace_back(a, b);
    return build_tree(n, edges);
}

Tree random_tree_prufer(std::size_t n, Rng& rng)
{
    if (n < 2)
        throw Error(ErrorKind::NTooSmall, "random trees need n >= 2");
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    std::vector<NodeId> sequence(n - 2);
    for (auto& x : sequence)
        x = pick(rng);
    return prufer_decode(n, sequence);
}

Tree path_tree(std::size_t n)
{
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId x = 0; x + 1 < n; ++x)
        edges.emplace_back(x, x + 1);
    return build_tree(n, edges);
}

Tree star_tree(std::size_t n)
{
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId x = 1; x < n; ++x)
        edges.emplace_back(0, x);
    return build_tree(n, edges);
}

std::vector<EdgeRecord> read_edge_list(std::istream& in)
{
    std::vector<EdgeRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream fields(line);
        long long u = -1;
        long long v = -1;
        if (!(fields >> u >> v) || u < 0 || v < 0)
            throw Error(ErrorKind::MalformedNetworkFile, "line " + std::to_string(line_no) + ": expected `u v`");
        EdgeRecord rec{static_cast<NodeId>(u), static_cast<NodeId>(v), {}};
        double p = 0.0;
        while (fields >> p)
            rec.params.push_back(p);
        if (!fields.eof())
            throw Error(ErrorKind::MalformedNetworkFile, "line " + std::to_string(line_no) + ": bad parameter column");
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace treelocate
