#pragma once

#include "treelocate/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace treelocate {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);
inline constexpr EdgeId kNoEdge = static_cast<EdgeId>(-1);

/// Canonical undirected edge, stored with u < v.
struct Edge {
    NodeId u;
    NodeId v;

    NodeId other(NodeId x) const noexcept { return x == u ? v : u; }
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable labeled tree on nodes 0..n-1. Edge ids follow the order the
/// edges were supplied in.
class Tree {
public:
    std::size_t node_count() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool contains(NodeId x) const noexcept { return x < adjacency_.size(); }

    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(EdgeId e) const { return edges_.at(e); }

    /// Sorted neighbor list of x.
    std::span<const NodeId> neighbors(NodeId x) const { return adjacency_.at(x); }
    /// Edge ids incident to x, aligned with neighbors(x).
    std::span<const EdgeId> incident_edges(NodeId x) const { return incident_.at(x); }
    std::size_t degree(NodeId x) const { return adjacency_.at(x).size(); }

    /// Edge joining two adjacent nodes, or kNoEdge.
    EdgeId edge_between(NodeId a, NodeId b) const;

private:
    friend Tree build_tree(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);

    std::vector<std::vector<NodeId>> adjacency_;
    std::vector<std::vector<EdgeId>> incident_;
    std::vector<Edge> edges_;
};

/// Validates and builds a tree. Throws Error with NodeOutOfRange, SelfLoop,
/// DuplicateEdge, CycleDetected or Disconnected.
Tree build_tree(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);
Tree build_tree(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges);

/// BFS rooting of a tree. order[0] == root; parent/parent_edge are kNoNode /
/// kNoEdge at the root.
struct Rooting {
    NodeId root = kNoNode;
    std::vector<NodeId> order;
    std::vector<NodeId> parent;
    std::vector<EdgeId> parent_edge;
    std::vector<std::uint32_t> depth;
};

Rooting root_at(const Tree& tree, NodeId root);

/// Edges of [u,v] in order from u to v; empty when u == v.
std::vector<EdgeId> path(const Tree& tree, NodeId u, NodeId v);
/// Nodes of [u,v] in order from u to v, both endpoints included.
std::vector<NodeId> path_nodes(const Tree& tree, NodeId u, NodeId v);
std::size_t edge_distance(const Tree& tree, NodeId u, NodeId v);

std::vector<NodeId> leaves(const Tree& tree);
std::size_t diameter(const Tree& tree);

std::vector<NodeId> prufer_encode(const Tree& tree);
Tree prufer_decode(std::size_t n, std::span<const NodeId> sequence);
/// Uniform random labeled tree on n >= 2 nodes.
Tree random_tree_prufer(std::size_t n, Rng& rng);

Tree path_tree(std::size_t n);
Tree star_tree(std::size_t n);

/// One line of an edge-list file: `u v [param...]`.
struct EdgeRecord {
    NodeId u;
    NodeId v;
    std::vector<double> params;
};

/// Reads whitespace-separated 0-based edge lines; blank lines and lines
/// starting with '#' are skipped.
std::vector<EdgeRecord> read_edge_list(std::istream& in);

} // namespace treelocate
