#pragma once

#include "treelocate/simulation.hpp"
#include "treelocate/tree.hpp"

#include <optional>
#include <span>
#include <vector>

namespace treelocate {

/// Connected component of non-observer nodes once observers are deleted,
/// together with the observers adjacent to it.
struct EquivalenceClass {
    std::vector<NodeId> members;  // sorted
    std::vector<NodeId> boundary; // sorted

    friend bool operator==(const EquivalenceClass&, const EquivalenceClass&) = default;
};

/// Classes ordered by their smallest member.
std::vector<EquivalenceClass> equivalence_classes(const Tree& tree, std::span<const NodeId> observers);

/// Earliest-infected observer; throws TiedMinimum on an exact tie.
NodeId first_infected_observer(const Observation& obs);

/// Classes whose boundary contains the earliest-infected observer.
std::vector<EquivalenceClass> feasible_classes(const Tree& tree, std::span<const NodeId> observers,
                                               const Observation& obs);

struct StarArrangement {
    std::vector<EquivalenceClass> classes;
    /// Common boundary observer; present iff there is more than one class.
    std::optional<NodeId> center;
};

/// Throws NotAStar when the boundaries share no observer.
StarArrangement star_arrangement_of(std::span<const EquivalenceClass> classes);

/// Boundary of the union of feasible classes.
std::vector<NodeId> sufficient_observers(const Tree& tree, std::span<const NodeId> observers,
                                         const Observation& obs);

struct Reduction {
    StarArrangement arrangement;
    std::vector<NodeId> observers;  // sufficient set, sorted
    std::vector<NodeId> candidates; // union of feasible classes, sorted
};

Reduction reduce(const Tree& tree, std::span<const NodeId> observers, const Observation& obs);

namespace oracle {

/// Nodes v with [o,v] disjoint from every class in `classes` (o included).
std::vector<NodeId> descendants_avoiding(const Tree& tree, NodeId o, std::span<const EquivalenceClass> classes);

/// Feasibility straight from the definition: for every boundary observer o,
/// observer ancestors in the subtree rooted at o that avoids the class are
/// never infected after their observer descendants.
bool feasible_by_definition(const Tree& tree, std::span<const NodeId> observers, const Observation& obs,
                            const EquivalenceClass& cls);

} // namespace oracle

} // namespace treelocate
