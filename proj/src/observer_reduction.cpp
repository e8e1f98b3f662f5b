#include "treelocate/observer_reduction.hpp"

#include "treelocate/error.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <string>

namespace treelocate {

namespace {

std::vector<char> observer_mask(std::size_t n, std::span<const NodeId> observers)
{
    std::vector<char> mask(n, 0);
    for (NodeId o : observers)
        mask[o] = 1;
    return mask;
}

std::vector<NodeId> sorted_union(std::vector<NodeId> a, std::span<const NodeId> b)
{
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

} // namespace

std::vector<EquivalenceClass> equivalence_classes(const Tree& tree, std::span<const NodeId> observers)
{
    const auto obs_set = normalize_observers(tree.node_count(), observers);
    const auto is_observer = observer_mask(tree.node_count(), obs_set);

    std::vector<EquivalenceClass> classes;
    std::vector<char> labeled(tree.node_count(), 0);
    for (NodeId start = 0; start < tree.node_count(); ++start) {
        if (is_observer[start] || labeled[start])
            continue;
        EquivalenceClass cls;
        std::vector<NodeId> queue{start};
        labeled[start] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const NodeId x = queue[head];
            cls.members.push_back(x);
            for (NodeId y : tree.neighbors(x)) {
                if (is_observer[y]) {
                    cls.boundary.push_back(y);
                } else if (!labeled[y]) {
                    labeled[y] = 1;
                    queue.push_back(y);
                }
            }
        }
        std::sort(cls.members.begin(), cls.members.end());
        std::sort(cls.boundary.begin(), cls.boundary.end());
        cls.boundary.erase(std::unique(cls.boundary.begin(), cls.boundary.end()), cls.boundary.end());
        classes.push_back(std::move(cls));
    }
    return classes;
}

NodeId first_infected_observer(const Observation& obs)
{
    if (obs.times.empty())
        throw Error(ErrorKind::EmptyObservers, "observation has no observers");
    NodeId best = kNoNode;
    double best_time = std::numeric_limits<double>::infinity();
    bool tied = false;
    for (const auto& [node, time] : obs.times) {
        if (time < best_time) {
            best = node;
            best_time = time;
            tied = false;
        } else if (time == best_time) {
            tied = true;
        }
    }
    if (tied)
        throw Error(ErrorKind::TiedMinimum, "several observers share the earliest time " + std::to_string(best_time));
    return best;
}

std::vector<EquivalenceClass> feasible_classes(const Tree& tree, std::span<const NodeId> observers,
                                               const Observation& obs)
{
    auto classes = equivalence_classes(tree, observers);
    const auto obs_set = normalize_observers(tree.node_count(), observers);
    Observation restricted;
    const auto times = obs.times_for(obs_set);
    for (std::size_t i = 0; i < obs_set.size(); ++i)
        restricted.times.emplace(obs_set[i], times[i]);
    const NodeId first = first_infected_observer(restricted);

    std::vector<EquivalenceClass> feasible;
    for (auto& cls : classes)
        if (std::binary_search(cls.boundary.begin(), cls.boundary.end(), first))
            feasible.push_back(std::move(cls));
    return feasible;
}

StarArrangement star_arrangement_of(std::span<const EquivalenceClass> classes)
{
    if (classes.empty())
        throw Error(ErrorKind::NotAStar, "no classes to arrange");
    std::vector<NodeId> common = classes.front().boundary;
    for (const auto& cls : classes.subspan(1)) {
        std::vector<NodeId> next;
        std::set_intersection(common.begin(), common.end(), cls.boundary.begin(), cls.boundary.end(),
                              std::back_inserter(next));
        common = std::move(next);
    }
    StarArrangement star;
    star.classes.assign(classes.begin(), classes.end());
    if (classes.size() == 1)
        return star;
    if (common.size() != 1)
        throw Error(ErrorKind::NotAStar,
                    "boundaries of " + std::to_string(classes.size()) + " classes share " +
                        std::to_string(common.size()) + " observers");
    star.center = common.front();
    return star;
}

std::vector<NodeId> sufficient_observers(const Tree& tree, std::span<const NodeId> observers,
                                         const Observation& obs)
{
    std::vector<NodeId> out;
    for (const auto& cls : feasible_classes(tree, observers, obs))
        out = sorted_union(std::move(out), cls.boundary);
    return out;
}

Reduction reduce(const Tree& tree, std::span<const NodeId> observers, const Observation& obs)
{
    const auto feasible = feasible_classes(tree, observers, obs);
    Reduction r;
    r.arrangement = star_arrangement_of(feasible);
    for (const auto& cls : feasible) {
        r.observers = sorted_union(std::move(r.observers), cls.boundary);
        r.candidates = sorted_union(std::move(r.candidates), cls.members);
    }
    return r;
}

namespace oracle {

namespace {

struct AvoidingTree {
    std::vector<NodeId> order;
    std::vector<NodeId> parent;
};

AvoidingTree rooted_avoiding(const Tree& tree, NodeId o, std::span<const EquivalenceClass> classes)
{
    std::vector<char> blocked(tree.node_count(), 0);
    for (const auto& cls : classes)
        for (NodeId m : cls.members)
            blocked[m] = 1;
    AvoidingTree t;
    t.parent.assign(tree.node_count(), kNoNode);
    std::vector<char> seen(tree.node_count(), 0);
    seen[o] = 1;
    t.order.push_back(o);
    for (std::size_t head = 0; head < t.order.size(); ++head) {
        const NodeId x = t.order[head];
        for (NodeId y : tree.neighbors(x)) {
            if (seen[y] || blocked[y])
                continue;
            seen[y] = 1;
            t.parent[y] = x;
            t.order.push_back(y);
        }
    }
    return t;
}

} // namespace

std::vector<NodeId> descendants_avoiding(const Tree& tree, NodeId o, std::span<const EquivalenceClass> classes)
{
    auto nodes = rooted_avoiding(tree, o, classes).order;
    std::sort(nodes.begin(), nodes.end());
    return nodes;
}

bool feasible_by_definition(const Tree& tree, std::span<const NodeId> observers, const Observation& obs,
                            const EquivalenceClass& cls)
{
    const auto obs_set = normalize_observers(tree.node_count(), observers);
    const auto is_observer = observer_mask(tree.node_count(), obs_set);
    const std::span<const EquivalenceClass> just_this(&cls, 1);
    for (NodeId o : cls.boundary) {
        const AvoidingTree sub = rooted_avoiding(tree, o, just_this);
        for (NodeId o2 : sub.order) {
            if (!is_observer[o2])
                continue;
            const double t2 = obs.times.at(o2);
            for (NodeId a = sub.parent[o2]; a != kNoNode; a = sub.parent[a])
                if (is_observer[a] && obs.times.at(a) > t2)
                    return false;
        }
    }
    return true;
}

} // namespace oracle

} // namespace treelocate
