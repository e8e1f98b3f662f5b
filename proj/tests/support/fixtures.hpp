#pragma once

#include "treelocate/tree.hpp"

#include <map>
#include <string>
#include <vector>

namespace treelocate::testing {

/// Observers 1..3 and hubs u, v, w with edges a={1,u}, b={u,v}, c={v,w},
/// d={v,3}, e={u,2}. Edge ids follow a..e.
struct ThreeObserverTree {
    Tree tree;
    NodeId o1 = 0, o2 = 1, o3 = 2, u = 3, v = 4, w = 5;
    EdgeId a = 0, b = 1, c = 2, d = 3, e = 4;
    std::vector<NodeId> observers{0, 1, 2};
};

ThreeObserverTree three_observer_tree();

/// 24-node tree with observers labeled 1..9 (ids 1..9) and four classes with
/// boundaries {7,8,9}, {2,3,4,5}, {2} and {1,2}.
struct FourClassTree {
    Tree tree;
    std::vector<NodeId> observers{1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::map<std::string, NodeId> id; // drawing label -> node id
    std::vector<NodeId> blue, white, yellow, green; // sorted members
};

FourClassTree four_class_tree();

} // namespace treelocate::testing
