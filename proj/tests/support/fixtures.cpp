#include "support/fixtures.hpp"

#include <algorithm>

namespace treelocate::testing {

ThreeObserverTree three_observer_tree()
{
    ThreeObserverTree t;
    t.tree = build_tree(6, {{t.o1, t.u}, {t.u, t.v}, {t.v, t.w}, {t.v, t.o3}, {t.u, t.o2}});
    return t;
}

FourClassTree four_class_tree()
{
    FourClassTree f;
    // Observers keep their numeric labels; the drawing names of observer
    // positions map onto them.
    const std::map<std::string, NodeId> observer_at = {{"51", 8}, {"42", 3}, {"43", 1}, {"31", 9}, {"34", 7},
                                                       {"35", 6}, {"36", 5}, {"23", 4}, {"39", 2}};
    const std::vector<std::string> others = {"52", "41", "33",  "32",  "21",  "22",  "37", "38",
                                             "24", "11", "12",  "310", "311", "312", "25"};
    for (const auto& [name, id] : observer_at)
        f.id[name] = id;
    NodeId next = 10;
    for (const auto& name : others)
        f.id[name] = name == "52" ? 0 : next++;

    const std::vector<std::pair<std::string, std::string>> edges = {
        {"51", "41"},  {"52", "41"},  {"41", "33"},  {"42", "38"}, {"43", "311"}, {"31", "32"},
        {"32", "33"},  {"33", "34"},  {"34", "35"},  {"35", "36"}, {"36", "37"},  {"37", "38"},
        {"38", "39"},  {"39", "310"}, {"310", "311"}, {"311", "312"}, {"21", "32"}, {"22", "33"},
        {"23", "37"},  {"24", "39"},  {"25", "311"}, {"11", "24"}, {"12", "24"}};
    std::vector<std::pair<NodeId, NodeId>> ids;
    for (const auto& [a, b] : edges)
        ids.emplace_back(f.id.at(a), f.id.at(b));
    f.tree = build_tree(24, ids);

    auto members = [&](std::initializer_list<const char*> names) {
        std::vector<NodeId> out;
        for (const char* n : names)
            out.push_back(f.id.at(n));
        std::sort(out.begin(), out.end());
        return out;
    };
    f.blue = members({"52", "41", "33", "32", "21", "22"});
    f.white = members({"37", "38"});
    f.yellow = members({"24", "11", "12"});
    f.green = members({"310", "311", "312", "25"});
    return f;
}

} // namespace treelocate::testing
