#include "lbsim/topology.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace lbsim {

DerivedSets derive_sets(const Topology& topo) {
    DerivedSets out;
    for (const auto& [key, hops] : topo.next_hops) {
        const auto [i, d] = key;
        out.all_next[i].insert(hops.begin(), hops.end());
        for (SwitchId j : hops) {
            out.prev_hops[{j, d}].insert(i);
            out.link_commodities[{i, j}].insert(d);
        }
    }
    return out;
}

namespace {

std::string fmt_link(SwitchId i, SwitchId j) {
    std::ostringstream os;
    os << "(" << i << "," << j << ")";
    return os.str();
}

} // namespace

std::vector<Violation> validate_topology(const Topology& topo) {
    std::vector<Violation> v;
    const std::int64_t delta = effective_delta(topo, 0);

    for (const auto& [key, cap] : topo.link_capacity) {
        const auto [i, j] = key;
        if (!topo.switches.count(i) || !topo.switches.count(j))
            v.push_back({"link.endpoints", "link " + fmt_link(i, j) + " references unknown switch"});
        if (i == j && cap != 0)
            v.push_back({"link.self", "self link at switch " + std::to_string(i) + " must have capacity 0"});
        if (cap < 0)
            v.push_back({"link.capacity", "negative capacity on link " + fmt_link(i, j)});
        if (topo.delta > 0 && cap > topo.delta)
            v.push_back({"link.bound", "capacity " + std::to_string(cap) + " on link " + fmt_link(i, j) +
                                           " exceeds delta " + std::to_string(topo.delta)});
    }
    for (const auto& [key, cap] : topo.dest_capacity) {
        const auto [i, d] = key;
        if (!topo.switches.count(i))
            v.push_back({"dest.switch", "destination capacity references unknown switch " + std::to_string(i)});
        if (!topo.commodities.count(d))
            v.push_back({"dest.commodity", "destination capacity references unknown commodity " + std::to_string(d)});
        if (cap < 0)
            v.push_back({"dest.capacity", "negative destination capacity at (" + std::to_string(i) + "," +
                                              std::to_string(d) + ")"});
        if (topo.delta > 0 && cap > topo.delta)
            v.push_back({"dest.bound", "destination capacity " + std::to_string(cap) + " at (" + std::to_string(i) +
                                           "," + std::to_string(d) + ") exceeds delta " + std::to_string(topo.delta)});
    }

    for (const auto& [key, hops] : topo.next_hops) {
        const auto [i, d] = key;
        if (!topo.switches.count(i))
            v.push_back({"hops.switch", "next-hop set references unknown switch " + std::to_string(i)});
        if (!topo.commodities.count(d))
            v.push_back({"hops.commodity", "next-hop set references unknown commodity " + std::to_string(d)});
        for (SwitchId j : hops) {
            if (j == i)
                v.push_back({"hops.self", "switch " + std::to_string(i) + " lists itself as next hop for commodity " +
                                              std::to_string(d)});
            else if (!topo.switches.count(j))
                v.push_back({"hops.unknown", "next hop " + std::to_string(j) + " of switch " + std::to_string(i) +
                                                 " is not a switch"});
            else if (topo.capacity(i, j) <= 0)
                v.push_back({"hops.capacity", "commodity " + std::to_string(d) + " routed over zero-capacity link " +
                                                  fmt_link(i, j)});
        }
    }

    // per-commodity acyclicity of the next-hop graph
    for (CommodityId d : topo.commodities) {
        std::map<SwitchId, int> color; // 0 white, 1 gray, 2 black
        bool cyclic = false;
        std::function<void(SwitchId)> dfs = [&](SwitchId i) {
            color[i] = 1;
            if (const auto* hops = topo.hops(i, d)) {
                for (SwitchId j : *hops) {
                    if (cyclic) return;
                    auto it = color.find(j);
                    if (it == color.end()) {
                        dfs(j);
                    } else if (it->second == 1) {
                        cyclic = true;
                        v.push_back({"hops.cycle", "commodity " + std::to_string(d) +
                                                       " next-hop graph has a cycle through " + fmt_link(i, j)});
                        return;
                    }
                }
            }
            color[i] = 2;
        };
        for (SwitchId i : topo.switches) {
            if (!color.count(i) && !cyclic) dfs(i);
        }
    }

    // every routed switch must be able to reach an exit for its commodity
    for (CommodityId d : topo.commodities) {
        // switches that can reach a b>0 switch, computed backwards
        std::set<SwitchId> exits;
        for (SwitchId i : topo.switches) {
            if (topo.dest_cap(i, d) > 0) exits.insert(i);
        }
        std::set<SwitchId> reach = exits;
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& [key, hops] : topo.next_hops) {
                const auto [i, dd] = key;
                if (dd != d || reach.count(i) || hops.empty()) continue;
                for (SwitchId j : hops) {
                    if (reach.count(j)) {
                        reach.insert(i);
                        grew = true;
                        break;
                    }
                }
            }
        }
        for (const auto& [key, hops] : topo.next_hops) {
            const auto [i, dd] = key;
            if (dd != d || hops.empty()) continue;
            if (!reach.count(i))
                v.push_back({"hops.unreachable", "switch " + std::to_string(i) + " cannot reach an exit for commodity " +
                                                     std::to_string(d)});
        }
    }
    return v;
}

std::int64_t effective_delta(const Topology& topo, std::int64_t arrival_support_max) {
    if (topo.delta > 0) return topo.delta;
    std::int64_t m = arrival_support_max;
    for (const auto& [key, cap] : topo.link_capacity) m = std::max(m, cap);
    for (const auto& [key, cap] : topo.dest_capacity) m = std::max(m, cap);
    return m;
}

} // namespace lbsim
