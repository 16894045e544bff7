#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lbsim {

using SwitchId = int;
using CommodityId = int;
using LinkKey = std::pair<SwitchId, SwitchId>;

/// Static network description: switches, commodities, directed link
/// capacities, per-switch destination capacities, and the per-commodity
/// next-hop sets that routing was configured with.  All rates are integer
/// packets per slot and bounded by `delta`.
struct Topology {
    std::set<SwitchId> switches;
    std::set<CommodityId> commodities;
    std::map<LinkKey, std::int64_t> link_capacity;                      // directed
    std::map<std::pair<SwitchId, CommodityId>, std::int64_t> dest_capacity;
    std::map<std::pair<SwitchId, CommodityId>, std::set<SwitchId>> next_hops;
    std::int64_t delta = 0; // 0 = derive from capacities/arrival support

    std::int64_t capacity(SwitchId i, SwitchId j) const {
        auto it = link_capacity.find({i, j});
        return it == link_capacity.end() ? 0 : it->second;
    }
    std::int64_t dest_cap(SwitchId i, CommodityId d) const {
        auto it = dest_capacity.find({i, d});
        return it == dest_capacity.end() ? 0 : it->second;
    }
    const std::set<SwitchId>* hops(SwitchId i, CommodityId d) const {
        auto it = next_hops.find({i, d});
        return it == next_hops.end() ? nullptr : &it->second;
    }
};

/// Sets recomputable from a Topology: previous hops, union of next hops,
/// and the commodities riding each directed link.
struct DerivedSets {
    std::map<std::pair<SwitchId, CommodityId>, std::set<SwitchId>> prev_hops;
    std::map<SwitchId, std::set<SwitchId>> all_next;
    std::map<LinkKey, std::set<CommodityId>> link_commodities;
};

DerivedSets derive_sets(const Topology& topo);

/// One broken topology rule. `rule` is a stable identifier; `detail`
/// names the offending element.
struct Violation {
    std::string rule;
    std::string detail;
};

/// Full invariant check; returns every violation found (empty == valid).
std::vector<Violation> validate_topology(const Topology& topo);

/// Effective magnitude bound: configured delta, or the max over link,
/// destination, and (caller-supplied) arrival-support bounds.
std::int64_t effective_delta(const Topology& topo, std::int64_t arrival_support_max);

} // namespace lbsim
