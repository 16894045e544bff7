#include <doctest.h>

#include "lbsim/rng.hpp"
#include "lbsim/topology.hpp"

using namespace lbsim;

namespace {

// Line network: 1 -> 2 -> 3 -> 4, two commodities, exit at switch 4.
Topology line_topology() {
    Topology t;
    t.switches = {1, 2, 3, 4};
    t.commodities = {1, 2};
    for (int i = 1; i <= 3; ++i) t.link_capacity[{i, i + 1}] = 10;
    for (int d = 1; d <= 2; ++d) {
        t.dest_capacity[{4, d}] = 10;
        for (int i = 1; i <= 3; ++i) t.next_hops[{i, d}] = {i + 1};
    }
    return t;
}

// Aggregation fragment: switch 9 forwards commodity 8 via 13 and 14.
Topology fanout_fragment() {
    Topology t;
    t.switches = {8, 9, 10, 13, 14};
    t.commodities = {8};
    t.link_capacity[{9, 13}] = 5;
    t.link_capacity[{9, 14}] = 5;
    t.link_capacity[{10, 13}] = 5;
    t.link_capacity[{13, 8}] = 5;
    t.link_capacity[{14, 8}] = 5;
    t.next_hops[{9, 8}] = {13, 14};
    t.next_hops[{10, 8}] = {13};
    t.next_hops[{13, 8}] = {8};
    t.next_hops[{14, 8}] = {8};
    t.dest_capacity[{8, 8}] = 5;
    return t;
}

} // namespace

TEST_CASE("derive_sets on the fan-out fragment") {
    const auto d = derive_sets(fanout_fragment());
    CHECK(d.prev_hops.at({13, 8}) == std::set<SwitchId>{9, 10});
    CHECK(d.prev_hops.at({14, 8}) == std::set<SwitchId>{9});
    CHECK(d.all_next.at(9) == std::set<SwitchId>{13, 14});
    CHECK(d.link_commodities.at({9, 13}) == std::set<CommodityId>{8});
}

TEST_CASE("derive_sets on a single isolated switch") {
    Topology t;
    t.switches = {1};
    t.commodities = {1};
    const auto d = derive_sets(t);
    CHECK(d.prev_hops.empty());
    CHECK(d.all_next.empty());
    CHECK(d.link_commodities.empty());
}

TEST_CASE("derive_sets on the line network") {
    const auto d = derive_sets(line_topology());
    CHECK(d.prev_hops.at({4, 1}) == std::set<SwitchId>{3});
    CHECK(d.prev_hops.at({4, 2}) == std::set<SwitchId>{3});
    CHECK(d.link_commodities.at({1, 2}) == std::set<CommodityId>{1, 2});
}

TEST_CASE("membership equivalences hold on derived sets") {
    const auto topo = fanout_fragment();
    const auto d = derive_sets(topo);
    for (SwitchId i : topo.switches) {
        for (SwitchId j : topo.switches) {
            for (CommodityId c : topo.commodities) {
                const auto* hops = topo.hops(i, c);
                const bool in_h = hops && hops->count(j);
                auto lc = d.link_commodities.find({i, j});
                const bool in_d = lc != d.link_commodities.end() && lc->second.count(c);
                auto ph = d.prev_hops.find({j, c});
                const bool in_p = ph != d.prev_hops.end() && ph->second.count(i);
                CHECK(in_h == in_d);
                CHECK(in_h == in_p);
            }
        }
    }
}

TEST_CASE("derive_sets is deterministic and idempotent") {
    const auto topo = fanout_fragment();
    const auto a = derive_sets(topo);
    const auto b = derive_sets(topo);
    CHECK(a.prev_hops == b.prev_hops);
    CHECK(a.all_next == b.all_next);
    CHECK(a.link_commodities == b.link_commodities);
}

TEST_CASE("validate_topology accepts the shipped shapes") {
    CHECK(validate_topology(line_topology()).empty());
    CHECK(validate_topology(fanout_fragment()).empty());
}

TEST_CASE("validate_topology flags a routing cycle") {
    auto t = fanout_fragment();
    t.link_capacity[{13, 9}] = 5;
    t.next_hops[{13, 8}] = {9}; // 9 -> 13 -> 9
    bool found = false;
    for (const auto& v : validate_topology(t)) found = found || v.rule == "hops.cycle";
    CHECK(found);
}

TEST_CASE("validate_topology flags a capacity above delta") {
    auto t = line_topology();
    t.delta = 10;
    t.link_capacity[{1, 2}] = 11;
    bool found = false;
    for (const auto& v : validate_topology(t)) found = found || v.rule == "link.bound";
    CHECK(found);
}

TEST_CASE("validate_topology flags unreachable exits and dead links") {
    auto t = line_topology();
    t.dest_capacity.clear(); // no exit anywhere
    bool unreachable = false;
    for (const auto& v : validate_topology(t)) unreachable = unreachable || v.rule == "hops.unreachable";
    CHECK(unreachable);

    auto z = line_topology();
    z.link_capacity[{2, 3}] = 0; // commodity routed over a dead link
    bool dead = false;
    for (const auto& v : validate_topology(z)) dead = dead || v.rule == "hops.capacity";
    CHECK(dead);
}

TEST_CASE("effective_delta derives from maxima when unset") {
    auto t = line_topology();
    CHECK(effective_delta(t, 0) == 10);
    CHECK(effective_delta(t, 25) == 25);
    t.delta = 40;
    CHECK(effective_delta(t, 25) == 40);
}
