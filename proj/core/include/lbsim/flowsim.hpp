#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lbsim/scenario.hpp"
#include "lbsim/topology.hpp"

namespace lbsim {

/// One transport flow: AIMD window, epoch bookkeeping, and the final
/// completion record.
struct FlowRecord {
    int id = 0;
    SwitchId source = 0;
    CommodityId commodity = 0;
    std::int64_t size = 0;       // packets to deliver
    std::int64_t start_slot = 0; // first eligible injection slot
    std::uint64_t hash_field = 0;
    std::int64_t window = 1;
    std::int64_t delivered = 0;
    std::int64_t drops = 0;           // packets lost and later retransmitted
    std::int64_t completion_slot = -1; // -1 while incomplete
    std::uint64_t path_digest = 0;     // path of the last delivered packet

    bool done() const { return completion_slot >= 0; }
    std::int64_t fct() const { return done() ? completion_slot - start_slot : -1; }
};

/// Packets a switch forwarded toward one next hop, plus how many flows
/// used that hop for the majority of their packets.
struct RouteCount {
    SwitchId sw = 0;
    SwitchId next_hop = 0;
    std::int64_t packets = 0;
    std::int64_t majority_flows = 0;
};

struct FlowMetrics {
    std::string scenario;
    std::string algorithm;
    std::uint64_t seed = 0;
    std::uint64_t config_digest = 0;
    std::int64_t horizon = 0;

    std::int64_t flows_total = 0;
    std::int64_t flows_completed = 0;
    double fct_mean = 0.0;
    double fct_variance = 0.0;
    double fct_p99 = 0.0;
    std::int64_t fct_max = 0;
    std::int64_t drops_total = 0;
    std::int64_t remap_events = 0; // (switch, commodity) split changes across reconfigs
    std::vector<RouteCount> route_counts;
};

struct FlowSimResult {
    std::vector<FlowRecord> flows;
    FlowMetrics metrics;
};

/// Slot-granularity flow simulation with per-port commodity queues, WFQ
/// service, piggybacked queue information, and hash-based splitting
/// (algorithm = heuristic), or shared FIFO ports with uniform hashing
/// (algorithm = ecmp).  Deterministic in (config, seed).
FlowSimResult run_flow_sim(const ScenarioConfig& config);

} // namespace lbsim
