#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lbsim/allocator.hpp"
#include "lbsim/arrivals.hpp"
#include "lbsim/scenario.hpp"
#include "lbsim/topology.hpp"

namespace lbsim {

/// Dense-index view of a validated topology, fixed for a whole run.
/// Iteration orders (links by external (from, to), commodities ascending)
/// are part of the simulator's determinism contract.
struct CompiledNetwork {
    std::vector<SwitchId> switch_ids;       // dense -> external
    std::vector<CommodityId> commodity_ids; // dense -> external
    int n_switches = 0;
    int n_commodities = 0;

    struct Link {
        int from = 0, to = 0; // dense switch indices
        std::int64_t capacity = 0;
        std::vector<int> commodities; // dense commodity ids, ascending
    };
    std::vector<Link> links;
    std::vector<std::int64_t> dest_cap;        // [sw * nd + d]
    std::vector<std::vector<int>> out_links;   // [sw * nd + d] -> link indices, ascending next-hop id
    std::vector<std::vector<int>> next_hops;   // [sw * nd + d] -> dense next-hop switches, ascending external id
    std::vector<bool> queue_active;            // [sw * nd + d] can this pair ever hold packets
    std::int64_t delta = 0;

    int switch_index(SwitchId id) const;
    int commodity_index(CommodityId id) const;
    int qid(int sw, int d) const { return sw * n_commodities + d; }
    std::size_t n_queues() const { return static_cast<std::size_t>(n_switches) * n_commodities; }
};

CompiledNetwork compile_network(const Topology& topo, std::int64_t arrival_support_max);

/// One retained slot of a run (decimation-aware).
struct SlotRecord {
    std::int64_t slot = 0;
    std::vector<std::int64_t> backlog;    // per active queue, trace key order
    std::vector<std::int64_t> arrivals;   // exogenous arrivals this slot
    std::vector<std::int64_t> transmit;   // packets sent to next hops this slot
    std::vector<std::int64_t> deliver;    // packets received from previous hops
    std::vector<std::int64_t> depart;     // packets that left to the destination
};

struct SlotTrace {
    std::vector<std::pair<SwitchId, CommodityId>> queue_keys;
    std::vector<SlotRecord> records;
    std::int64_t decimation = 1;
};

struct QueueAverage {
    SwitchId sw = 0;
    CommodityId commodity = 0;
    double avg_backlog = 0.0;
};

struct MetricsReport {
    std::string scenario;
    std::string algorithm;
    std::uint64_t seed = 0;
    std::uint64_t config_digest = 0;
    std::int64_t T = 0;
    std::int64_t horizon = 0;
    std::int64_t window_start = 0; // averages taken over [window_start, horizon)

    std::vector<QueueAverage> per_queue;
    double network_avg_backlog = 0.0; // mean over active queues of time averages
    double k_saturation = 0.0;        // fraction of (link, interval) pairs at k == K
    double k_max = 0.0;
    std::int64_t k_intervals = 0;     // denominator behind k_saturation
    std::int64_t convergence_slot = 0;

    std::int64_t total_arrivals = 0;
    std::int64_t total_departures = 0;
    std::int64_t final_backlog = 0;

    std::int64_t invariant_violations = 0;
    std::vector<std::string> violation_samples; // first few, for diagnostics
};

struct RunResult {
    MetricsReport metrics;
    SlotTrace trace;
};

struct RunOptions {
    bool check_invariants = true;
};

/// Slotted-time run of the ideal (per-commodity common queue) model with
/// the configured allocator.  Bit-reproducible from (config, seed).
RunResult run_ideal(const ScenarioConfig& config, const RunOptions& options = {});

/// Time averages over [window_start, window_end) recomputed from a trace
/// (full-resolution traces only give exact results; decimated traces
/// average the retained rows).  Rejects an empty window.
std::vector<QueueAverage> collect_metrics(const SlotTrace& trace, std::int64_t window_start,
                                          std::int64_t window_end);

/// First slot after which the sliding-window mean of total backlog moves
/// by less than 1% per window; `horizon` when it never settles.
std::int64_t convergence_slot(const std::vector<std::int64_t>& total_backlog_per_slot);

} // namespace lbsim
