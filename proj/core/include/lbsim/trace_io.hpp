#pragma once

#include <string>

#include "lbsim/flowsim.hpp"
#include "lbsim/sim.hpp"

namespace lbsim {

/// metrics.json payload (stable key order, reproducible bytes).
std::string metrics_to_json(const MetricsReport& metrics);

/// Flow metrics JSON, including route counts.
std::string flow_metrics_to_json(const FlowMetrics& metrics);

/// trace.csv: one row per retained slot per queue.
/// Columns: slot,switch,commodity,backlog,arrivals,transmit,deliver,depart
std::string trace_to_csv(const SlotTrace& trace);

/// Compact binary trace. Little-endian layout:
///   magic "LBTR", u32 version=1, u64 config digest, u64 decimation,
///   u32 n_queues, then per queue (i32 switch, i32 commodity), u64 n_records,
///   then per record: u64 slot + n_queues * u32 backlog.
std::string trace_to_binary(const SlotTrace& trace, std::uint64_t config_digest);

/// fct.csv: flow_id,commodity,source,start,completion,fct,retransmits,path_digest
std::string flows_to_csv(const std::vector<FlowRecord>& flows);

void write_file(const std::string& path, const std::string& bytes);

} // namespace lbsim
