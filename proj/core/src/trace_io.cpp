#include "lbsim/trace_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lbsim {

using nlohmann::json;

std::string metrics_to_json(const MetricsReport& m) {
    json j;
    j["scenario"] = m.scenario;
    j["algorithm"] = m.algorithm;
    j["seed"] = m.seed;
    j["config_digest"] = m.config_digest;
    j["T"] = m.T;
    j["horizon"] = m.horizon;
    j["window_start"] = m.window_start;
    j["network_avg_backlog"] = m.network_avg_backlog;
    j["k_saturation"] = m.k_saturation;
    j["k_intervals"] = m.k_intervals;
    j["k_max"] = m.k_max;
    j["convergence_slot"] = m.convergence_slot;
    j["total_arrivals"] = m.total_arrivals;
    j["total_departures"] = m.total_departures;
    j["final_backlog"] = m.final_backlog;
    j["invariant_violations"] = m.invariant_violations;
    j["violation_samples"] = m.violation_samples;
    json queues = json::array();
    for (const auto& q : m.per_queue) {
        queues.push_back({{"switch", q.sw}, {"commodity", q.commodity}, {"avg_backlog", q.avg_backlog}});
    }
    j["per_queue"] = queues;
    return j.dump(2) + "\n";
}

std::string flow_metrics_to_json(const FlowMetrics& m) {
    json j;
    j["scenario"] = m.scenario;
    j["algorithm"] = m.algorithm;
    j["seed"] = m.seed;
    j["config_digest"] = m.config_digest;
    j["horizon"] = m.horizon;
    j["flows_total"] = m.flows_total;
    j["flows_completed"] = m.flows_completed;
    j["fct_mean"] = m.fct_mean;
    j["fct_variance"] = m.fct_variance;
    j["fct_p99"] = m.fct_p99;
    j["fct_max"] = m.fct_max;
    j["drops_total"] = m.drops_total;
    j["remap_events"] = m.remap_events;
    json routes = json::array();
    for (const auto& r : m.route_counts) {
        routes.push_back({{"switch", r.sw},
                          {"next_hop", r.next_hop},
                          {"packets", r.packets},
                          {"majority_flows", r.majority_flows}});
    }
    j["route_counts"] = routes;
    return j.dump(2) + "\n";
}

std::string trace_to_csv(const SlotTrace& trace) {
    std::ostringstream os;
    os << "slot,switch,commodity,backlog,arrivals,transmit,deliver,depart\n";
    for (const auto& rec : trace.records) {
        for (std::size_t q = 0; q < trace.queue_keys.size(); ++q) {
            os << rec.slot << ',' << trace.queue_keys[q].first << ',' << trace.queue_keys[q].second << ','
               << rec.backlog[q] << ',' << rec.arrivals[q] << ',' << rec.transmit[q] << ',' << rec.deliver[q]
               << ',' << rec.depart[q] << '\n';
        }
    }
    return os.str();
}

namespace {

template <typename T>
void put_le(std::string& out, T value) {
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * b)) & 0xff));
    }
}

} // namespace

std::string trace_to_binary(const SlotTrace& trace, std::uint64_t config_digest) {
    std::string out;
    out.append("LBTR");
    put_le<std::uint32_t>(out, 1);
    put_le<std::uint64_t>(out, config_digest);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(trace.decimation));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(trace.queue_keys.size()));
    for (const auto& [sw, d] : trace.queue_keys) {
        put_le<std::int32_t>(out, sw);
        put_le<std::int32_t>(out, d);
    }
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(trace.records.size()));
    for (const auto& rec : trace.records) {
        put_le<std::uint64_t>(out, static_cast<std::uint64_t>(rec.slot));
        for (auto b : rec.backlog) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(b));
    }
    return out;
}

std::string flows_to_csv(const std::vector<FlowRecord>& flows) {
    std::ostringstream os;
    os << "flow_id,commodity,source,start,completion,fct,retransmits,path_digest\n";
    for (const auto& f : flows) {
        os << f.id << ',' << f.commodity << ',' << f.source << ',' << f.start_slot << ',' << f.completion_slot
           << ',' << f.fct() << ',' << f.drops << ',' << f.path_digest << '\n';
    }
    return os.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write: " + path);
}

} // namespace lbsim
