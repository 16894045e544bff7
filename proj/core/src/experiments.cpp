#include "lbsim/experiments.hpp"

#include <cmath>
#include <ctime>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lbsim/trace_io.hpp"
#include "lbsim/version.hpp"

namespace lbsim {

using nlohmann::json;

std::string iso8601_now() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

std::string RunManifest::to_json() const {
    json j;
    j["config_digest"] = config_digest;
    j["code_version"] = code_version;
    j["rng"] = rng;
    j["seed"] = seed;
    j["scenario"] = scenario;
    j["algorithm"] = algorithm;
    j["started_at"] = started_at;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

std::vector<std::uint64_t> default_seeds() { return {1, 2, 3, 4, 5}; }

namespace {

bool is_flow_algorithm(Algorithm a) { return a == Algorithm::Heuristic || a == Algorithm::Ecmp; }

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

} // namespace

RunArtifacts cmd_run(const ScenarioConfig& config, const std::string& out_dir) {
    const auto violations = validate_topology(config.topology);
    if (!violations.empty()) {
        std::ostringstream os;
        os << "invalid topology:";
        for (const auto& v : violations) os << "\n  [" << v.rule << "] " << v.detail;
        throw ConfigError(os.str());
    }
    std::filesystem::create_directories(out_dir);

    RunArtifacts art;
    art.manifest.config_digest = config.digest;
    art.manifest.code_version = kVersion;
    art.manifest.rng = kRngName;
    art.manifest.seed = config.seed;
    art.manifest.scenario = config.name;
    art.manifest.algorithm = algorithm_name(config.algorithm);
    art.manifest.started_at = iso8601_now();

    if (is_flow_algorithm(config.algorithm)) {
        FlowSimResult result = run_flow_sim(config);
        const std::string metrics_path = join_path(out_dir, "flow_metrics.json");
        write_file(metrics_path, flow_metrics_to_json(result.metrics));
        art.files.push_back(metrics_path);
        const std::string fct_path = join_path(out_dir, "fct.csv");
        write_file(fct_path, flows_to_csv(result.flows));
        art.files.push_back(fct_path);
    } else {
        RunResult result = run_ideal(config);
        const std::string metrics_path = join_path(out_dir, "metrics.json");
        write_file(metrics_path, metrics_to_json(result.metrics));
        art.files.push_back(metrics_path);
        if (config.trace != TraceMode::None) {
            const std::string csv_path = join_path(out_dir, "trace.csv");
            write_file(csv_path, trace_to_csv(result.trace));
            art.files.push_back(csv_path);
            const std::string bin_path = join_path(out_dir, "trace.bin");
            write_file(bin_path, trace_to_binary(result.trace, config.digest));
            art.files.push_back(bin_path);
        }
    }
    for (const auto& f : art.files) art.manifest.outputs.push_back(std::filesystem::path(f).filename().string());
    const std::string manifest_path = join_path(out_dir, "manifest.json");
    write_file(manifest_path, art.manifest.to_json());
    art.files.push_back(manifest_path);
    return art;
}

namespace {

struct Agg {
    std::vector<double> samples;
    double mean() const {
        double s = 0.0;
        for (double v : samples) s += v;
        return samples.empty() ? 0.0 : s / static_cast<double>(samples.size());
    }
    double stderr_() const {
        if (samples.size() < 2) return 0.0;
        const double m = mean();
        double ss = 0.0;
        for (double v : samples) ss += (v - m) * (v - m);
        return std::sqrt(ss / static_cast<double>(samples.size() - 1)) /
               std::sqrt(static_cast<double>(samples.size()));
    }
};

} // namespace

ComparisonTable cmd_compare(const ScenarioConfig& base, const std::vector<Algorithm>& algorithms,
                            const std::vector<std::uint64_t>& seeds) {
    if (algorithms.size() < 2) throw std::invalid_argument("cmd_compare: need at least two algorithms");
    ComparisonTable table;
    std::map<std::pair<SwitchId, CommodityId>, std::vector<Agg>> cells;
    std::vector<Agg> network(algorithms.size());

    for (std::size_t a = 0; a < algorithms.size(); ++a) {
        table.algorithms.push_back(algorithm_name(algorithms[a]));
        for (auto seed : seeds) {
            ScenarioConfig cfg = base;
            cfg.algorithm = algorithms[a];
            cfg.seed = seed;
            RunResult result = run_ideal(cfg);
            for (const auto& q : result.metrics.per_queue) {
                auto& cell = cells[{q.sw, q.commodity}];
                cell.resize(algorithms.size());
                cell[a].samples.push_back(q.avg_backlog);
            }
            network[a].samples.push_back(result.metrics.network_avg_backlog);
        }
    }
    for (const auto& [key, aggs] : cells) {
        ComparisonTable::Row row;
        row.sw = key.first;
        row.commodity = key.second;
        for (const auto& agg : aggs) {
            row.mean.push_back(agg.mean());
            row.stderr_.push_back(agg.stderr_());
        }
        table.rows.push_back(std::move(row));
    }
    for (const auto& agg : network) {
        table.network_avg_mean.push_back(agg.mean());
        table.network_avg_stderr.push_back(agg.stderr_());
    }
    return table;
}

FlowComparison cmd_compare_flows(const ScenarioConfig& base, const std::vector<Algorithm>& algorithms,
                                 const std::vector<std::uint64_t>& seeds) {
    if (algorithms.size() < 2) throw std::invalid_argument("cmd_compare_flows: need at least two algorithms");
    FlowComparison cmp;
    for (auto algo : algorithms) {
        Agg mean, var, p99;
        for (auto seed : seeds) {
            ScenarioConfig cfg = base;
            cfg.algorithm = algo;
            cfg.seed = seed;
            FlowSimResult result = run_flow_sim(cfg);
            mean.samples.push_back(result.metrics.fct_mean);
            var.samples.push_back(result.metrics.fct_variance);
            p99.samples.push_back(result.metrics.fct_p99);
        }
        cmp.algorithms.push_back(algorithm_name(algo));
        cmp.fct_mean.push_back(mean.mean());
        cmp.fct_variance.push_back(var.mean());
        cmp.fct_p99.push_back(p99.mean());
    }
    return cmp;
}

ScenarioConfig with_parameter(const ScenarioConfig& base, const std::string& parameter, double value) {
    ScenarioConfig cfg = base;
    if (parameter == "T") {
        cfg.T = static_cast<std::int64_t>(value);
        if (cfg.T < 1) throw std::invalid_argument("sweep: T must be >= 1");
        if (cfg.horizon % cfg.T != 0) cfg.horizon = (cfg.horizon / cfg.T) * cfg.T;
    } else if (parameter == "K") {
        if (value < 1.0) throw std::invalid_argument("sweep: K must be >= 1");
        cfg.K = value;
    } else if (parameter == "arrival_scale") {
        if (value <= 0.0 || value > 1.0) throw std::invalid_argument("sweep: arrival_scale must be in (0,1]");
        cfg.arrival_scale = value;
    } else if (parameter == "alpha") {
        if (value <= 0.0) throw std::invalid_argument("sweep: alpha must be > 0");
        cfg.alpha = value;
    } else {
        throw std::invalid_argument("sweep: unknown parameter '" + parameter + "' (want T|K|arrival_scale|alpha)");
    }
    cfg.digest = fnv1a(dump_scenario(cfg));
    return cfg;
}

SweepResult cmd_sweep(const ScenarioConfig& base, const std::string& parameter,
                      const std::vector<double>& values, const std::vector<std::uint64_t>& seeds) {
    if (values.empty()) throw std::invalid_argument("cmd_sweep: empty value list");
    SweepResult out;
    for (double value : values) {
        for (auto seed : seeds) {
            ScenarioConfig cfg = with_parameter(base, parameter, value);
            cfg.seed = seed;
            RunResult result = run_ideal(cfg);
            SweepRow row;
            row.parameter = parameter;
            row.value = value;
            row.seed = seed;
            row.network_avg_backlog = result.metrics.network_avg_backlog;
            row.k_saturation = result.metrics.k_saturation;
            row.k_max = result.metrics.k_max;
            out.rows.push_back(row);
        }
    }
    return out;
}

std::string ComparisonTable::to_csv() const {
    std::ostringstream os;
    os << "switch,commodity";
    for (const auto& a : algorithms) os << ',' << a << "_mean," << a << "_stderr";
    os << '\n';
    for (const auto& row : rows) {
        os << row.sw << ',' << row.commodity;
        for (std::size_t a = 0; a < algorithms.size(); ++a)
            os << ',' << row.mean[a] << ',' << row.stderr_[a];
        os << '\n';
    }
    os << "network_avg,";
    for (std::size_t a = 0; a < algorithms.size(); ++a)
        os << ',' << network_avg_mean[a] << ',' << network_avg_stderr[a];
    os << '\n';
    return os.str();
}

std::string ComparisonTable::to_json() const {
    json j;
    j["algorithms"] = algorithms;
    json rows_json = json::array();
    for (const auto& row : rows) {
        rows_json.push_back({{"switch", row.sw},
                             {"commodity", row.commodity},
                             {"mean", row.mean},
                             {"stderr", row.stderr_}});
    }
    j["rows"] = rows_json;
    j["network_avg_mean"] = network_avg_mean;
    j["network_avg_stderr"] = network_avg_stderr;
    return j.dump(2) + "\n";
}

std::string FlowComparison::to_csv() const {
    std::ostringstream os;
    os << "algorithm,fct_mean,fct_variance,fct_p99\n";
    for (std::size_t a = 0; a < algorithms.size(); ++a)
        os << algorithms[a] << ',' << fct_mean[a] << ',' << fct_variance[a] << ',' << fct_p99[a] << '\n';
    return os.str();
}

std::string FlowComparison::to_json() const {
    json j;
    j["algorithms"] = algorithms;
    j["fct_mean"] = fct_mean;
    j["fct_variance"] = fct_variance;
    j["fct_p99"] = fct_p99;
    return j.dump(2) + "\n";
}

std::string SweepResult::to_csv() const {
    std::ostringstream os;
    os << "parameter,value,seed,network_avg_backlog,k_saturation,k_max\n";
    for (const auto& row : rows) {
        os << row.parameter << ',' << row.value << ',' << row.seed << ',' << row.network_avg_backlog << ','
           << row.k_saturation << ',' << row.k_max << '\n';
    }
    return os.str();
}

} // namespace lbsim
