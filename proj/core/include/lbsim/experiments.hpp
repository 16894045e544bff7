#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lbsim/flowsim.hpp"
#include "lbsim/scenario.hpp"
#include "lbsim/sim.hpp"

namespace lbsim {

/// Reproducibility record written next to every run's outputs.
struct RunManifest {
    std::uint64_t config_digest = 0;
    std::string code_version;
    std::string rng;
    std::uint64_t seed = 0;
    std::string scenario;
    std::string algorithm;
    std::string started_at; // ISO-8601, informational only
    std::vector<std::string> outputs;

    std::string to_json() const;
};

struct RunArtifacts {
    RunManifest manifest;
    std::vector<std::string> files; // paths written
};

/// Executes one scenario and writes metrics (.json), optional traces, FCT
/// data for flow algorithms, and the manifest under `out_dir`.
RunArtifacts cmd_run(const ScenarioConfig& config, const std::string& out_dir);

/// Table of per-(switch, commodity) time-averaged backlogs, one column
/// per algorithm, aggregated over seeds (mean and standard error).
struct ComparisonTable {
    struct Row {
        SwitchId sw = 0;
        CommodityId commodity = 0;
        std::vector<double> mean;   // per algorithm
        std::vector<double> stderr_; // per algorithm
    };
    std::vector<std::string> algorithms;
    std::vector<Row> rows;
    std::vector<double> network_avg_mean;   // per algorithm
    std::vector<double> network_avg_stderr; // per algorithm

    std::string to_csv() const;
    std::string to_json() const;
};

/// FCT summary comparison for flow algorithms.
struct FlowComparison {
    std::vector<std::string> algorithms;
    std::vector<double> fct_mean, fct_variance, fct_p99; // seed-averaged
    std::string to_csv() const;
    std::string to_json() const;
};

ComparisonTable cmd_compare(const ScenarioConfig& base, const std::vector<Algorithm>& algorithms,
                            const std::vector<std::uint64_t>& seeds);
FlowComparison cmd_compare_flows(const ScenarioConfig& base, const std::vector<Algorithm>& algorithms,
                                 const std::vector<std::uint64_t>& seeds);

/// Parameter sweep: one run per (value, seed), long-format rows.
struct SweepRow {
    std::string parameter;
    double value = 0.0;
    std::uint64_t seed = 0;
    double network_avg_backlog = 0.0;
    double k_saturation = 0.0;
    double k_max = 0.0;
};
struct SweepResult {
    std::vector<SweepRow> rows;
    std::string to_csv() const;
};

SweepResult cmd_sweep(const ScenarioConfig& base, const std::string& parameter,
                      const std::vector<double>& values, const std::vector<std::uint64_t>& seeds);

/// Applies a sweep parameter (T, K, arrival_scale, alpha) to a config copy.
ScenarioConfig with_parameter(const ScenarioConfig& base, const std::string& parameter, double value);

/// Default seeds {1..5} for stochastic comparisons.
std::vector<std::uint64_t> default_seeds();

std::string iso8601_now();

} // namespace lbsim
