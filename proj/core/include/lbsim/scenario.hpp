#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbsim/arrivals.hpp"
#include "lbsim/topology.hpp"

namespace lbsim {

enum class Algorithm { Algorithm1, MaxWeight, Heuristic, Ecmp };

const char* algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(const std::string& name);

/// Scripted events for flow-level scenarios.
struct LinkFailure {
    std::int64_t slot = 0;
    SwitchId from = 0, to = 0;
};
struct Reservation { // constant-rate priority reservation on a directed link
    SwitchId from = 0, to = 0;
    std::int64_t rate = 0;
    std::int64_t start_slot = 0;
};

/// One group of same-shaped flows: `count` flows from `source` switch
/// carrying commodity `commodity`.
struct FlowGroup {
    SwitchId source = 0;
    CommodityId commodity = 0;
    int count = 0;
};

struct FlowSetup {
    std::int64_t flow_size = 1000;        // packets per flow
    std::int64_t start_lo = 0, start_hi = 0; // uniform start-slot jitter window
    std::vector<FlowGroup> groups;
};

enum class TraceMode { None, Decimated, Full };

/// Fully resolved experiment description.  Everything a run needs is
/// here; (config, seed) determines every output bit.
struct ScenarioConfig {
    std::string name;
    Topology topology;
    ArrivalSpec arrivals;

    std::int64_t T = 100;
    double K = 10.0;
    double alpha = 5.0;
    std::int64_t horizon = 100000;
    std::uint64_t seed = 1;
    Algorithm algorithm = Algorithm::Algorithm1;
    std::int64_t queue_capacity = 200; // per commodity port queue, flow mode
    double arrival_scale = 1.0;
    double discard_fraction = 0.2;     // metrics window = [discard*horizon, horizon)
    bool convergence_window = false;   // use the sliding-window detector instead
    TraceMode trace = TraceMode::None;
    std::int64_t trace_decimation = 100;

    FlowSetup flows;
    std::vector<LinkFailure> link_failures;
    std::vector<Reservation> reservations;

    std::uint64_t digest = 0; // canonical config digest (filled by the loader)

    std::int64_t delta() const { return effective_delta(topology, arrivals.support_max()); }
};

/// Thrown on malformed or semantically invalid configuration documents.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

ScenarioConfig load_scenario(const std::string& json_text, const std::string& origin = "<string>");
ScenarioConfig load_scenario_file(const std::string& path);

/// Canonical serialization of the scenario (sorted keys, no formatting
/// noise) and its FNV-1a digest; re-loading the dump reproduces the digest.
std::string dump_scenario(const ScenarioConfig& config);
std::uint64_t fnv1a(const std::string& bytes);

} // namespace lbsim
