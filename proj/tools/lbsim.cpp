#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lbsim/experiments.hpp"
#include "lbsim/trace_io.hpp"
#include "lbsim/version.hpp"

namespace {

using namespace lbsim;

std::string default_out_dir() {
    const char* env = std::getenv("LBSIM_OUT");
    return env && *env ? env : "out";
}

std::vector<Algorithm> parse_algorithms(const std::vector<std::string>& names) {
    std::vector<Algorithm> out;
    for (const auto& n : names) {
        auto a = algorithm_from_name(n);
        if (!a) throw ConfigError("unknown algorithm '" + n + "' (want algorithm1|maxweight|heuristic|ecmp)");
        out.push_back(*a);
    }
    return out;
}

int do_run(const std::string& config_path, std::int64_t seed_override, const std::string& out_dir,
           const std::string& trace_mode) {
    ScenarioConfig cfg = load_scenario_file(config_path);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (!trace_mode.empty()) {
        if (trace_mode == "none") cfg.trace = TraceMode::None;
        else if (trace_mode == "decimated") cfg.trace = TraceMode::Decimated;
        else if (trace_mode == "full") cfg.trace = TraceMode::Full;
        else throw ConfigError("unknown trace mode '" + trace_mode + "'");
    }
    RunArtifacts art = cmd_run(cfg, out_dir);
    for (const auto& f : art.files) std::cout << "wrote " << f << "\n";
    return 0;
}

int do_compare(const std::string& config_path, const std::vector<std::string>& algo_names,
               std::vector<std::uint64_t> seeds, const std::string& out_dir) {
    ScenarioConfig cfg = load_scenario_file(config_path);
    const auto algorithms = parse_algorithms(algo_names);
    if (seeds.empty()) seeds = default_seeds();

    bool flow = true, ideal = true;
    for (auto a : algorithms) {
        if (a == Algorithm::Heuristic || a == Algorithm::Ecmp) ideal = false;
        else flow = false;
    }
    if (!flow && !ideal) throw ConfigError("compare: cannot mix ideal and flow algorithms in one table");

    std::filesystem::create_directories(out_dir);
    if (ideal) {
        ComparisonTable table = cmd_compare(cfg, algorithms, seeds);
        write_file((std::filesystem::path(out_dir) / "compare.csv").string(), table.to_csv());
        write_file((std::filesystem::path(out_dir) / "compare.json").string(), table.to_json());
        std::cout << table.to_csv();
    } else {
        FlowComparison table = cmd_compare_flows(cfg, algorithms, seeds);
        write_file((std::filesystem::path(out_dir) / "fct_compare.csv").string(), table.to_csv());
        write_file((std::filesystem::path(out_dir) / "fct_compare.json").string(), table.to_json());
        std::cout << table.to_csv();
    }
    return 0;
}

int do_sweep(const std::string& config_path, const std::string& param, const std::vector<double>& values,
             std::vector<std::uint64_t> seeds, const std::string& out_dir) {
    ScenarioConfig cfg = load_scenario_file(config_path);
    if (seeds.empty()) seeds = default_seeds();
    SweepResult result = cmd_sweep(cfg, param, values, seeds);
    std::filesystem::create_directories(out_dir);
    write_file((std::filesystem::path(out_dir) / "sweep.csv").string(), result.to_csv());
    std::cout << result.to_csv();
    return 0;
}

int do_validate(const std::string& config_path) {
    ScenarioConfig cfg = load_scenario_file(config_path);
    const auto violations = validate_topology(cfg.topology);
    if (violations.empty()) {
        std::cout << "ok: " << cfg.name << " (digest " << cfg.digest << ")\n";
        return 0;
    }
    for (const auto& v : violations) std::cout << "[" << v.rule << "] " << v.detail << "\n";
    return 2;
}

int do_alloc_debug(const std::string& state_path) {
    std::ifstream in(state_path);
    if (!in) throw ConfigError("cannot open state file: " + state_path);
    nlohmann::json j = nlohmann::json::parse(in);

    LinkAllocState state;
    state.budget = j.at("budget").get<std::int64_t>();
    state.K = j.value("K", 10.0);
    for (const auto& c : j.at("commodities")) {
        state.add(c.at("id").get<int>(), c.at("q_local").get<std::int64_t>(),
                  c.value("q_next", std::int64_t{0}), c.value("prev", std::int64_t{0}));
    }
    state.normalize();

    const Request req = compute_request(state);
    const Rational k = compute_k(req, state.budget, state.K);
    std::cout << "budget " << state.budget << ", K " << state.K << "\n";
    std::int64_t round_sum = 0;
    for (std::size_t n = 0; n < state.entries.size(); ++n) {
        const auto& e = state.entries[n];
        const std::int64_t cap = x_max(e.q_local, e.q_next, e.prev, k);
        round_sum += cap;
        std::cout << "commodity " << e.commodity << ": y=" << req.y[n] << " x_max=" << cap << "\n";
    }
    std::cout << "k = " << k.num << "/" << k.den << " = " << k.to_double() << "\n";
    std::cout << "sum of rounded requests = " << round_sum
              << (round_sum <= state.budget ? " <= budget: direct grant\n" : " > budget: packet filling\n");
    const Allocation alloc = allocate_rates(state);
    for (std::size_t n = 0; n < state.entries.size(); ++n)
        std::cout << "rate[" << state.entries[n].commodity << "] = " << alloc.rates[n] << "\n";
    std::cout << "objective = " << alloc.objective << ", total = " << alloc.total() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lbsim: slotted-time network load-balancing simulator"};
    app.set_version_flag("--version", lbsim::kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir = default_out_dir(), trace_mode, param, state_path;
    std::int64_t seed_override = -1;
    std::vector<std::string> algo_names;
    std::vector<std::uint64_t> seeds;
    std::vector<double> values;

    auto* run = app.add_subcommand("run", "execute one scenario and write its artifacts");
    run->add_option("--config", config_path, "scenario file")->required();
    run->add_option("--seed", seed_override, "override the scenario seed");
    run->add_option("--out", out_dir, "output directory (default $LBSIM_OUT or ./out)");
    run->add_option("--trace", trace_mode, "none|decimated|full");

    auto* compare = app.add_subcommand("compare", "run several algorithms on one scenario");
    compare->add_option("--config", config_path, "scenario file")->required();
    compare->add_option("--algorithms", algo_names, "two or more algorithms")->required()->delimiter(',');
    compare->add_option("--seeds", seeds, "seed list (default 1..5)")->delimiter(',');
    compare->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "sweep one parameter across values");
    sweep->add_option("--config", config_path, "scenario file")->required();
    sweep->add_option("--param", param, "T|K|arrival_scale|alpha")->required();
    sweep->add_option("--values", values, "parameter values")->required()->delimiter(',');
    sweep->add_option("--seeds", seeds, "seed list (default 1..5)")->delimiter(',');
    sweep->add_option("--out", out_dir, "output directory");

    auto* validate = app.add_subcommand("validate", "lint a scenario's topology");
    validate->add_option("--config", config_path, "scenario file")->required();

    auto* alloc = app.add_subcommand("alloc-debug", "run one link allocation with a step log");
    alloc->add_option("--state", state_path, "link state file (json)")->required();

    try {
        app.parse(argc, argv);
        if (run->parsed()) return do_run(config_path, seed_override, out_dir, trace_mode);
        if (compare->parsed()) return do_compare(config_path, algo_names, seeds, out_dir);
        if (sweep->parsed()) return do_sweep(config_path, param, values, seeds, out_dir);
        if (validate->parsed()) return do_validate(config_path);
        if (alloc->parsed()) return do_alloc_debug(state_path);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const lbsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
