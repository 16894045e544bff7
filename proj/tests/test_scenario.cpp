#include <doctest.h>

#include "lbsim/scenario.hpp"

using namespace lbsim;

namespace {

const char* kMinimal = R"({
  "name": "mini",
  "topology": {
    "switches": [1, 2],
    "commodities": [1],
    "links": [{"from": 1, "to": 2, "capacity": 3}],
    "dest_links": [{"switch": 2, "commodity": 1, "capacity": 3}],
    "next_hops": [{"switch": 1, "commodity": 1, "via": [2]}]
  },
  "arrivals": [{"switch": 1, "commodity": 1, "kind": "deterministic", "value": 2}]
})";

} // namespace

TEST_CASE("minimal config picks up the documented defaults") {
    const auto cfg = load_scenario(kMinimal);
    CHECK(cfg.T == 100);
    CHECK(cfg.K == 10.0);
    CHECK(cfg.alpha == 5.0);
    CHECK(cfg.horizon == 100000);
    CHECK(cfg.algorithm == Algorithm::Algorithm1);
    CHECK(cfg.queue_capacity == 200);
    CHECK(cfg.delta() == 3);
    CHECK(cfg.digest != 0);
}

TEST_CASE("unknown keys are rejected") {
    std::string bad = kMinimal;
    bad.insert(bad.rfind('}'), R"(, "run": {"T": 10, "horizont": 100})");
    CHECK_THROWS_AS(load_scenario(bad), ConfigError);
}

TEST_CASE("horizon must be a multiple of T") {
    std::string bad = kMinimal;
    bad.insert(bad.rfind('}'), R"(, "run": {"T": 7, "horizon": 100})");
    CHECK_THROWS_WITH_AS(load_scenario(bad), doctest::Contains("not a multiple of T"), ConfigError);
}

TEST_CASE("parse errors carry the origin") {
    CHECK_THROWS_WITH_AS(load_scenario("{ not json", "broken.json"), doctest::Contains("broken.json"),
                         ConfigError);
    CHECK_THROWS_AS(load_scenario_file("/nonexistent/path.json"), ConfigError);
}

TEST_CASE("algorithm names round-trip") {
    for (auto a : {Algorithm::Algorithm1, Algorithm::MaxWeight, Algorithm::Heuristic, Algorithm::Ecmp}) {
        CHECK(algorithm_from_name(algorithm_name(a)) == a);
    }
    CHECK_FALSE(algorithm_from_name("nope").has_value());
}

TEST_CASE("invalid arrival kind names the field") {
    std::string bad = kMinimal;
    const auto pos = bad.find("deterministic");
    bad.replace(pos, std::string("deterministic").size(), "gaussian");
    CHECK_THROWS_WITH_AS(load_scenario(bad), doctest::Contains("kind"), ConfigError);
}

TEST_CASE("canonical dump round-trips to the same digest") {
    const auto cfg = load_scenario(kMinimal);
    const auto again = load_scenario(dump_scenario(cfg));
    CHECK(again.digest == cfg.digest);
    CHECK(again.T == cfg.T);
    CHECK(again.topology.link_capacity == cfg.topology.link_capacity);
    CHECK(again.topology.next_hops == cfg.topology.next_hops);
}

TEST_CASE("arrival support above an explicit delta is a semantic error") {
    std::string bad = kMinimal;
    bad.insert(bad.find("\"switches\""), "\"delta\": 3, ");
    const auto pos = bad.find("\"value\": 2");
    bad.replace(pos, std::string("\"value\": 2").size(), "\"value\": 9");
    CHECK_THROWS_WITH_AS(load_scenario(bad), doctest::Contains("delta"), ConfigError);
}

TEST_CASE("K below one is rejected") {
    std::string bad = kMinimal;
    bad.insert(bad.rfind('}'), R"(, "run": {"K": 0.5})");
    CHECK_THROWS_WITH_AS(load_scenario(bad), doctest::Contains("K"), ConfigError);
}
