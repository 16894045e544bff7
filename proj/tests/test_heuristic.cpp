#include <doctest.h>

#include <map>

#include "lbsim/heuristic.hpp"
#include "lbsim/oracle.hpp"
#include "lbsim/rng.hpp"

using namespace lbsim;

TEST_CASE("approx_queue sums the port backlogs") {
    CHECK(approx_queue({}) == 0);
    CHECK(approx_queue({0, 0, 0}) == 0);
    CHECK(approx_queue({40, 60}) == 100);
    CHECK(approx_queue({17}) == 17); // single port: approximation is exact
}

TEST_CASE("piggyback rotation is fair and cyclic") {
    PiggybackRotor rotor({4, 7, 9});
    CHECK(rotor.next() == 4);
    CHECK(rotor.next() == 7);
    CHECK(rotor.next() == 9);
    CHECK(rotor.next() == 4);

    PiggybackRotor solo({3});
    for (int i = 0; i < 5; ++i) CHECK(solo.next() == 3);

    PiggybackRotor r2({1, 2, 5, 6});
    std::map<CommodityId, int> seen;
    for (int i = 0; i < 4; ++i) ++seen[r2.next()];
    for (const auto& [d, n] : seen) CHECK(n == 1);
}

TEST_CASE("queue info moving average") {
    QueueInfoEma ema;
    CHECK(ema.update(0) == 0);

    QueueInfoEma fixed;
    fixed.update(80);
    for (int i = 0; i < 200; ++i) fixed.update(80);
    CHECK(fixed.rounded() == 80); // fixed point

    QueueInfoEma fresh;
    CHECK(fresh.update(80) == 10); // beta = 1/8 from zero
}

TEST_CASE("wfq weights") {
    CHECK(wfq_weight(50, 30, 25, 5.0) == doctest::Approx(25.0));
    CHECK(wfq_weight(0, 100, 0, 5.0) == doctest::Approx(1.0)); // floor at 1

    // two commodities with weights (25, 75) share capacity 1:3
    const double w1 = 25.0, w2 = 75.0;
    CHECK(w1 / (w1 + w2) == doctest::Approx(0.25));
    CHECK(w2 / (w1 + w2) == doctest::Approx(0.75));
    CHECK_THROWS_AS(wfq_weight(1, 0, 0, 0.0), std::invalid_argument);
}

TEST_CASE("solve_split examples") {
    CHECK(solve_split({10, 2}, {4, 4}) == std::vector<std::int64_t>{0, 8});
    CHECK(solve_split({5, 5, 5}, {2, 2, 2}) == std::vector<std::int64_t>{2, 2, 2});
    CHECK(solve_split({7}, {5}) == std::vector<std::int64_t>{5}); // single hop takes everything
}

TEST_CASE("solve_split equality constraint and oracle equivalence") {
    Rng rng(31, 4);
    for (int trial = 0; trial < 3000; ++trial) {
        const std::size_t n = 1 + rng.below(3);
        std::vector<std::int64_t> q(n), r(n);
        std::int64_t total = 0;
        for (std::size_t j = 0; j < n; ++j) {
            q[j] = static_cast<std::int64_t>(rng.below(9));
            r[j] = static_cast<std::int64_t>(rng.below(5));
            total += r[j];
        }
        if (total > 12) continue;
        const auto s = solve_split(q, r);
        std::int64_t sum = 0, lvl = q[0] - r[0] + s[0];
        for (std::size_t j = 0; j < n; ++j) {
            sum += s[j];
            lvl = std::min(lvl, q[j] - r[j] + s[j]);
        }
        REQUIRE(sum == total);
        REQUIRE(lvl == oracle::brute_force_split(q, r));
    }
}

TEST_CASE("brute_force_split examples and guard") {
    CHECK(oracle::brute_force_split({10, 2}, {4, 4}) == 6);
    CHECK(oracle::brute_force_split({5, 5}, {2, 2}) == 5);      // symmetric optimum at s=(2,2)
    CHECK(oracle::brute_force_split({9, 4}, {0, 0}) == 4);      // zero budget: min(q - r)
    CHECK_THROWS_AS(oracle::brute_force_split({1, 1}, {9, 9}), std::invalid_argument);
}

TEST_CASE("split_fractions") {
    CHECK(split_fractions({0, 8}) == std::vector<double>{0.0, 1.0});
    const auto thirds = split_fractions({3, 3, 3});
    for (double f : thirds) CHECK(f == doctest::Approx(1.0 / 3.0));
    const auto uniform = split_fractions({0, 0});
    CHECK(uniform == std::vector<double>{0.5, 0.5});
}

TEST_CASE("hash_route is deterministic and proportional") {
    // everything lands on the only open hop
    Rng rng(17, 6);
    for (int i = 0; i < 1000; ++i) {
        CHECK(hash_route(rng.next(), {0.0, 1.0}) == 1);
    }

    // an even split lands near 50/50 over many uniform hash fields
    int first = 0;
    const int n = 10000;
    Rng rng2(18, 6);
    for (int i = 0; i < n; ++i) {
        if (hash_route(rng2.next(), {0.5, 0.5}) == 0) ++first;
    }
    CHECK(static_cast<double>(first) / n == doctest::Approx(0.5).epsilon(0.04));

    // same fractions, same hash -> same hop
    Rng rng3(19, 6);
    for (int i = 0; i < 200; ++i) {
        const auto h = rng3.next();
        CHECK(hash_route(h, {0.3, 0.3, 0.4}) == hash_route(h, {0.3, 0.3, 0.4}));
    }
}

TEST_CASE("ecmp_route splits uniformly over survivors") {
    Rng rng(23, 8);
    int counts[2] = {0, 0};
    for (int i = 0; i < 10000; ++i) ++counts[ecmp_route(rng.next(), 2)];
    CHECK(static_cast<double>(counts[0]) / 10000.0 == doctest::Approx(0.5).epsilon(0.04));

    for (int i = 0; i < 100; ++i) CHECK(ecmp_route(rng.next(), 1) == 0);

    // removing a hop keeps the split equal over the rest
    int three[3] = {0, 0, 0};
    Rng rng2(29, 8);
    for (int i = 0; i < 30000; ++i) ++three[ecmp_route(rng2.next(), 3)];
    for (int j = 0; j < 3; ++j)
        CHECK(static_cast<double>(three[j]) / 30000.0 == doctest::Approx(1.0 / 3.0).epsilon(0.05));
}

TEST_CASE("split minimum never decreases across unit fills") {
    // re-run solve_split step by step and watch the min level
    const std::vector<std::int64_t> q{9, 1, 4}, r{3, 2, 4};
    std::vector<std::int64_t> s(3, 0);
    std::int64_t total = 9;
    auto min_level = [&]() {
        std::int64_t m = q[0] - r[0] + s[0];
        for (std::size_t j = 1; j < 3; ++j) m = std::min(m, q[j] - r[j] + s[j]);
        return m;
    };
    std::int64_t last = min_level();
    for (std::int64_t step = 0; step < total; ++step) {
        std::size_t lowest = 0;
        for (std::size_t j = 1; j < 3; ++j) {
            if (q[j] - r[j] + s[j] < q[lowest] - r[lowest] + s[lowest]) lowest = j;
        }
        ++s[lowest];
        CHECK(min_level() >= last);
        last = min_level();
    }
    CHECK(last == oracle::brute_force_split(q, r));
}
