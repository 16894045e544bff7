#include "lbsim/oracle.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace lbsim {
namespace oracle {

OptimumResult brute_force_optimum(const LinkAllocState& state, const Rational& k) {
    const std::size_t n = state.entries.size();
    if (n > 5 || state.budget > 15)
        throw std::invalid_argument("brute_force_optimum: instance exceeds tractability guard");

    OptimumResult best;
    best.rates.assign(n, 0);
    std::vector<std::int64_t> cur(n, 0);
    bool have = false;

    // depth-first enumeration in lexicographic order; the first optimum
    // found is therefore the lexicographically smallest minimizer
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t idx, std::int64_t used) {
        if (idx == n) {
            if (!have || compare_objectives(state, cur, best.rates, k) < 0) {
                best.rates = cur;
                have = true;
            }
            return;
        }
        for (std::int64_t v = 0; used + v <= state.budget; ++v) {
            cur[idx] = v;
            rec(idx + 1, used + v);
        }
        cur[idx] = 0;
    };
    rec(0, 0);
    best.objective = allocation_objective(state, best.rates, k);
    return best;
}

std::int64_t brute_force_split(const std::vector<std::int64_t>& q, const std::vector<std::int64_t>& r) {
    if (q.size() != r.size() || q.empty())
        throw std::invalid_argument("brute_force_split: mismatched inputs");
    std::int64_t total = 0;
    for (auto x : r) total += x;
    if (q.size() > 3 || total > 12)
        throw std::invalid_argument("brute_force_split: instance exceeds tractability guard");

    const std::size_t n = q.size();
    std::vector<std::int64_t> s(n, 0);
    std::int64_t best = 0;
    bool have = false;

    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t idx, std::int64_t left) {
        if (idx + 1 == n) {
            s[idx] = left;
            std::int64_t lvl = q[0] - r[0] + s[0];
            for (std::size_t j = 1; j < n; ++j) lvl = std::min(lvl, q[j] - r[j] + s[j]);
            if (!have || lvl > best) {
                best = lvl;
                have = true;
            }
            return;
        }
        for (std::int64_t v = 0; v <= left; ++v) {
            s[idx] = v;
            rec(idx + 1, left - v);
        }
    };
    rec(0, total);
    return best;
}

} // namespace oracle
} // namespace lbsim
