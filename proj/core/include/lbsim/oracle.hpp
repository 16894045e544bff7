#pragma once

#include <cstdint>
#include <vector>

#include "lbsim/allocator.hpp"

namespace lbsim {
namespace oracle {

/// Exhaustive minimizer of the quadratic allocation cost over all integer
/// rate vectors with sum <= budget and 0 <= rate <= budget.  Reference
/// implementation for small instances only; enforces |commodities| <= 5
/// and budget <= 15.  Ties resolve to the lexicographically smallest
/// rates vector.
struct OptimumResult {
    double objective = 0.0;
    std::vector<std::int64_t> rates;
};

OptimumResult brute_force_optimum(const LinkAllocState& state, const Rational& k);

/// Exhaustive max-min split oracle: over all non-negative integer vectors
/// s with sum(s) == sum(r), maximize min_j(q[j] - r[j] + s[j]).  Guarded
/// to <= 3 next hops and sum(r) <= 12.
std::int64_t brute_force_split(const std::vector<std::int64_t>& q, const std::vector<std::int64_t>& r);

} // namespace oracle
} // namespace lbsim
