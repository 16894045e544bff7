#include "lbsim/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace lbsim {

void LinkAllocState::add(CommodityId d, std::int64_t q_local, std::int64_t q_next, std::int64_t prev) {
    entries.push_back({d, q_local, q_next, prev});
}

void LinkAllocState::normalize() {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.commodity < b.commodity; });
    for (std::size_t n = 1; n < entries.size(); ++n) {
        if (entries[n].commodity == entries[n - 1].commodity)
            throw std::invalid_argument("LinkAllocState: duplicate commodity");
    }
    for (const auto& e : entries) {
        if (e.q_local < 0 || e.q_next < 0 || e.prev < 0)
            throw std::invalid_argument("LinkAllocState: negative field");
    }
}

Request compute_request(const LinkAllocState& state) {
    Request req;
    req.y.reserve(state.entries.size());
    for (const auto& e : state.entries) req.y.push_back(e.q_local - e.q_next + e.prev);
    return req;
}

Rational compute_k(const Request& req, std::int64_t budget, double K) {
    if (budget <= 0)
        throw std::invalid_argument("compute_k: zero-capacity link must carry no commodities");
    std::int64_t sum_pos = 0;
    for (auto y : req.y) sum_pos += std::max<std::int64_t>(0, y);
    if (sum_pos <= budget) return Rational{1, 1};
    const Rational k{sum_pos, budget};
    const Rational cap = Rational::from_double(K);
    return k >= cap ? cap : k;
}

std::int64_t x_max(std::int64_t q_local, std::int64_t q_next, std::int64_t prev, const Rational& k) {
    const std::int64_t y = std::max<std::int64_t>(0, q_local - q_next + prev);
    return div_round_half_up(static_cast<__int128>(y) * k.den, k.num);
}

std::int64_t round_half_up(double x) {
    return static_cast<std::int64_t>(std::floor(x + 0.5));
}

double cost_g(std::int64_t v, std::int64_t q_local, std::int64_t q_next, std::int64_t prev, double k) {
    const double diff = static_cast<double>(v) - static_cast<double>(prev) / k;
    return static_cast<double>(v) * static_cast<double>(q_next - q_local) + 0.5 * k * diff * diff;
}

double level_l(std::int64_t v, std::int64_t q_local, std::int64_t q_next, std::int64_t prev, double k) {
    return static_cast<double>(q_local - q_next + prev) - k * static_cast<double>(v);
}

double allocation_objective(const LinkAllocState& state, const std::vector<std::int64_t>& rates,
                            const Rational& k) {
    double obj = 0.0;
    const double kd = k.to_double();
    for (std::size_t n = 0; n < state.entries.size(); ++n) {
        const auto& e = state.entries[n];
        obj += cost_g(rates[n], e.q_local, e.q_next, e.prev, kd);
    }
    return obj;
}

namespace {

// Greedy fill semantics: each unit goes to the commodity whose current
// unfulfilled level (y - k*v) is largest, first-in-order on ties.  Levels
// are compared by their exact integer numerators over the common
// denominator k.den.
struct Filler {
    const std::vector<std::int64_t>& y;
    const Rational& k;

    __int128 level_num(std::size_t n, std::int64_t v) const {
        return static_cast<__int128>(y[n]) * k.den - static_cast<__int128>(v) * k.num;
    }
};

std::vector<std::int64_t> fill_unaccelerated(const std::vector<std::int64_t>& y, const Rational& k,
                                             std::int64_t budget) {
    std::vector<std::int64_t> v(y.size(), 0);
    if (y.empty()) return v;
    Filler f{y, k};
    for (std::int64_t step = 0; step < budget; ++step) {
        std::size_t best = 0;
        __int128 best_level = f.level_num(0, v[0]);
        for (std::size_t n = 1; n < y.size(); ++n) {
            const __int128 lvl = f.level_num(n, v[n]);
            if (lvl > best_level) {
                best = n;
                best_level = lvl;
            }
        }
        ++v[best];
    }
    return v;
}

// Bulk-assigns the `budget` highest unit levels.  Unit levels of one
// commodity form the arithmetic progression y*den - v*num, so counting
// units above a threshold is closed-form and the cut level can be binary
// searched.  Output is identical to the unit loop, including id-order
// assignment of the units tied at the cut.
std::vector<std::int64_t> fill_accelerated(const std::vector<std::int64_t>& y, const Rational& k,
                                           std::int64_t budget) {
    const std::size_t n = y.size();
    std::vector<std::int64_t> v(n, 0);
    if (budget <= 0 || n == 0) return v;
    Filler f{y, k};

    const auto count_at_least = [&](__int128 theta) {
        __int128 cnt = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const __int128 top = static_cast<__int128>(y[i]) * k.den;
            if (top >= theta) cnt += (top - theta) / k.num + 1;
        }
        return cnt;
    };

    __int128 hi = f.level_num(0, 0);
    __int128 lo = hi;
    for (std::size_t i = 0; i < n; ++i) {
        hi = std::max(hi, f.level_num(i, 0));
        lo = std::min(lo, f.level_num(i, 0));
    }
    lo -= (static_cast<__int128>(budget) + 1) * k.num;

    // largest theta with count_at_least(theta) >= budget
    while (lo < hi) {
        const __int128 mid = lo + (hi - lo + 1) / 2;
        if (count_at_least(mid) >= budget)
            lo = mid;
        else
            hi = mid - 1;
    }
    const __int128 cut = lo;

    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const __int128 top = static_cast<__int128>(y[i]) * k.den;
        if (top > cut) {
            v[i] = static_cast<std::int64_t>((top - cut - 1) / k.num + 1); // strictly above cut
            assigned += v[i];
        }
    }
    std::int64_t remainder = budget - assigned;
    for (std::size_t i = 0; i < n && remainder > 0; ++i) {
        const __int128 top = static_cast<__int128>(y[i]) * k.den;
        if (top >= cut && (top - cut) % k.num == 0) {
            ++v[i];
            --remainder;
        }
    }
    if (remainder != 0) throw std::logic_error("packet_fill: bulk assignment mismatch");
    return v;
}

} // namespace

Allocation packet_fill(const LinkAllocState& state, const Rational& k, FillMode mode) {
    Allocation out;
    Request req = compute_request(state);
    out.rates = mode == FillMode::Unaccelerated ? fill_unaccelerated(req.y, k, state.budget)
                                                : fill_accelerated(req.y, k, state.budget);
    out.k = k;
    out.k_used = k.to_double();
    out.filled = true;
    out.objective = allocation_objective(state, out.rates, k);
    return out;
}

Allocation allocate_rates(const LinkAllocState& state, FillMode mode) {
    Allocation out;
    if (state.entries.empty()) return out;
    Request req = compute_request(state);
    const Rational k = compute_k(req, state.budget, state.K);

    std::int64_t total = 0;
    std::vector<std::int64_t> rounds(state.entries.size(), 0);
    for (std::size_t n = 0; n < state.entries.size(); ++n) {
        const std::int64_t y = std::max<std::int64_t>(0, req.y[n]);
        rounds[n] = div_round_half_up(static_cast<__int128>(y) * k.den, k.num);
        total += rounds[n];
    }
    if (total <= state.budget) {
        out.rates = std::move(rounds);
        out.k = k;
        out.k_used = k.to_double();
        out.objective = allocation_objective(state, out.rates, k);
        return out;
    }
    return packet_fill(state, k, mode);
}

Allocation maxweight_allocate(const LinkAllocState& state) {
    Allocation out;
    out.rates.assign(state.entries.size(), 0);
    out.k_used = std::numeric_limits<double>::quiet_NaN();
    out.objective = std::numeric_limits<double>::quiet_NaN();

    bool found = false;
    std::size_t best = 0;
    std::int64_t best_w = 0;
    for (std::size_t n = 0; n < state.entries.size(); ++n) {
        const auto& e = state.entries[n];
        const std::int64_t w = e.q_local - e.q_next;
        const bool eligible = w > 0 || (w == 0 && e.q_local > 0);
        if (!eligible) continue;
        if (!found || w > best_w) {
            found = true;
            best = n;
            best_w = w;
        }
    }
    if (found) out.rates[best] = state.budget;
    return out;
}

int compare_objectives(const LinkAllocState& state, const std::vector<std::int64_t>& a,
                       const std::vector<std::int64_t>& b, const Rational& k) {
    // scaled objective: 2*num*den*delta*v + (v*num - prev*den)^2, summed
    const std::int64_t limit = std::int64_t{1} << 31;
    bool exact = k.num < limit && k.den < limit;
    for (const auto& e : state.entries) {
        if (std::abs(e.q_local - e.q_next) >= limit || e.prev >= limit) exact = false;
    }
    for (std::size_t n = 0; n < a.size() && exact; ++n) {
        if (a[n] >= limit || b[n] >= limit) exact = false;
    }
    if (exact) {
        __int128 ga = 0, gb = 0;
        for (std::size_t n = 0; n < state.entries.size(); ++n) {
            const auto& e = state.entries[n];
            const __int128 delta = e.q_next - e.q_local;
            const __int128 da = static_cast<__int128>(a[n]) * k.num - static_cast<__int128>(e.prev) * k.den;
            const __int128 db = static_cast<__int128>(b[n]) * k.num - static_cast<__int128>(e.prev) * k.den;
            ga += 2 * static_cast<__int128>(k.num) * k.den * delta * a[n] + da * da;
            gb += 2 * static_cast<__int128>(k.num) * k.den * delta * b[n] + db * db;
        }
        if (ga < gb) return -1;
        if (ga > gb) return 1;
        return 0;
    }
    const double oa = allocation_objective(state, a, k);
    const double ob = allocation_objective(state, b, k);
    const double tol = 1e-9 * std::max({1.0, std::abs(oa), std::abs(ob)});
    if (oa < ob - tol) return -1;
    if (oa > ob + tol) return 1;
    return 0;
}

} // namespace lbsim
