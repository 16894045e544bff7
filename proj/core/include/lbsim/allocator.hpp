#pragma once

#include <cstdint>
#include <vector>

#include "lbsim/rational.hpp"
#include "lbsim/topology.hpp"

namespace lbsim {

/// Snapshot of one link at a reconfiguration instant.  Entries are kept
/// sorted by commodity id so results never depend on insertion order.
struct LinkAllocState {
    struct Entry {
        CommodityId commodity = 0;
        std::int64_t q_local = 0;  // backlog at the sending switch
        std::int64_t q_next = 0;   // backlog at the next-hop switch
        std::int64_t prev = 0;     // rate granted to this commodity last interval
    };
    std::vector<Entry> entries;
    std::int64_t budget = 0; // T * c_ij, packets per interval
    double K = 1.0;          // fairness cap, >= 1

    void add(CommodityId d, std::int64_t q_local, std::int64_t q_next, std::int64_t prev);
    void normalize(); // sort by commodity id; rejects duplicates
};

/// Per-commodity transmission requests y = q_local - q_next + prev.
/// Negative values are legal and mean the commodity wants less than
/// before.
struct Request {
    std::vector<std::int64_t> y; // aligned with LinkAllocState::entries
};

/// Result of one rate allocation. `rates` aligns with the state's entries.
struct Allocation {
    std::vector<std::int64_t> rates;
    Rational k{1, 1};        // the fairness divisor actually used
    double k_used = 1.0;     // k as double; NaN when not applicable (MaxWeight)
    double objective = 0.0;  // quadratic-cost value of `rates`
    bool filled = false;     // true when the packet-filling branch ran

    std::int64_t total() const {
        std::int64_t s = 0;
        for (auto r : rates) s += r;
        return s;
    }
};

enum class FillMode { Unaccelerated, Accelerated };

Request compute_request(const LinkAllocState& state);

/// Clamp of (sum of positive requests) / budget into [1, K].
/// budget == 0 is a configuration error (a zero-capacity link must not
/// carry commodities) and throws.
Rational compute_k(const Request& req, std::int64_t budget, double K);

/// Per-commodity allocation cap: round_half_up([q_local - q_next + prev]_+ / k).
std::int64_t x_max(std::int64_t q_local, std::int64_t q_next, std::int64_t prev, const Rational& k);

/// Quadratic cost contribution of granting v units to one commodity:
/// v*(q_next - q_local) + (k/2)*(v - prev/k)^2.
double cost_g(std::int64_t v, std::int64_t q_local, std::int64_t q_next, std::int64_t prev, double k);

/// Unfulfilled level after v grants: q_local - q_next + prev - k*v.
double level_l(std::int64_t v, std::int64_t q_local, std::int64_t q_next, std::int64_t prev, double k);

/// Greedy unit filling of the whole budget, always serving the commodity
/// with the highest unfulfilled level (ties to the lowest id).  The
/// accelerated mode bulk-assigns units and is bit-identical to the loop.
Allocation packet_fill(const LinkAllocState& state, const Rational& k,
                       FillMode mode = FillMode::Accelerated);

/// The capacity-sharing rate allocation: requests scaled by k and rounded
/// when they fit the budget, packet filling otherwise.
Allocation allocate_rates(const LinkAllocState& state, FillMode mode = FillMode::Accelerated);

/// Baseline: full budget to the commodity with the maximum non-negative
/// differential backlog.  A zero-weight commodity is eligible only if it
/// has local backlog; ties go to the lowest id.  k is not applicable.
Allocation maxweight_allocate(const LinkAllocState& state);

/// floor(x + 0.5) for x >= 0.
std::int64_t round_half_up(double x);

/// Problem objective of an arbitrary feasible rate vector (test support).
double allocation_objective(const LinkAllocState& state, const std::vector<std::int64_t>& rates,
                            const Rational& k);

/// Exact scaled-integer objective comparison: returns -1/0/+1 for
/// obj(a) <=> obj(b) under rational k.  Falls back to double comparison
/// with 1e-9 tolerance if intermediates would overflow 128 bits.
int compare_objectives(const LinkAllocState& state, const std::vector<std::int64_t>& a,
                       const std::vector<std::int64_t>& b, const Rational& k);

} // namespace lbsim
