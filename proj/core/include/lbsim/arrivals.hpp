#pragma once

#include <cstdint>
#include <vector>

#include "lbsim/rng.hpp"
#include "lbsim/topology.hpp"

namespace lbsim {

enum class ArrivalKind { Deterministic, UniformInt, BernoulliScaled };

/// One exogenous arrival process: i.i.d. integer packet counts per slot
/// for a (switch, commodity) pair.
struct ArrivalProcess {
    SwitchId sw = 0;
    CommodityId commodity = 0;
    ArrivalKind kind = ArrivalKind::Deterministic;
    std::int64_t value = 0; // Deterministic: constant; Bernoulli: burst size
    std::int64_t lo = 0, hi = 0;
    double prob = 0.0;

    double mean() const {
        switch (kind) {
        case ArrivalKind::Deterministic: return static_cast<double>(value);
        case ArrivalKind::UniformInt: return 0.5 * static_cast<double>(lo + hi);
        case ArrivalKind::BernoulliScaled: return prob * static_cast<double>(value);
        }
        return 0.0;
    }
    std::int64_t support_max() const {
        switch (kind) {
        case ArrivalKind::Deterministic: return value;
        case ArrivalKind::UniformInt: return hi;
        case ArrivalKind::BernoulliScaled: return value;
        }
        return 0;
    }
};

struct ArrivalSpec {
    std::vector<ArrivalProcess> processes;

    std::int64_t support_max() const {
        std::int64_t m = 0;
        for (const auto& p : processes) m = std::max(m, p.support_max());
        return m;
    }
};

/// Per-process sampler bound to its own substream.  `scale` in (0,1]
/// thins arrivals packet-wise (each packet kept with probability
/// `scale`), so scaled processes keep integer support within [0, delta].
class ArrivalSampler {
public:
    ArrivalSampler(const ArrivalSpec& spec, std::uint64_t master_seed, double scale);

    /// Samples every process for one slot; entries align with
    /// spec.processes order.
    const std::vector<std::int64_t>& sample_slot();

    const std::vector<ArrivalProcess>& processes() const { return processes_; }

private:
    std::vector<ArrivalProcess> processes_;
    std::vector<Rng> streams_;
    std::vector<std::int64_t> out_;
    double scale_;
};

} // namespace lbsim
