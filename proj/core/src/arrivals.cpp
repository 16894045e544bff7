#include "lbsim/arrivals.hpp"

namespace lbsim {

namespace {
constexpr std::uint64_t kArrivalStreamTag = 0xa1a1a1a1ULL;
}

ArrivalSampler::ArrivalSampler(const ArrivalSpec& spec, std::uint64_t master_seed, double scale)
    : processes_(spec.processes), scale_(scale) {
    streams_.reserve(processes_.size());
    for (const auto& p : processes_) {
        streams_.emplace_back(master_seed, stream_id(kArrivalStreamTag, p.sw, p.commodity));
    }
    out_.resize(processes_.size(), 0);
}

const std::vector<std::int64_t>& ArrivalSampler::sample_slot() {
    for (std::size_t n = 0; n < processes_.size(); ++n) {
        const auto& p = processes_[n];
        auto& rng = streams_[n];
        std::int64_t a = 0;
        switch (p.kind) {
        case ArrivalKind::Deterministic:
            a = p.value;
            break;
        case ArrivalKind::UniformInt:
            a = rng.range(p.lo, p.hi);
            break;
        case ArrivalKind::BernoulliScaled:
            a = rng.chance(p.prob) ? p.value : 0;
            break;
        }
        if (scale_ < 1.0 && a > 0) {
            std::int64_t kept = 0;
            for (std::int64_t i = 0; i < a; ++i) {
                if (rng.chance(scale_)) ++kept;
            }
            a = kept;
        }
        out_[n] = a;
    }
    return out_;
}

} // namespace lbsim
