#pragma once

#include <cstdint>
#include <vector>

#include "lbsim/topology.hpp"

namespace lbsim {

/// Sum of a switch's per-port backlogs for one commodity; stands in for
/// the common queue when only port queues exist.
std::int64_t approx_queue(const std::vector<std::int64_t>& port_backlogs);

/// Round-robin selector over a link's commodity set; one step per
/// transmitted packet.
class PiggybackRotor {
public:
    explicit PiggybackRotor(std::vector<CommodityId> commodities)
        : commodities_(std::move(commodities)) {}

    bool empty() const { return commodities_.empty(); }
    CommodityId next() {
        const CommodityId d = commodities_[pos_];
        pos_ = (pos_ + 1) % commodities_.size();
        return d;
    }

private:
    std::vector<CommodityId> commodities_;
    std::size_t pos_ = 0;
};

/// Exponential moving average of the approximated backlog; queue info
/// fields carry round_half_up(ema).
class QueueInfoEma {
public:
    explicit QueueInfoEma(double beta = 0.125) : beta_(beta) {}
    std::int64_t update(std::int64_t approx_backlog) {
        ema_ = (1.0 - beta_) * ema_ + beta_ * static_cast<double>(approx_backlog);
        return rounded();
    }
    std::int64_t rounded() const { return static_cast<std::int64_t>(ema_ + 0.5); }
    double raw() const { return ema_; }

private:
    double beta_;
    double ema_ = 0.0;
};

/// WFQ weight for one commodity on one port:
/// max(1, approx_local - remembered_next + measured_rate / alpha).
double wfq_weight(std::int64_t approx_local, std::int64_t remembered_next, std::int64_t measured_rate,
                  double alpha);

/// Integer max-min splitting of last interval's measured traffic across
/// next hops: unit-fills the current argmin of (q - r + s) until
/// sum(s) == sum(r); ties go to the lowest index.  The achieved minimum
/// never decreases across iterations.
std::vector<std::int64_t> solve_split(const std::vector<std::int64_t>& port_backlog,
                                      const std::vector<std::int64_t>& measured_rate);

/// s normalized to fractions; uniform when everything is zero.
std::vector<double> split_fractions(const std::vector<std::int64_t>& split);

/// Contiguous-range hash routing: the 64-bit hash space is divided into
/// ranges proportional to `fractions` in next-hop order; returns the
/// index owning `hash_field`.  Stable in (hash, fractions).
std::size_t hash_route(std::uint64_t hash_field, const std::vector<double>& fractions);

/// ECMP: hash routing with a uniform, run-constant split.
std::size_t ecmp_route(std::uint64_t hash_field, std::size_t n_hops);

} // namespace lbsim
