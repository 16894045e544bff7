#include "lbsim/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lbsim {

std::int64_t approx_queue(const std::vector<std::int64_t>& port_backlogs) {
    std::int64_t sum = 0;
    for (auto q : port_backlogs) sum += q;
    return sum;
}

double wfq_weight(std::int64_t approx_local, std::int64_t remembered_next, std::int64_t measured_rate,
                  double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("wfq_weight: alpha must be > 0");
    const double w = static_cast<double>(approx_local - remembered_next) +
                     static_cast<double>(measured_rate) / alpha;
    return std::max(1.0, w);
}

std::vector<std::int64_t> solve_split(const std::vector<std::int64_t>& port_backlog,
                                      const std::vector<std::int64_t>& measured_rate) {
    if (port_backlog.empty() || port_backlog.size() != measured_rate.size())
        throw std::invalid_argument("solve_split: mismatched inputs");
    const std::size_t n = port_backlog.size();
    std::int64_t total = 0;
    for (auto r : measured_rate) total += r;

    std::vector<std::int64_t> s(n, 0);
    std::vector<std::int64_t> level(n);
    for (std::size_t j = 0; j < n; ++j) level[j] = port_backlog[j] - measured_rate[j];

    // unit filling of the argmin level (ties to the lowest index); when
    // the argmin is unique the units up to the next distinct level are
    // assigned in bulk, which cannot change the outcome
    std::int64_t left = total;
    while (left > 0) {
        std::size_t lowest = 0;
        bool tied = false;
        for (std::size_t j = 1; j < n; ++j) {
            if (level[j] < level[lowest]) {
                lowest = j;
                tied = false;
            } else if (level[j] == level[lowest]) {
                tied = true;
            }
        }
        std::int64_t steps = 1;
        if (!tied) {
            std::int64_t second = 0;
            bool has_second = false;
            for (std::size_t j = 0; j < n; ++j) {
                if (level[j] > level[lowest] && (!has_second || level[j] < second)) {
                    second = level[j];
                    has_second = true;
                }
            }
            steps = has_second ? std::min(left, second - level[lowest]) : left;
        }
        s[lowest] += steps;
        level[lowest] += steps;
        left -= steps;
    }
    return s;
}

std::vector<double> split_fractions(const std::vector<std::int64_t>& split) {
    std::int64_t total = 0;
    for (auto v : split) total += v;
    std::vector<double> f(split.size(), 0.0);
    if (total <= 0) {
        const double uniform = 1.0 / static_cast<double>(split.size());
        std::fill(f.begin(), f.end(), uniform);
        return f;
    }
    for (std::size_t j = 0; j < split.size(); ++j)
        f[j] = static_cast<double>(split[j]) / static_cast<double>(total);
    return f;
}

std::size_t hash_route(std::uint64_t hash_field, const std::vector<double>& fractions) {
    if (fractions.empty()) throw std::invalid_argument("hash_route: no next hops");
    double cum = 0.0;
    for (std::size_t j = 0; j + 1 < fractions.size(); ++j) {
        cum += fractions[j];
        const double scaled = cum * 18446744073709551616.0; // 2^64
        const std::uint64_t boundary =
            scaled >= 18446744073709551615.0 ? ~std::uint64_t{0} : static_cast<std::uint64_t>(scaled);
        if (hash_field < boundary) return j;
    }
    return fractions.size() - 1;
}

std::size_t ecmp_route(std::uint64_t hash_field, std::size_t n_hops) {
    if (n_hops == 0) throw std::invalid_argument("ecmp_route: no next hops");
    const std::vector<double> uniform(n_hops, 1.0 / static_cast<double>(n_hops));
    return hash_route(hash_field, uniform);
}

} // namespace lbsim
