#include "lbsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lbsim {

int CompiledNetwork::switch_index(SwitchId id) const {
    auto it = std::lower_bound(switch_ids.begin(), switch_ids.end(), id);
    if (it == switch_ids.end() || *it != id) return -1;
    return static_cast<int>(it - switch_ids.begin());
}

int CompiledNetwork::commodity_index(CommodityId id) const {
    auto it = std::lower_bound(commodity_ids.begin(), commodity_ids.end(), id);
    if (it == commodity_ids.end() || *it != id) return -1;
    return static_cast<int>(it - commodity_ids.begin());
}

CompiledNetwork compile_network(const Topology& topo, std::int64_t arrival_support_max) {
    CompiledNetwork net;
    net.switch_ids.assign(topo.switches.begin(), topo.switches.end());
    net.commodity_ids.assign(topo.commodities.begin(), topo.commodities.end());
    net.n_switches = static_cast<int>(net.switch_ids.size());
    net.n_commodities = static_cast<int>(net.commodity_ids.size());
    net.delta = effective_delta(topo, arrival_support_max);
    net.dest_cap.assign(net.n_queues(), 0);
    net.out_links.assign(net.n_queues(), {});
    net.next_hops.assign(net.n_queues(), {});
    net.queue_active.assign(net.n_queues(), false);

    for (const auto& [key, cap] : topo.dest_capacity) {
        const int sw = net.switch_index(key.first);
        const int d = net.commodity_index(key.second);
        if (sw >= 0 && d >= 0) net.dest_cap[net.qid(sw, d)] = cap;
    }

    const DerivedSets derived = derive_sets(topo);
    std::map<LinkKey, int> link_index;
    for (const auto& [key, commodities] : derived.link_commodities) {
        CompiledNetwork::Link link;
        link.from = net.switch_index(key.first);
        link.to = net.switch_index(key.second);
        link.capacity = topo.capacity(key.first, key.second);
        for (CommodityId d : commodities) link.commodities.push_back(net.commodity_index(d));
        std::sort(link.commodities.begin(), link.commodities.end());
        link_index[key] = static_cast<int>(net.links.size());
        net.links.push_back(std::move(link));
    }

    for (const auto& [key, hops] : topo.next_hops) {
        const int sw = net.switch_index(key.first);
        const int d = net.commodity_index(key.second);
        if (sw < 0 || d < 0 || hops.empty()) continue;
        for (SwitchId j : hops) { // std::set iterates ascending: fixes the shortfall order
            net.out_links[net.qid(sw, d)].push_back(link_index.at({key.first, j}));
            net.next_hops[net.qid(sw, d)].push_back(net.switch_index(j));
        }
        net.queue_active[net.qid(sw, d)] = true;
    }
    // destination queues that can receive in-transit packets
    for (const auto& [key, hops] : derived.prev_hops) {
        const int sw = net.switch_index(key.first);
        const int d = net.commodity_index(key.second);
        if (sw < 0 || d < 0 || hops.empty()) continue;
        if (net.dest_cap[net.qid(sw, d)] > 0) net.queue_active[net.qid(sw, d)] = true;
    }
    return net;
}

namespace {

struct Engine {
    const ScenarioConfig& cfg;
    const RunOptions& opt;
    CompiledNetwork net;
    ArrivalSampler sampler;
    Rational k_cap;

    std::vector<std::int64_t> queues;                    // [qid]
    std::vector<std::vector<std::int64_t>> tokens;       // [link][slot in link.commodities]
    std::vector<std::vector<std::int64_t>> interval_alloc;
    std::vector<std::vector<std::int64_t>> prev_alloc;

    // per-slot scratch
    std::vector<std::vector<std::int64_t>> scheduled;
    std::vector<std::vector<std::int64_t>> actual;
    std::vector<std::int64_t> slot_arrivals, slot_transmit, slot_deliver, slot_depart;

    // interval accounting for the interval-level backlog inequality
    std::vector<std::int64_t> interval_start_backlog;
    std::vector<std::int64_t> interval_arrivals;

    // metrics accumulators; backlogs are summed per interval so the
    // averaging window can be chosen after the run
    std::vector<int> arrival_index; // process -> qid
    std::vector<std::vector<double>> backlog_interval_sum;
    std::vector<std::int64_t> total_backlog_series;
    std::int64_t k_saturated = 0, k_intervals = 0;
    double k_max = 0.0;
    std::int64_t total_arrivals = 0, total_departures = 0;
    std::int64_t violations = 0;
    std::vector<std::string> violation_samples;

    SlotTrace trace;
    std::vector<int> trace_queues; // qid list (active queues)

    Engine(const ScenarioConfig& c, const RunOptions& o)
        : cfg(c), opt(o), net(compile_network(c.topology, c.arrivals.support_max())),
          sampler(c.arrivals, c.seed, c.arrival_scale), k_cap(Rational::from_double(c.K)) {}

    void violation(const std::string& what) {
        ++violations;
        if (violation_samples.size() < 8) violation_samples.push_back(what);
    }

    void reconfigure(std::int64_t t) {
        for (std::size_t ln = 0; ln < net.links.size(); ++ln) {
            auto& link = net.links[ln];
            if (link.commodities.empty()) continue;
            LinkAllocState state;
            state.budget = cfg.T * link.capacity;
            state.K = cfg.K;
            for (std::size_t i = 0; i < link.commodities.size(); ++i) {
                const int d = link.commodities[i];
                state.add(net.commodity_ids[d], queues[net.qid(link.from, d)], queues[net.qid(link.to, d)],
                          interval_alloc[ln][i]);
            }
            state.normalize();

            Allocation alloc = cfg.algorithm == Algorithm::MaxWeight ? maxweight_allocate(state)
                                                                     : allocate_rates(state);
            if (cfg.algorithm == Algorithm::Algorithm1) {
                ++k_intervals;
                if (alloc.k == k_cap) ++k_saturated;
                k_max = std::max(k_max, alloc.k_used);
                if (opt.check_invariants) {
                    if (alloc.k_used < 1.0 || alloc.k_used > cfg.K)
                        violation("k outside [1,K] at t=" + std::to_string(t));
                    std::int64_t sum = 0;
                    for (std::size_t n = 0; n < state.entries.size(); ++n) {
                        const auto& e = state.entries[n];
                        if (alloc.rates[n] > x_max(e.q_local, e.q_next, e.prev, alloc.k))
                            violation("rate above x_max at t=" + std::to_string(t));
                        sum += alloc.rates[n];
                    }
                    if (sum > state.budget) violation("allocation above budget at t=" + std::to_string(t));
                }
            }
            prev_alloc[ln] = interval_alloc[ln];
            interval_alloc[ln] = alloc.rates;
            tokens[ln] = alloc.rates;
        }
        if (opt.check_invariants) {
            std::copy(queues.begin(), queues.end(), interval_start_backlog.begin());
            std::fill(interval_arrivals.begin(), interval_arrivals.end(), 0);
        }
    }

    // Per-slot data-plane decisions for one link.  Three passes:
    //   1. paced base: greedy on the deficit tokens - m*s, capped by
    //      available work (min of tokens and visible backlog),
    //   2. leftover capacity front-loaded toward the largest remaining
    //      available work, so standing bursts drain at full line rate,
    //   3. forced spending that keeps sum(tokens - s) <= (m-1)*c, so the
    //      decisions over an interval sum to exactly the allocation.
    // Passes 1 and 2 never schedule beyond backlog; pass 3 may (the
    // actual transmission stays capped by backlog downstream).
    void schedule_link(std::size_t ln, std::int64_t m) {
        const auto& link = net.links[ln];
        auto& s = scheduled[ln];
        std::fill(s.begin(), s.end(), 0);
        const std::size_t n = link.commodities.size();
        if (n == 0 || link.capacity <= 0) return;

        std::int64_t used = 0;
        for (; used < link.capacity; ++used) {
            std::size_t best = n;
            std::int64_t best_deficit = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::int64_t avail =
                    std::min(tokens[ln][i], queues[net.qid(link.from, link.commodities[i])]);
                if (s[i] >= avail) continue;
                const std::int64_t deficit = tokens[ln][i] - m * s[i];
                if (deficit > best_deficit) {
                    best = i;
                    best_deficit = deficit;
                }
            }
            if (best == n) break;
            ++s[best];
        }
        for (; used < link.capacity; ++used) {
            std::size_t best = n;
            std::int64_t best_gap = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::int64_t avail =
                    std::min(tokens[ln][i], queues[net.qid(link.from, link.commodities[i])]);
                const std::int64_t gap = avail - s[i];
                if (gap > best_gap) {
                    best = i;
                    best_gap = gap;
                }
            }
            if (best == n) break;
            ++s[best];
        }
        std::int64_t remaining = 0;
        for (std::size_t i = 0; i < n; ++i) remaining += tokens[ln][i] - s[i];
        while (remaining > (m - 1) * link.capacity && used < link.capacity) {
            std::size_t best = n;
            std::int64_t best_left = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::int64_t left = tokens[ln][i] - s[i];
                if (left > best_left) {
                    best = i;
                    best_left = left;
                }
            }
            if (best == n) break;
            ++s[best];
            ++used;
            --remaining;
        }
    }

    void step_slot(std::int64_t t) {
        const std::int64_t m = cfg.T - (t % cfg.T);
        for (std::size_t ln = 0; ln < net.links.size(); ++ln) schedule_link(ln, m);

        std::fill(slot_transmit.begin(), slot_transmit.end(), 0);
        std::fill(slot_deliver.begin(), slot_deliver.end(), 0);
        std::fill(slot_depart.begin(), slot_depart.end(), 0);
        std::fill(slot_arrivals.begin(), slot_arrivals.end(), 0);

        // serve: walk each queue's outgoing links in ascending next-hop id
        // order so shortfalls resolve deterministically.  Tokens are spent
        // by the scheduled decision; transmissions are capped by backlog.
        for (int sw = 0; sw < net.n_switches; ++sw) {
            for (int d = 0; d < net.n_commodities; ++d) {
                const int q = net.qid(sw, d);
                for (int ln : net.out_links[q]) {
                    const auto& link = net.links[ln];
                    const auto pos = std::lower_bound(link.commodities.begin(), link.commodities.end(), d) -
                                     link.commodities.begin();
                    const std::int64_t want = scheduled[ln][pos];
                    const std::int64_t give = std::min(want, queues[q]);
                    actual[ln][pos] = give;
                    queues[q] -= give;
                    tokens[ln][pos] -= want;
                    slot_transmit[q] += give;
                    if (opt.check_invariants && tokens[ln][pos] < 0)
                        violation("token bucket overdrawn at t=" + std::to_string(t));
                }
            }
        }
        if (opt.check_invariants) {
            for (std::size_t ln = 0; ln < net.links.size(); ++ln) {
                const std::int64_t sum = std::accumulate(actual[ln].begin(), actual[ln].end(), std::int64_t{0});
                if (sum > net.links[ln].capacity)
                    violation("per-slot link capacity exceeded at t=" + std::to_string(t));
            }
        }

        // destination departures, only from what was present before this
        // slot's deliveries
        for (std::size_t q = 0; q < net.n_queues(); ++q) {
            if (net.dest_cap[q] > 0 && queues[q] > 0) {
                const std::int64_t dep = std::min<std::int64_t>(net.dest_cap[q], queues[q]);
                queues[q] -= dep;
                slot_depart[q] = dep;
                total_departures += dep;
            }
        }

        // deliver to next-hop queues
        for (std::size_t ln = 0; ln < net.links.size(); ++ln) {
            const auto& link = net.links[ln];
            for (std::size_t i = 0; i < link.commodities.size(); ++i) {
                if (actual[ln][i] > 0) {
                    const int q = net.qid(link.to, link.commodities[i]);
                    queues[q] += actual[ln][i];
                    slot_deliver[q] += actual[ln][i];
                }
            }
        }

        // exogenous arrivals
        const auto& samples = sampler.sample_slot();
        for (std::size_t p = 0; p < samples.size(); ++p) {
            const int q = static_cast<int>(arrival_index[p]);
            queues[q] += samples[p];
            slot_arrivals[q] += samples[p];
            total_arrivals += samples[p];
            if (opt.check_invariants) interval_arrivals[q] += samples[p];
        }

        if (opt.check_invariants) check_slot(t);
        record(t);
    }

    void check_slot(std::int64_t t) {
        // per-slot growth bound delta*(|S|+1)
        const std::int64_t bound = net.delta * (net.n_switches + 1);
        for (std::size_t q = 0; q < net.n_queues(); ++q) {
            const std::int64_t growth = slot_arrivals[q] + slot_deliver[q] - slot_transmit[q] - slot_depart[q];
            if (growth > bound) violation("growth bound exceeded at t=" + std::to_string(t));
            if (queues[q] < 0) violation("negative backlog at t=" + std::to_string(t));
        }
        // conservation: everything that entered is either gone or queued
        const std::int64_t backlog = std::accumulate(queues.begin(), queues.end(), std::int64_t{0});
        if (total_arrivals != total_departures + backlog)
            violation("conservation broken at t=" + std::to_string(t));
        // interval-level backlog inequality at interval ends
        if ((t + 1) % cfg.T == 0) check_interval(t);
    }

    void check_interval(std::int64_t t) {
        // Q(t0+T) <= [Q(t0) - sum_out x - T b]_+ + sum_in x + interval arrivals
        std::vector<std::int64_t> in(net.n_queues(), 0), out(net.n_queues(), 0);
        for (std::size_t ln = 0; ln < net.links.size(); ++ln) {
            const auto& link = net.links[ln];
            for (std::size_t i = 0; i < link.commodities.size(); ++i) {
                out[net.qid(link.from, link.commodities[i])] += interval_alloc[ln][i];
                in[net.qid(link.to, link.commodities[i])] += interval_alloc[ln][i];
            }
        }
        for (std::size_t q = 0; q < net.n_queues(); ++q) {
            const std::int64_t lhs = queues[q];
            const std::int64_t drained = interval_start_backlog[q] - out[q] - cfg.T * net.dest_cap[q];
            const std::int64_t rhs = std::max<std::int64_t>(0, drained) + in[q] + interval_arrivals[q];
            if (lhs > rhs) {
                violation("interval backlog inequality broken at t=" + std::to_string(t) + " queue (" +
                          std::to_string(net.switch_ids[q / net.n_commodities]) + "," +
                          std::to_string(net.commodity_ids[q % net.n_commodities]) + ") lhs=" +
                          std::to_string(lhs) + " q0=" + std::to_string(interval_start_backlog[q]) + " out=" +
                          std::to_string(out[q]) + " in=" + std::to_string(in[q]) + " arr=" +
                          std::to_string(interval_arrivals[q]));
            }
        }
    }

    void record(std::int64_t t) {
        const std::int64_t backlog = std::accumulate(queues.begin(), queues.end(), std::int64_t{0});
        total_backlog_series.push_back(backlog);
        auto& bucket = backlog_interval_sum[static_cast<std::size_t>(t / cfg.T)];
        for (std::size_t q = 0; q < net.n_queues(); ++q) bucket[q] += static_cast<double>(queues[q]);
        const bool keep = cfg.trace == TraceMode::Full ||
                          (cfg.trace == TraceMode::Decimated && t % cfg.trace_decimation == 0);
        if (keep) {
            SlotRecord rec;
            rec.slot = t;
            rec.backlog.reserve(trace_queues.size());
            for (int q : trace_queues) {
                rec.backlog.push_back(queues[q]);
                rec.arrivals.push_back(slot_arrivals[q]);
                rec.transmit.push_back(slot_transmit[q]);
                rec.deliver.push_back(slot_deliver[q]);
                rec.depart.push_back(slot_depart[q]);
            }
            trace.records.push_back(std::move(rec));
        }
    }

    RunResult run() {
        const std::size_t nq = net.n_queues();
        queues.assign(nq, 0);
        backlog_interval_sum.assign(static_cast<std::size_t>(cfg.horizon / cfg.T) + 1,
                                    std::vector<double>(nq, 0.0));
        slot_arrivals.assign(nq, 0);
        slot_transmit.assign(nq, 0);
        slot_deliver.assign(nq, 0);
        slot_depart.assign(nq, 0);
        interval_start_backlog.assign(nq, 0);
        interval_arrivals.assign(nq, 0);
        tokens.resize(net.links.size());
        interval_alloc.resize(net.links.size());
        prev_alloc.resize(net.links.size());
        scheduled.resize(net.links.size());
        actual.resize(net.links.size());
        for (std::size_t ln = 0; ln < net.links.size(); ++ln) {
            const auto n = net.links[ln].commodities.size();
            tokens[ln].assign(n, 0);
            interval_alloc[ln].assign(n, 0); // x(-T, T) = 0
            prev_alloc[ln].assign(n, 0);
            scheduled[ln].assign(n, 0);
            actual[ln].assign(n, 0);
        }
        for (const auto& p : cfg.arrivals.processes) {
            const int sw = net.switch_index(p.sw);
            const int d = net.commodity_index(p.commodity);
            if (sw < 0 || d < 0) throw std::invalid_argument("arrival process references unknown switch/commodity");
            arrival_index.push_back(net.qid(sw, d));
            net.queue_active[net.qid(sw, d)] = true;
        }

        for (std::size_t q = 0; q < nq; ++q) {
            if (net.queue_active[q]) trace_queues.push_back(static_cast<int>(q));
        }
        for (int q : trace_queues) {
            trace.queue_keys.emplace_back(net.switch_ids[q / net.n_commodities],
                                          net.commodity_ids[q % net.n_commodities]);
        }
        trace.decimation = cfg.trace == TraceMode::Full ? 1 : cfg.trace_decimation;

        for (std::int64_t t = 0; t < cfg.horizon; ++t) {
            if (t % cfg.T == 0) reconfigure(t);
            step_slot(t);
        }
        return finish();
    }

    RunResult finish() {
        MetricsReport m;
        m.scenario = cfg.name;
        m.algorithm = algorithm_name(cfg.algorithm);
        m.seed = cfg.seed;
        m.config_digest = cfg.digest;
        m.T = cfg.T;
        m.horizon = cfg.horizon;

        std::int64_t t0 = static_cast<std::int64_t>(static_cast<double>(cfg.horizon) * cfg.discard_fraction);
        if (cfg.convergence_window) t0 = std::max(t0, convergence_slot(total_backlog_series));
        std::int64_t first_interval = (t0 + cfg.T - 1) / cfg.T; // window is interval-aligned
        const std::int64_t n_intervals = cfg.horizon / cfg.T;
        if (first_interval >= n_intervals) first_interval = std::max<std::int64_t>(0, n_intervals - 1);
        m.window_start = first_interval * cfg.T;
        const double denom = static_cast<double>(cfg.horizon - m.window_start);

        double sum_avgs = 0.0;
        int active = 0;
        for (int q : trace_queues) {
            QueueAverage qa;
            qa.sw = net.switch_ids[q / net.n_commodities];
            qa.commodity = net.commodity_ids[q % net.n_commodities];
            double sum = 0.0;
            for (std::int64_t iv = first_interval; iv < n_intervals; ++iv)
                sum += backlog_interval_sum[static_cast<std::size_t>(iv)][q];
            qa.avg_backlog = denom > 0 ? sum / denom : 0.0;
            m.per_queue.push_back(qa);
            sum_avgs += qa.avg_backlog;
            ++active;
        }
        m.network_avg_backlog = active > 0 ? sum_avgs / active : 0.0;
        m.k_saturation = k_intervals > 0 ? static_cast<double>(k_saturated) / static_cast<double>(k_intervals) : 0.0;
        m.k_intervals = k_intervals;
        m.k_max = k_max;
        m.convergence_slot = cfg.horizon > 0 ? convergence_slot(total_backlog_series) : 0;
        m.total_arrivals = total_arrivals;
        m.total_departures = total_departures;
        m.final_backlog = std::accumulate(queues.begin(), queues.end(), std::int64_t{0});
        m.invariant_violations = violations;
        m.violation_samples = violation_samples;
        return RunResult{std::move(m), std::move(trace)};
    }
};

} // namespace

RunResult run_ideal(const ScenarioConfig& config, const RunOptions& options) {
    if (config.algorithm != Algorithm::Algorithm1 && config.algorithm != Algorithm::MaxWeight)
        throw std::invalid_argument("run_ideal: algorithm must be algorithm1 or maxweight");
    Engine engine(config, options);
    return engine.run();
}

std::vector<QueueAverage> collect_metrics(const SlotTrace& trace, std::int64_t window_start,
                                          std::int64_t window_end) {
    if (window_end <= window_start) throw std::invalid_argument("collect_metrics: empty window");
    std::vector<double> sums(trace.queue_keys.size(), 0.0);
    std::int64_t rows = 0;
    for (const auto& rec : trace.records) {
        if (rec.slot < window_start || rec.slot >= window_end) continue;
        ++rows;
        for (std::size_t q = 0; q < sums.size(); ++q) sums[q] += static_cast<double>(rec.backlog[q]);
    }
    std::vector<QueueAverage> out;
    for (std::size_t q = 0; q < sums.size(); ++q) {
        out.push_back({trace.queue_keys[q].first, trace.queue_keys[q].second,
                       rows > 0 ? sums[q] / static_cast<double>(rows) : 0.0});
    }
    return out;
}

std::int64_t convergence_slot(const std::vector<std::int64_t>& series) {
    const std::int64_t n = static_cast<std::int64_t>(series.size());
    if (n == 0) return 0;
    const std::int64_t w = std::max<std::int64_t>(1, n / 20);
    std::vector<double> prefix(n + 1, 0.0);
    for (std::int64_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + static_cast<double>(series[i]);
    for (std::int64_t s = 2 * w; s <= n; ++s) {
        const double m1 = (prefix[s - w] - prefix[s - 2 * w]) / static_cast<double>(w);
        const double m2 = (prefix[s] - prefix[s - w]) / static_cast<double>(w);
        if (std::abs(m2 - m1) < 0.01 * std::max(1.0, m1)) return s;
    }
    return n;
}

} // namespace lbsim
