#include "lbsim/flowsim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "lbsim/heuristic.hpp"
#include "lbsim/rng.hpp"
#include "lbsim/sim.hpp"

namespace lbsim {

namespace {

constexpr std::uint64_t kFlowStartTag = 0xf10f10ULL;
constexpr std::uint64_t kFlowHashTag = 0xf10f11ULL;

struct Pkt {
    int flow = 0;
    std::uint64_t path = 0;
};

struct FlowState {
    FlowRecord rec;
    std::int64_t outstanding = 0;
    bool epoch_open = false;
    bool epoch_dropped = false;
    std::map<std::pair<SwitchId, SwitchId>, std::int64_t> hop_counts; // branch decisions
};

struct FlowEngine {
    const ScenarioConfig& cfg;
    CompiledNetwork net;
    bool heuristic;

    struct PortQueue {
        std::deque<Pkt> pkts;
    };

    struct Link {
        int index = 0;
        std::int64_t capacity = 0;
        bool alive = true;
        int reverse = -1; // index of the (to, from) link, -1 if none
        std::vector<PortQueue> queues; // one per commodity (heuristic) or a single shared FIFO (ecmp)
        std::vector<double> weight;    // DRR weights per commodity
        std::vector<double> deficit;
        std::size_t rr = 0;            // DRR rotation cursor
        std::vector<std::int64_t> r_cur, r_prev; // measured packets per commodity
        std::vector<std::int64_t> memory;        // M: queue info learned from the next hop
        PiggybackRotor rotor{std::vector<CommodityId>{}};
    };
    std::vector<Link> links;

    std::vector<QueueInfoEma> ema;               // [sw*nd+d]
    std::vector<std::vector<int>> alive_hops;    // [sw*nd+d] -> dense next-hop switch indices
    std::vector<std::vector<int>> alive_links;   // [sw*nd+d] -> link index per alive hop
    std::vector<std::vector<double>> fractions;  // [sw*nd+d]
    std::vector<FlowState> flows;

    std::int64_t remap_events = 0;
    std::int64_t drops_total = 0;
    std::map<std::pair<SwitchId, SwitchId>, std::int64_t> packets_per_hop;

    explicit FlowEngine(const ScenarioConfig& c)
        : cfg(c), net(compile_network(c.topology, 0)), heuristic(c.algorithm == Algorithm::Heuristic) {}

    std::int64_t commodity_cap() const { return cfg.queue_capacity; }

    int link_pos(const Link& l, int d) const {
        const auto& cs = net.links[l.index].commodities;
        return static_cast<int>(std::lower_bound(cs.begin(), cs.end(), d) - cs.begin());
    }

    void build() {
        links.resize(net.links.size());
        std::map<std::pair<int, int>, int> by_pair;
        for (std::size_t ln = 0; ln < net.links.size(); ++ln)
            by_pair[{net.links[ln].from, net.links[ln].to}] = static_cast<int>(ln);
        for (std::size_t ln = 0; ln < net.links.size(); ++ln) {
            Link& l = links[ln];
            l.index = static_cast<int>(ln);
            l.capacity = net.links[ln].capacity;
            const auto rev = by_pair.find({net.links[ln].to, net.links[ln].from});
            l.reverse = rev == by_pair.end() ? -1 : rev->second;
            const std::size_t nc = net.links[ln].commodities.size();
            l.queues.resize(heuristic ? nc : 1);
            l.weight.assign(nc, 1.0);
            l.deficit.assign(nc, 0.0);
            l.r_cur.assign(nc, 0);
            l.r_prev.assign(nc, 0);
            l.memory.assign(nc, 0);
            if (l.reverse >= 0) {
                std::vector<CommodityId> reverse_set;
                for (int d : net.links[l.reverse].commodities) reverse_set.push_back(net.commodity_ids[d]);
                l.rotor = PiggybackRotor(std::move(reverse_set));
            }
        }
        ema.assign(net.n_queues(), QueueInfoEma());
        alive_hops.assign(net.n_queues(), {});
        alive_links.assign(net.n_queues(), {});
        fractions.assign(net.n_queues(), {});
        for (std::size_t q = 0; q < net.n_queues(); ++q) rebuild_routing(static_cast<int>(q));

        Rng start_rng(cfg.seed, stream_id(kFlowStartTag, 0, 0));
        Rng hash_rng(cfg.seed, stream_id(kFlowHashTag, 0, 0));
        int id = 0;
        for (const auto& g : cfg.flows.groups) {
            for (int n = 0; n < g.count; ++n) {
                FlowState f;
                f.rec.id = id++;
                f.rec.source = g.source;
                f.rec.commodity = g.commodity;
                f.rec.size = cfg.flows.flow_size;
                f.rec.start_slot =
                    cfg.flows.start_lo + static_cast<std::int64_t>(start_rng.below(
                                             static_cast<std::uint64_t>(cfg.flows.start_hi - cfg.flows.start_lo + 1)));
                f.rec.hash_field = hash_rng.next();
                flows.push_back(std::move(f));
            }
        }
    }

    void rebuild_routing(int q) {
        alive_hops[q].clear();
        alive_links[q].clear();
        for (std::size_t i = 0; i < net.next_hops[q].size(); ++i) {
            const int ln = net.out_links[q][i];
            if (links.empty() || links[ln].alive) {
                alive_hops[q].push_back(net.next_hops[q][i]);
                alive_links[q].push_back(ln);
            }
        }
        if (!alive_hops[q].empty())
            fractions[q].assign(alive_hops[q].size(), 1.0 / static_cast<double>(alive_hops[q].size()));
        else
            fractions[q].clear();
    }

    std::int64_t approx_backlog(int sw, int d) const {
        const int q = net.qid(sw, d);
        std::int64_t sum = 0;
        for (std::size_t i = 0; i < net.next_hops[q].size(); ++i) {
            const Link& l = links[net.out_links[q][i]];
            if (heuristic) {
                sum += static_cast<std::int64_t>(l.queues[link_pos(l, d)].pkts.size());
            }
        }
        return sum;
    }

    void reconfigure() {
        for (auto& l : links) {
            if (heuristic) {
                const auto& cs = net.links[l.index].commodities;
                for (std::size_t i = 0; i < cs.size(); ++i) {
                    const std::int64_t q_tilde = approx_backlog(net.links[l.index].from, cs[i]);
                    l.weight[i] = wfq_weight(q_tilde, l.memory[i], l.r_prev[i], cfg.alpha);
                }
                std::fill(l.deficit.begin(), l.deficit.end(), 0.0);
            }
            l.r_prev = l.r_cur;
            std::fill(l.r_cur.begin(), l.r_cur.end(), 0);
        }
        if (!heuristic) return;
        for (int sw = 0; sw < net.n_switches; ++sw) {
            for (int d = 0; d < net.n_commodities; ++d) {
                const int q = net.qid(sw, d);
                if (alive_hops[q].empty()) continue;
                std::vector<std::int64_t> backlog, rate;
                for (std::size_t i = 0; i < alive_links[q].size(); ++i) {
                    const Link& l = links[alive_links[q][i]];
                    const int pos = link_pos(l, d);
                    backlog.push_back(static_cast<std::int64_t>(l.queues[pos].pkts.size()));
                    rate.push_back(l.r_prev[pos]);
                }
                const auto split = solve_split(backlog, rate);
                const auto f = split_fractions(split);
                if (f != fractions[q]) {
                    ++remap_events;
                    fractions[q] = f;
                }
            }
        }
    }

    void fail_link(int ln) {
        Link& l = links[ln];
        if (!l.alive) return;
        l.alive = false;
        for (auto& pq : l.queues) {
            for (const Pkt& p : pq.pkts) lose_packet(p);
            pq.pkts.clear();
        }
        for (std::size_t q = 0; q < net.n_queues(); ++q) {
            bool affected = false;
            for (int cand : net.out_links[q]) {
                if (cand == ln) affected = true;
            }
            if (affected) rebuild_routing(static_cast<int>(q));
        }
    }

    void lose_packet(const Pkt& p) {
        FlowState& f = flows[static_cast<std::size_t>(p.flow)];
        --f.outstanding;
        f.epoch_dropped = true;
        ++f.rec.drops;
        ++drops_total;
    }

    // route a packet standing at dense switch `sw`; returns false when the
    // packet was dropped (full queue or no alive hop)
    bool route_packet(Pkt pkt, int sw, int d, bool count_branch) {
        const int q = net.qid(sw, d);
        if (alive_hops[q].empty()) {
            lose_packet(pkt);
            return false;
        }
        FlowState& f = flows[static_cast<std::size_t>(pkt.flow)];
        const std::size_t pick = hash_route(f.rec.hash_field, fractions[q]);
        const int ln = alive_links[q][pick];
        Link& l = links[ln];
        const SwitchId sw_ext = net.switch_ids[sw];
        const SwitchId hop_ext = net.switch_ids[alive_hops[q][pick]];
        if (count_branch && net.next_hops[q].size() > 1) {
            ++f.hop_counts[{sw_ext, hop_ext}];
            ++packets_per_hop[{sw_ext, hop_ext}];
        }
        PortQueue& pq = heuristic ? l.queues[link_pos(l, d)] : l.queues[0];
        const std::int64_t cap = heuristic
                                     ? commodity_cap()
                                     : commodity_cap() * static_cast<std::int64_t>(net.n_commodities);
        if (static_cast<std::int64_t>(pq.pkts.size()) >= cap) {
            lose_packet(pkt);
            return false;
        }
        pkt.path = (pkt.path ^ static_cast<std::uint64_t>(hop_ext)) * 1099511628211ULL;
        pq.pkts.push_back(pkt);
        return true;
    }

    std::int64_t effective_capacity(const Link& l, std::int64_t t) const {
        if (!l.alive) return 0;
        std::int64_t c = l.capacity;
        for (const auto& r : cfg.reservations) {
            if (t >= r.start_slot && net.switch_index(r.from) == net.links[l.index].from &&
                net.switch_index(r.to) == net.links[l.index].to) {
                c -= r.rate;
            }
        }
        return std::max<std::int64_t>(0, c);
    }

    void serve_links(std::int64_t t) {
        for (auto& l : links) {
            std::int64_t budget = effective_capacity(l, t);
            if (budget <= 0) continue;
            if (!heuristic) {
                auto& pq = l.queues[0];
                while (budget > 0 && !pq.pkts.empty()) {
                    transmit(l, pq.pkts.front());
                    pq.pkts.pop_front();
                    --budget;
                }
                continue;
            }
            // deficit round robin with quanta proportional to the WFQ weights
            const std::size_t nc = l.queues.size();
            if (nc == 0) continue;
            bool any = false;
            for (const auto& pq : l.queues) any = any || !pq.pkts.empty();
            while (budget > 0 && any) {
                any = false;
                for (std::size_t step = 0; step < nc && budget > 0; ++step) {
                    const std::size_t i = (l.rr + step) % nc;
                    auto& pq = l.queues[i];
                    if (pq.pkts.empty()) {
                        l.deficit[i] = 0.0;
                        continue;
                    }
                    l.deficit[i] += l.weight[i];
                    while (l.deficit[i] >= 1.0 && !pq.pkts.empty() && budget > 0) {
                        transmit(l, pq.pkts.front());
                        pq.pkts.pop_front();
                        l.deficit[i] -= 1.0;
                        --budget;
                    }
                    if (pq.pkts.empty())
                        l.deficit[i] = 0.0;
                    else
                        any = true;
                }
            }
            l.rr = (l.rr + 1) % nc;
        }
    }

    struct Transit {
        Pkt pkt;
        int link = 0;
        CommodityId info_commodity = -1;
        std::int64_t queue_info = 0;
    };
    std::vector<Transit> wire;

    void transmit(Link& l, const Pkt& pkt) {
        const FlowState& f = flows[static_cast<std::size_t>(pkt.flow)];
        const int d = net.commodity_index(f.rec.commodity);
        if (heuristic) ++l.r_cur[link_pos(l, d)];
        Transit tr;
        tr.pkt = pkt;
        tr.link = l.index;
        tr.info_commodity = -1;
        if (heuristic && !l.rotor.empty()) {
            tr.info_commodity = l.rotor.next();
            const int e = net.commodity_index(tr.info_commodity);
            tr.queue_info = ema[static_cast<std::size_t>(net.qid(net.links[l.index].from, e))].rounded();
        }
        wire.push_back(tr);
    }

    void deliver(std::int64_t t) {
        for (const auto& tr : wire) {
            const auto& cl = net.links[static_cast<std::size_t>(tr.link)];
            const int to = cl.to;
            if (heuristic && tr.info_commodity >= 0 && links[static_cast<std::size_t>(tr.link)].reverse >= 0) {
                Link& rev = links[static_cast<std::size_t>(links[static_cast<std::size_t>(tr.link)].reverse)];
                rev.memory[link_pos(rev, net.commodity_index(tr.info_commodity))] = tr.queue_info;
            }
            FlowState& f = flows[static_cast<std::size_t>(tr.pkt.flow)];
            const int d = net.commodity_index(f.rec.commodity);
            if (net.dest_cap[net.qid(to, d)] > 0) {
                --f.outstanding;
                ++f.rec.delivered;
                f.rec.path_digest = tr.pkt.path;
                if (f.rec.delivered == f.rec.size && !f.rec.done()) f.rec.completion_slot = t;
            } else {
                route_packet(tr.pkt, to, d, true);
            }
        }
        wire.clear();
    }

    void drive_flows(std::int64_t t) {
        for (auto& f : flows) {
            if (f.rec.done() || t < f.rec.start_slot) continue;
            if (f.outstanding > 0) continue;
            if (f.epoch_open) {
                // resolve the finished epoch
                if (f.epoch_dropped)
                    f.rec.window = std::max<std::int64_t>(1, f.rec.window / 2);
                else
                    f.rec.window += 1;
                f.epoch_open = false;
            }
            const std::int64_t remaining = f.rec.size - f.rec.delivered;
            if (remaining <= 0) continue;
            const std::int64_t batch = std::min(f.rec.window, remaining);
            f.epoch_open = true;
            f.epoch_dropped = false;
            f.outstanding = batch;
            const int sw = net.switch_index(f.rec.source);
            const int d = net.commodity_index(f.rec.commodity);
            for (std::int64_t n = 0; n < batch; ++n) {
                Pkt pkt;
                pkt.flow = f.rec.id;
                route_packet(pkt, sw, d, true);
            }
        }
    }

    void update_ema() {
        if (!heuristic) return;
        for (int sw = 0; sw < net.n_switches; ++sw) {
            for (int d = 0; d < net.n_commodities; ++d) {
                const int q = net.qid(sw, d);
                if (!net.next_hops[q].empty()) ema[static_cast<std::size_t>(q)].update(approx_backlog(sw, d));
            }
        }
    }

    FlowSimResult run() {
        build();
        for (std::int64_t t = 0; t < cfg.horizon; ++t) {
            if (t % cfg.T == 0) reconfigure();
            for (const auto& lf : cfg.link_failures) {
                if (lf.slot == t) {
                    const int from = net.switch_index(lf.from);
                    const int to = net.switch_index(lf.to);
                    for (auto& l : links) {
                        if (net.links[l.index].from == from && net.links[l.index].to == to)
                            fail_link(l.index);
                    }
                }
            }
            serve_links(t);
            deliver(t);
            drive_flows(t);
            update_ema();
        }
        return finish();
    }

    FlowSimResult finish() {
        FlowSimResult out;
        FlowMetrics& m = out.metrics;
        m.scenario = cfg.name;
        m.algorithm = algorithm_name(cfg.algorithm);
        m.seed = cfg.seed;
        m.config_digest = cfg.digest;
        m.horizon = cfg.horizon;
        m.flows_total = static_cast<std::int64_t>(flows.size());
        m.drops_total = drops_total;
        m.remap_events = remap_events;

        std::vector<std::int64_t> fcts;
        std::map<std::pair<SwitchId, SwitchId>, std::int64_t> majority;
        for (auto& f : flows) {
            if (f.rec.done()) {
                ++m.flows_completed;
                fcts.push_back(f.rec.fct());
            }
            // majority next hop per branching switch this flow visited
            std::map<SwitchId, std::pair<SwitchId, std::int64_t>> best;
            for (const auto& [key, count] : f.hop_counts) {
                auto it = best.find(key.first);
                if (it == best.end() || count > it->second.second ||
                    (count == it->second.second && key.second < it->second.first))
                    best[key.first] = {key.second, count};
            }
            for (const auto& [sw, hop] : best) ++majority[{sw, hop.first}];
            out.flows.push_back(f.rec);
        }
        if (!fcts.empty()) {
            double sum = 0.0;
            for (auto v : fcts) sum += static_cast<double>(v);
            m.fct_mean = sum / static_cast<double>(fcts.size());
            double var = 0.0;
            for (auto v : fcts) {
                const double d = static_cast<double>(v) - m.fct_mean;
                var += d * d;
            }
            m.fct_variance = var / static_cast<double>(fcts.size());
            std::sort(fcts.begin(), fcts.end());
            const auto idx = std::min(fcts.size() - 1,
                                      static_cast<std::size_t>(0.99 * static_cast<double>(fcts.size())));
            m.fct_p99 = static_cast<double>(fcts[idx]);
            m.fct_max = fcts.back();
        }
        for (const auto& [key, packets] : packets_per_hop) {
            RouteCount rc;
            rc.sw = key.first;
            rc.next_hop = key.second;
            rc.packets = packets;
            auto it = majority.find(key);
            rc.majority_flows = it == majority.end() ? 0 : it->second;
            m.route_counts.push_back(rc);
        }
        return out;
    }
};

} // namespace

FlowSimResult run_flow_sim(const ScenarioConfig& config) {
    if (config.algorithm != Algorithm::Heuristic && config.algorithm != Algorithm::Ecmp)
        throw std::invalid_argument("run_flow_sim: algorithm must be heuristic or ecmp");
    if (config.flows.groups.empty()) throw std::invalid_argument("run_flow_sim: no flows configured");
    FlowEngine engine(config);
    return engine.run();
}

} // namespace lbsim
