#include "lbsim/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

namespace lbsim {

using nlohmann::json;

const char* algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::Algorithm1: return "algorithm1";
    case Algorithm::MaxWeight: return "maxweight";
    case Algorithm::Heuristic: return "heuristic";
    case Algorithm::Ecmp: return "ecmp";
    }
    return "?";
}

std::optional<Algorithm> algorithm_from_name(const std::string& name) {
    if (name == "algorithm1") return Algorithm::Algorithm1;
    if (name == "maxweight") return Algorithm::MaxWeight;
    if (name == "heuristic") return Algorithm::Heuristic;
    if (name == "ecmp") return Algorithm::Ecmp;
    return std::nullopt;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) { ok = true; break; }
        }
        if (!ok) fail(path, "unknown key '" + key + "'");
    }
}

std::int64_t get_int(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(path, std::string("missing key '") + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<std::int64_t>();
}

std::int64_t get_int_or(const json& obj, const std::string& path, const char* key, std::int64_t dflt) {
    return obj.contains(key) ? get_int(obj, path, key) : dflt;
}

double get_num(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(path, std::string("missing key '") + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double get_num_or(const json& obj, const std::string& path, const char* key, double dflt) {
    return obj.contains(key) ? get_num(obj, path, key) : dflt;
}

std::string get_str_or(const json& obj, const std::string& path, const char* key, const std::string& dflt) {
    if (!obj.contains(key)) return dflt;
    const auto& v = obj.at(key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

Topology parse_topology(const json& t, const std::string& path) {
    if (!t.is_object()) fail(path, "expected an object");
    reject_unknown(t, path, {"switches", "commodities", "delta", "links", "dest_links", "next_hops"});
    Topology topo;
    if (!t.contains("switches") || !t.at("switches").is_array()) fail(path, "missing 'switches' array");
    for (const auto& s : t.at("switches")) topo.switches.insert(s.get<int>());
    if (!t.contains("commodities") || !t.at("commodities").is_array()) fail(path, "missing 'commodities' array");
    for (const auto& d : t.at("commodities")) topo.commodities.insert(d.get<int>());
    topo.delta = get_int_or(t, path, "delta", 0);

    if (t.contains("links")) {
        int idx = 0;
        for (const auto& l : t.at("links")) {
            const std::string lp = path + ".links[" + std::to_string(idx++) + "]";
            reject_unknown(l, lp, {"from", "to", "capacity"});
            const auto i = static_cast<SwitchId>(get_int(l, lp, "from"));
            const auto j = static_cast<SwitchId>(get_int(l, lp, "to"));
            if (topo.link_capacity.count({i, j})) fail(lp, "duplicate link");
            topo.link_capacity[{i, j}] = get_int(l, lp, "capacity");
        }
    }
    if (t.contains("dest_links")) {
        int idx = 0;
        for (const auto& l : t.at("dest_links")) {
            const std::string lp = path + ".dest_links[" + std::to_string(idx++) + "]";
            reject_unknown(l, lp, {"switch", "commodity", "capacity"});
            const auto i = static_cast<SwitchId>(get_int(l, lp, "switch"));
            const auto d = static_cast<CommodityId>(get_int(l, lp, "commodity"));
            topo.dest_capacity[{i, d}] = get_int(l, lp, "capacity");
        }
    }
    if (t.contains("next_hops")) {
        int idx = 0;
        for (const auto& h : t.at("next_hops")) {
            const std::string hp = path + ".next_hops[" + std::to_string(idx++) + "]";
            reject_unknown(h, hp, {"switch", "commodity", "via"});
            const auto i = static_cast<SwitchId>(get_int(h, hp, "switch"));
            const auto d = static_cast<CommodityId>(get_int(h, hp, "commodity"));
            if (!h.contains("via") || !h.at("via").is_array()) fail(hp, "missing 'via' array");
            for (const auto& j : h.at("via")) topo.next_hops[{i, d}].insert(j.get<int>());
        }
    }
    return topo;
}

ArrivalSpec parse_arrivals(const json& arr, const std::string& path, const Topology& topo) {
    if (!arr.is_array()) fail(path, "expected an array");
    ArrivalSpec spec;
    int idx = 0;
    for (const auto& a : arr) {
        const std::string ap = path + "[" + std::to_string(idx++) + "]";
        reject_unknown(a, ap, {"switch", "commodity", "kind", "value", "lo", "hi", "prob"});
        ArrivalProcess p;
        p.sw = static_cast<SwitchId>(get_int(a, ap, "switch"));
        p.commodity = static_cast<CommodityId>(get_int(a, ap, "commodity"));
        if (!topo.switches.count(p.sw)) fail(ap + ".switch", "unknown switch " + std::to_string(p.sw));
        if (!topo.commodities.count(p.commodity))
            fail(ap + ".commodity", "unknown commodity " + std::to_string(p.commodity));
        const std::string kind = get_str_or(a, ap, "kind", "");
        if (kind == "deterministic") {
            p.kind = ArrivalKind::Deterministic;
            p.value = get_int(a, ap, "value");
            if (p.value < 0) fail(ap + ".value", "must be >= 0");
        } else if (kind == "uniform") {
            p.kind = ArrivalKind::UniformInt;
            p.lo = get_int(a, ap, "lo");
            p.hi = get_int(a, ap, "hi");
            if (p.lo < 0 || p.hi < p.lo) fail(ap, "need 0 <= lo <= hi");
        } else if (kind == "bernoulli") {
            p.kind = ArrivalKind::BernoulliScaled;
            p.value = get_int(a, ap, "value");
            p.prob = get_num(a, ap, "prob");
            if (p.value < 0) fail(ap + ".value", "must be >= 0");
            if (p.prob < 0.0 || p.prob > 1.0) fail(ap + ".prob", "must be in [0, 1]");
        } else {
            fail(ap + ".kind", "expected deterministic|uniform|bernoulli");
        }
        spec.processes.push_back(p);
    }
    return spec;
}

} // namespace

ScenarioConfig load_scenario(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!root.is_object()) throw ConfigError(origin + ": top level must be an object");
    reject_unknown(root, origin, {"version", "name", "topology", "arrivals", "run", "flows", "events"});

    const std::int64_t version = get_int_or(root, origin, "version", 1);
    if (version != 1) fail(origin + ".version", "unsupported schema version " + std::to_string(version));

    ScenarioConfig cfg;
    cfg.name = get_str_or(root, origin, "name", "");
    if (!root.contains("topology")) fail(origin, "missing 'topology'");
    cfg.topology = parse_topology(root.at("topology"), origin + ".topology");
    if (root.contains("arrivals"))
        cfg.arrivals = parse_arrivals(root.at("arrivals"), origin + ".arrivals", cfg.topology);

    const std::string rp = origin + ".run";
    if (root.contains("run")) {
        const json& run = root.at("run");
        reject_unknown(run, rp,
                       {"algorithm", "T", "K", "alpha", "horizon", "seed", "queue_capacity", "arrival_scale",
                        "discard_fraction", "convergence_window", "trace", "trace_decimation"});
        cfg.T = get_int_or(run, rp, "T", cfg.T);
        cfg.K = get_num_or(run, rp, "K", cfg.K);
        cfg.alpha = get_num_or(run, rp, "alpha", cfg.alpha);
        cfg.horizon = get_int_or(run, rp, "horizon", cfg.horizon);
        cfg.seed = static_cast<std::uint64_t>(get_int_or(run, rp, "seed", static_cast<std::int64_t>(cfg.seed)));
        cfg.queue_capacity = get_int_or(run, rp, "queue_capacity", cfg.queue_capacity);
        cfg.arrival_scale = get_num_or(run, rp, "arrival_scale", cfg.arrival_scale);
        cfg.discard_fraction = get_num_or(run, rp, "discard_fraction", cfg.discard_fraction);
        if (run.contains("convergence_window")) {
            if (!run.at("convergence_window").is_boolean()) fail(rp + ".convergence_window", "expected a boolean");
            cfg.convergence_window = run.at("convergence_window").get<bool>();
        }
        const std::string algo = get_str_or(run, rp, "algorithm", algorithm_name(cfg.algorithm));
        if (auto a = algorithm_from_name(algo)) {
            cfg.algorithm = *a;
        } else {
            fail(rp + ".algorithm", "expected algorithm1|maxweight|heuristic|ecmp, got '" + algo + "'");
        }
        const std::string trace = get_str_or(run, rp, "trace", "none");
        if (trace == "none") cfg.trace = TraceMode::None;
        else if (trace == "decimated") cfg.trace = TraceMode::Decimated;
        else if (trace == "full") cfg.trace = TraceMode::Full;
        else fail(rp + ".trace", "expected none|decimated|full");
        cfg.trace_decimation = get_int_or(run, rp, "trace_decimation", cfg.trace_decimation);
    }

    if (root.contains("flows")) {
        const json& fl = root.at("flows");
        const std::string fp = origin + ".flows";
        reject_unknown(fl, fp, {"size", "start_window", "groups", "mesh"});
        cfg.flows.flow_size = get_int_or(fl, fp, "size", cfg.flows.flow_size);
        if (fl.contains("start_window")) {
            const auto& w = fl.at("start_window");
            if (!w.is_array() || w.size() != 2) fail(fp + ".start_window", "expected [lo, hi]");
            cfg.flows.start_lo = w.at(0).get<std::int64_t>();
            cfg.flows.start_hi = w.at(1).get<std::int64_t>();
            if (cfg.flows.start_lo < 0 || cfg.flows.start_hi < cfg.flows.start_lo)
                fail(fp + ".start_window", "need 0 <= lo <= hi");
        }
        if (fl.contains("groups")) {
            int idx = 0;
            for (const auto& g : fl.at("groups")) {
                const std::string gp = fp + ".groups[" + std::to_string(idx++) + "]";
                reject_unknown(g, gp, {"source", "commodity", "count"});
                FlowGroup fg;
                fg.source = static_cast<SwitchId>(get_int(g, gp, "source"));
                fg.commodity = static_cast<CommodityId>(get_int(g, gp, "commodity"));
                fg.count = static_cast<int>(get_int(g, gp, "count"));
                if (fg.count < 0) fail(gp + ".count", "must be >= 0");
                if (!cfg.topology.switches.count(fg.source)) fail(gp + ".source", "unknown switch");
                if (!cfg.topology.commodities.count(fg.commodity)) fail(gp + ".commodity", "unknown commodity");
                cfg.flows.groups.push_back(fg);
            }
        }
        if (fl.contains("mesh")) {
            const json& mesh = fl.at("mesh");
            const std::string mp = fp + ".mesh";
            reject_unknown(mesh, mp, {"members", "count"});
            if (!mesh.contains("members") || !mesh.at("members").is_array()) fail(mp, "missing 'members'");
            const int count = static_cast<int>(get_int(mesh, mp, "count"));
            std::vector<int> members;
            for (const auto& m : mesh.at("members")) members.push_back(m.get<int>());
            for (int src : members) {
                for (int dst : members) {
                    if (src == dst) continue;
                    if (!cfg.topology.switches.count(src)) fail(mp, "unknown member switch " + std::to_string(src));
                    if (!cfg.topology.commodities.count(dst)) fail(mp, "member " + std::to_string(dst) + " is not a commodity");
                    cfg.flows.groups.push_back({src, dst, count});
                }
            }
        }
    }

    if (root.contains("events")) {
        const json& ev = root.at("events");
        const std::string ep = origin + ".events";
        reject_unknown(ev, ep, {"link_failures", "reservations"});
        if (ev.contains("link_failures")) {
            int idx = 0;
            for (const auto& f : ev.at("link_failures")) {
                const std::string lp = ep + ".link_failures[" + std::to_string(idx++) + "]";
                reject_unknown(f, lp, {"slot", "from", "to"});
                LinkFailure lf;
                lf.slot = get_int_or(f, lp, "slot", 0);
                lf.from = static_cast<SwitchId>(get_int(f, lp, "from"));
                lf.to = static_cast<SwitchId>(get_int(f, lp, "to"));
                if (!cfg.topology.link_capacity.count({lf.from, lf.to}))
                    fail(lp, "failure references missing link");
                cfg.link_failures.push_back(lf);
            }
        }
        if (ev.contains("reservations")) {
            int idx = 0;
            for (const auto& r : ev.at("reservations")) {
                const std::string lp = ep + ".reservations[" + std::to_string(idx++) + "]";
                reject_unknown(r, lp, {"from", "to", "rate", "start"});
                Reservation rv;
                rv.from = static_cast<SwitchId>(get_int(r, lp, "from"));
                rv.to = static_cast<SwitchId>(get_int(r, lp, "to"));
                rv.rate = get_int(r, lp, "rate");
                rv.start_slot = get_int_or(r, lp, "start", 0);
                if (!cfg.topology.link_capacity.count({rv.from, rv.to}))
                    fail(lp, "reservation references missing link");
                if (rv.rate < 0) fail(lp + ".rate", "must be >= 0");
                cfg.reservations.push_back(rv);
            }
        }
    }

    // cross-field invariants
    if (cfg.T < 1) fail(rp + ".T", "must be >= 1");
    if (cfg.K < 1.0) fail(rp + ".K", "must be >= 1");
    if (cfg.alpha <= 0.0) fail(rp + ".alpha", "must be > 0");
    if (cfg.horizon < 0) fail(rp + ".horizon", "must be >= 0");
    if (cfg.horizon % cfg.T != 0)
        fail(rp + ".horizon", "horizon " + std::to_string(cfg.horizon) + " is not a multiple of T " +
                                  std::to_string(cfg.T));
    if (cfg.arrival_scale <= 0.0 || cfg.arrival_scale > 1.0) fail(rp + ".arrival_scale", "must be in (0, 1]");
    if (cfg.discard_fraction < 0.0 || cfg.discard_fraction >= 1.0)
        fail(rp + ".discard_fraction", "must be in [0, 1)");
    if (cfg.queue_capacity < 1) fail(rp + ".queue_capacity", "must be >= 1");
    if (cfg.trace_decimation < 1) fail(rp + ".trace_decimation", "must be >= 1");
    const std::int64_t delta = cfg.delta();
    if (delta > 0) {
        for (const auto& p : cfg.arrivals.processes) {
            if (p.support_max() > delta)
                fail(origin + ".arrivals", "arrival support exceeds delta at switch " + std::to_string(p.sw) +
                                               " commodity " + std::to_string(p.commodity));
        }
    }

    cfg.digest = fnv1a(dump_scenario(cfg));
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    ScenarioConfig cfg = load_scenario(buf.str(), path);
    if (cfg.name.empty()) {
        auto slash = path.find_last_of('/');
        cfg.name = slash == std::string::npos ? path : path.substr(slash + 1);
    }
    return cfg;
}

std::string dump_scenario(const ScenarioConfig& cfg) {
    json root;
    root["version"] = 1;
    root["name"] = cfg.name;

    json topo;
    topo["switches"] = cfg.topology.switches;
    topo["commodities"] = cfg.topology.commodities;
    if (cfg.topology.delta > 0) topo["delta"] = cfg.topology.delta;
    json links = json::array();
    for (const auto& [key, cap] : cfg.topology.link_capacity)
        links.push_back({{"from", key.first}, {"to", key.second}, {"capacity", cap}});
    topo["links"] = links;
    json dests = json::array();
    for (const auto& [key, cap] : cfg.topology.dest_capacity)
        dests.push_back({{"switch", key.first}, {"commodity", key.second}, {"capacity", cap}});
    topo["dest_links"] = dests;
    json hops = json::array();
    for (const auto& [key, via] : cfg.topology.next_hops)
        hops.push_back({{"switch", key.first}, {"commodity", key.second}, {"via", via}});
    topo["next_hops"] = hops;
    root["topology"] = topo;

    json arrivals = json::array();
    for (const auto& p : cfg.arrivals.processes) {
        json a{{"switch", p.sw}, {"commodity", p.commodity}};
        switch (p.kind) {
        case ArrivalKind::Deterministic:
            a["kind"] = "deterministic";
            a["value"] = p.value;
            break;
        case ArrivalKind::UniformInt:
            a["kind"] = "uniform";
            a["lo"] = p.lo;
            a["hi"] = p.hi;
            break;
        case ArrivalKind::BernoulliScaled:
            a["kind"] = "bernoulli";
            a["value"] = p.value;
            a["prob"] = p.prob;
            break;
        }
        arrivals.push_back(a);
    }
    root["arrivals"] = arrivals;

    json run;
    run["algorithm"] = algorithm_name(cfg.algorithm);
    run["T"] = cfg.T;
    run["K"] = cfg.K;
    run["alpha"] = cfg.alpha;
    run["horizon"] = cfg.horizon;
    run["seed"] = cfg.seed;
    run["queue_capacity"] = cfg.queue_capacity;
    run["arrival_scale"] = cfg.arrival_scale;
    run["discard_fraction"] = cfg.discard_fraction;
    run["convergence_window"] = cfg.convergence_window;
    run["trace"] = cfg.trace == TraceMode::None ? "none" : cfg.trace == TraceMode::Decimated ? "decimated" : "full";
    run["trace_decimation"] = cfg.trace_decimation;
    root["run"] = run;

    if (!cfg.flows.groups.empty()) {
        json fl;
        fl["size"] = cfg.flows.flow_size;
        fl["start_window"] = {cfg.flows.start_lo, cfg.flows.start_hi};
        json groups = json::array();
        for (const auto& g : cfg.flows.groups)
            groups.push_back({{"source", g.source}, {"commodity", g.commodity}, {"count", g.count}});
        fl["groups"] = groups;
        root["flows"] = fl;
    }
    if (!cfg.link_failures.empty() || !cfg.reservations.empty()) {
        json ev;
        json failures = json::array();
        for (const auto& f : cfg.link_failures)
            failures.push_back({{"slot", f.slot}, {"from", f.from}, {"to", f.to}});
        if (!cfg.link_failures.empty()) ev["link_failures"] = failures;
        json rsv = json::array();
        for (const auto& r : cfg.reservations)
            rsv.push_back({{"from", r.from}, {"to", r.to}, {"rate", r.rate}, {"start", r.start_slot}});
        if (!cfg.reservations.empty()) ev["reservations"] = rsv;
        root["events"] = ev;
    }
    return root.dump();
}

} // namespace lbsim
