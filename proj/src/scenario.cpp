#include "scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "util.hpp"

namespace dtfl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError("config: " + path + ": " + msg);
}

// Strict object access: every key must be consumed exactly once.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }
    ~Obj() = default;

    bool has(const char* key) const { return j_.contains(key); }

    const json& req(const char* key) {
        if (!j_.contains(key)) fail(path_, std::string("missing required key '") + key + "'");
        seen_.insert(key);
        return j_.at(key);
    }
    const json* opt(const char* key) {
        if (!j_.contains(key)) return nullptr;
        seen_.insert(key);
        return &j_.at(key);
    }
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                fail(path_, "unknown key '" + it.key() + "'");
    }
    const std::string& path() const { return path_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

double num(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double pos(const json& j, const std::string& path) {
    const double v = num(j, path);
    if (!(v > 0)) fail(path, "must be strictly positive");
    return v;
}

int count(const json& j, const std::string& path, int lo) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < lo) fail(path, "must be >= " + std::to_string(lo));
    return static_cast<int>(v);
}

std::array<double, 4> weights4(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 4) fail(path, "expected an array of 4 weights");
    std::array<double, 4> w{};
    for (int k = 0; k < 4; ++k) {
        w[k] = num(j[k], path);
        if (w[k] < 0) fail(path, "weights must be nonnegative");
    }
    return w;
}

double unit(const json& j, const std::string& path) {
    const double v = num(j, path);
    if (!(v >= 0.0 && v <= 1.0)) fail(path, "must lie in [0, 1]");
    return v;
}

model::SystemParams parse_system(const json& j, const std::string& path) {
    Obj o(j, path);
    model::SystemParams s;
    s.bandwidth_hz = pos(o.req("bandwidth_hz"), path + ".bandwidth_hz");
    s.noise_coord_w = pos(o.req("noise_coordinator_w"), path + ".noise_coordinator_w");
    s.noise_eaves_w = pos(o.req("noise_eavesdropper_w"), path + ".noise_eavesdropper_w");
    s.local_iters = pos(o.req("local_iters"), path + ".local_iters");
    s.cycles_per_bit = pos(o.req("cycles_per_bit"), path + ".cycles_per_bit");
    s.switch_cap = pos(o.req("switched_capacitance"), path + ".switched_capacitance");
    s.model_size_bits = pos(o.req("model_size_bits"), path + ".model_size_bits");
    s.coord_cpu_hz = pos(o.req("coordinator_cpu_hz"), path + ".coordinator_cpu_hz");
    s.t_agg_coord_s = pos(o.req("t_agg_coordinator_s"), path + ".t_agg_coordinator_s");
    s.t_up_coord_s = pos(o.req("t_up_coordinator_s"), path + ".t_up_coordinator_s");
    s.t_main_coord_s = pos(o.req("t_main_coordinator_s"), path + ".t_main_coordinator_s");
    o.finish();
    s.validate();
    return s;
}

std::vector<model::GldProfile> parse_glds(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array");
    std::vector<model::GldProfile> out;
    std::set<int> seen;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string p = path + "[" + std::to_string(k) + "]";
        Obj o(j[k], p);
        model::GldProfile g;
        g.index = count(o.req("index"), p + ".index", 1);
        g.data_bits = pos(o.req("data_bits"), p + ".data_bits");
        g.gain_coord = pos(o.req("gain_coordinator"), p + ".gain_coordinator");
        g.gain_eaves = pos(o.req("gain_eavesdropper"), p + ".gain_eavesdropper");
        g.cpu_max_hz = pos(o.req("cpu_max_hz"), p + ".cpu_max_hz");
        g.tx_power_max_w = pos(o.req("tx_power_max_w"), p + ".tx_power_max_w");
        g.jam_power_max_w = pos(o.req("jam_power_max_w"), p + ".jam_power_max_w");
        g.energy_max_j = pos(o.req("energy_max_j"), p + ".energy_max_j");
        o.finish();
        if (!seen.insert(g.index).second) fail(p, "duplicate GLD index");
        out.push_back(g);
    }
    return out;
}

std::vector<model::BldProfile> parse_blds(const json& j, const std::string& path,
                                          double default_noise_w) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array");
    std::vector<model::BldProfile> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string p = path + "[" + std::to_string(k) + "]";
        Obj o(j[k], p);
        model::BldProfile b;
        b.index = count(o.req("index"), p + ".index", 1);
        b.data_bits = pos(o.req("data_bits"), p + ".data_bits");
        b.gain_coord = pos(o.req("gain_coordinator"), p + ".gain_coordinator");
        b.gain_eaves = pos(o.req("gain_eavesdropper"), p + ".gain_eavesdropper");
        b.tx_power_w = pos(o.req("tx_power_w"), p + ".tx_power_w");
        b.noise_w = default_noise_w;
        if (const json* n = o.opt("noise_w")) b.noise_w = pos(*n, p + ".noise_w");
        o.finish();
        out.push_back(b);
    }
    return out;
}

opt::SolverConfig parse_solver(const json* j, const std::string& path) {
    opt::SolverConfig c;
    if (!j) return c;
    Obj o(*j, path);
    if (const json* v = o.opt("q_step_w")) c.q_step_w = pos(*v, path + ".q_step_w");
    if (const json* v = o.opt("dual_tol")) c.dual_tol = pos(*v, path + ".dual_tol");
    if (const json* v = o.opt("max_dual_iters"))
        c.max_dual_iters = count(*v, path + ".max_dual_iters", 1);
    if (const json* v = o.opt("bisection_tol_s"))
        c.bisection_tol_s = pos(*v, path + ".bisection_tol_s");
    if (const json* v = o.opt("bisection_max_iters"))
        c.bisection_max_iters = count(*v, path + ".bisection_max_iters", 1);
    if (const json* v = o.opt("debug_y_scale"))
        c.debug_y_scale = pos(*v, path + ".debug_y_scale");
    o.finish();
    return c;
}

fedsim::ScoringTables parse_scoring(const json& j, const std::string& path) {
    Obj o(j, path);
    fedsim::ScoringTables t;
    t.threshold = num(o.req("threshold"), path + ".threshold");
    const auto rep_w = weights4(o.req("reputation_weights"), path + ".reputation_weights");
    const auto dev_w = weights4(o.req("device_weights"), path + ".device_weights");

    const json& coords = o.req("coordinators");
    if (!coords.is_array() || coords.empty()) fail(path + ".coordinators", "expected a nonempty array");
    std::set<int> ids;
    for (std::size_t k = 0; k < coords.size(); ++k) {
        const std::string p = path + ".coordinators[" + std::to_string(k) + "]";
        Obj c(coords[k], p);
        fedsim::CoordinatorEntry e;
        e.id = count(c.req("id"), p + ".id", 0);
        e.reputation.cap_enc = unit(c.req("cap_enc"), p + ".cap_enc");
        e.reputation.cap_rou = unit(c.req("cap_rou"), p + ".cap_rou");
        e.reputation.prop = unit(c.req("prop"), p + ".prop");
        e.reputation.hist = unit(c.req("hist"), p + ".hist");
        e.reputation.weights = rep_w;
        c.finish();
        if (!ids.insert(e.id).second) fail(p, "duplicate coordinator id");
        t.coordinators.push_back(e);
    }

    const json& devs = o.req("devices");
    if (!devs.is_array() || devs.empty()) fail(path + ".devices", "expected a nonempty array");
    std::set<int> dev_ids;
    for (std::size_t k = 0; k < devs.size(); ++k) {
        const std::string p = path + ".devices[" + std::to_string(k) + "]";
        Obj d(devs[k], p);
        fedsim::DeviceEntry e;
        e.id = count(d.req("id"), p + ".id", 0);
        e.score.cap_proc = unit(d.req("cap_proc"), p + ".cap_proc");
        e.score.cap_store = unit(d.req("cap_store"), p + ".cap_store");
        e.score.cap_com = unit(d.req("cap_com"), p + ".cap_com");
        e.score.energy = unit(d.req("energy"), p + ".energy");
        e.score.weights = dev_w;
        d.finish();
        if (!dev_ids.insert(e.id).second) fail(p, "duplicate device id");
        t.devices.push_back(e);
    }
    o.finish();
    return t;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }

    Obj root(j, "$");
    ScenarioConfig cfg;
    cfg.sys = parse_system(root.req("system"), "$.system");
    cfg.glds = parse_glds(root.req("glds"), "$.glds");
    cfg.blds = parse_blds(root.req("blds"), "$.blds", cfg.sys.noise_coord_w);
    cfg.clusters = count(root.req("clusters"), "$.clusters", 1);
    cfg.solver = parse_solver(root.opt("solver"), "$.solver");
    cfg.scoring = parse_scoring(root.req("scoring"), "$.scoring");
    cfg.rounds = count(root.req("rounds"), "$.rounds", 0);
    if (const json* v = root.opt("verify_trials"))
        cfg.verify_trials = count(*v, "$.verify_trials", 0);

    const json& seed = root.req("seed");
    if (!seed.is_number_integer()) throw ConfigError("config: $.seed: expected an integer");
    cfg.seed = seed.get<std::uint64_t>();

    fedsim::SimParams sim;
    sim.clusters = cfg.clusters;
    sim.rounds = cfg.rounds;
    sim.seed = cfg.seed;
    if (const json* m = root.opt("malicious")) {
        Obj o(*m, "$.malicious");
        sim.malicious_mode =
            fedsim::malicious_mode_from_string(o.req("mode").get<std::string>());
        const json& cl = o.req("clusters");
        if (!cl.is_array()) throw ConfigError("config: $.malicious.clusters: expected an array");
        for (const auto& v : cl) {
            const int c = v.get<int>();
            if (c < 0 || c >= cfg.clusters)
                throw ConfigError("config: $.malicious.clusters: cluster id out of range");
            sim.malicious_clusters.push_back(c);
        }
        if (const json* s = o.opt("scale")) sim.attack_scale = num(*s, "$.malicious.scale");
        o.finish();
    }
    if (const json* l = root.opt("learning")) {
        Obj o(*l, "$.learning");
        if (const json* v = o.opt("train_per_cluster"))
            sim.train_per_cluster = count(*v, "$.learning.train_per_cluster", 1);
        if (const json* v = o.opt("test_per_cluster"))
            sim.test_per_cluster = count(*v, "$.learning.test_per_cluster", 1);
        if (const json* v = o.opt("blob_mean")) sim.blob_mean = pos(*v, "$.learning.blob_mean");
        if (const json* v = o.opt("blob_sigma")) sim.blob_sigma = pos(*v, "$.learning.blob_sigma");
        if (const json* v = o.opt("learn_rate")) sim.learn_rate = pos(*v, "$.learning.learn_rate");
        o.finish();
    }
    if (const json* v = root.opt("solve_schedule")) {
        if (!v->is_boolean()) throw ConfigError("config: $.solve_schedule: expected a boolean");
        sim.run_solver = v->get<bool>();
    }
    root.finish();

    if (sim.train_per_cluster < static_cast<int>(cfg.scoring.devices.size()))
        throw ConfigError("config: fewer training samples than devices per cluster");
    cfg.sim = sim;
    return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

fedsim::SimParams ScenarioConfig::sim_params() const {
    return sim;
}

}  // namespace dtfl
