#include "hmera/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hmera {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    if (!obj.is_object()) throw ConfigError("config: " + where + " must be an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw ConfigError("config: unknown key '" + key + "' in " + where);
}

template <typename T>
T require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key))
        throw ConfigError("config: missing key '" + key + "' in " + where);
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for '" + key + "' in " + where);
    }
}

template <typename T>
T optional_or(const json& obj, const std::string& key, const std::string& where, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for '" + key + "' in " + where);
    }
}

SystemConfig parse_system(const json& j, bool allow_large) {
    reject_unknown_keys(j, {"n", "j", "lam", "boundary"}, "system");
    SystemConfig s;
    s.n = require<int>(j, "n", "system");
    s.j = require<double>(j, "j", "system");
    s.lam = require<double>(j, "lam", "system");
    const std::string b = require<std::string>(j, "boundary", "system");
    if (b == "open")
        s.boundary = Boundary::Open;
    else if (b == "periodic")
        s.boundary = Boundary::Periodic;
    else
        throw ConfigError("config: boundary must be 'open' or 'periodic'");
    if (s.n < 2) throw ConfigError("config: system.n must be at least 2");
    const int cap = allow_large ? 24 : 12;
    if (s.n > cap)
        throw ConfigError("config: system.n exceeds " + std::to_string(cap) +
                          (allow_large ? "" : " (pass --large for up to 24 sites)"));
    if (!std::isfinite(s.j) || !std::isfinite(s.lam))
        throw ConfigError("config: couplings must be finite");
    return s;
}

ScheduleParams parse_schedule(const json& j) {
    reject_unknown_keys(j, {"t_final", "dt"}, "schedule");
    ScheduleParams s;
    s.t_final = require<double>(j, "t_final", "schedule");
    s.dt = require<double>(j, "dt", "schedule");
    if (!(s.t_final > 0.0) || !(s.dt > 0.0))
        throw ConfigError("config: schedule times must be positive");
    return s;
}

MeraConfig parse_mera(const json& j, int n) {
    reject_unknown_keys(j, {"layers", "init"}, "mera");
    MeraConfig m;
    m.layers = require<int>(j, "layers", "mera");
    const std::string init = require<std::string>(j, "init", "mera");
    if (init == "identity")
        m.init = MeraConfig::Init::Identity;
    else if (init == "random")
        m.init = MeraConfig::Init::Random;
    else
        throw ConfigError("config: mera.init must be 'identity' or 'random'");
    if (m.layers < 1) throw ConfigError("config: mera.layers must be at least 1");
    if (n % (1 << m.layers) != 0)
        throw ConfigError("config: system.n must be divisible by 2^mera.layers");
    return m;
}

OptimizerConfig parse_optimizer(const json& j) {
    reject_unknown_keys(j, {"steps", "alpha", "beta1", "beta2", "eps"}, "optimizer");
    OptimizerConfig o;
    o.steps = require<int>(j, "steps", "optimizer");
    o.adam.alpha = require<double>(j, "alpha", "optimizer");
    o.adam.beta1 = require<double>(j, "beta1", "optimizer");
    o.adam.beta2 = require<double>(j, "beta2", "optimizer");
    o.adam.eps = require<double>(j, "eps", "optimizer");
    if (o.steps < 0) throw ConfigError("config: optimizer.steps must be non-negative");
    if (!(o.adam.alpha > 0.0)) throw ConfigError("config: optimizer.alpha must be positive");
    if (o.adam.beta1 < 0.0 || o.adam.beta1 >= 1.0 || o.adam.beta2 < 0.0 || o.adam.beta2 >= 1.0)
        throw ConfigError("config: optimizer betas must lie in [0, 1)");
    if (!(o.adam.eps > 0.0)) throw ConfigError("config: optimizer.eps must be positive");
    return o;
}

InterfaceConfig parse_interface(const json& j) {
    InterfaceConfig i;
    const std::string kind = require<std::string>(j, "kind", "interface");
    if (kind == "exact") {
        reject_unknown_keys(j, {"kind"}, "interface");
        i.kind = Interface::Exact;
    } else if (kind == "shadow") {
        reject_unknown_keys(j, {"kind", "s", "protocol"}, "interface");
        i.kind = Interface::Shadow;
        i.s = require<std::size_t>(j, "s", "interface");
        i.protocol = protocol_from_name(require<std::string>(j, "protocol", "interface"));
        if (i.s < 1) throw ConfigError("config: interface.s must be at least 1");
    } else {
        throw ConfigError("config: interface.kind must be 'exact' or 'shadow'");
    }
    return i;
}

NoiseConfig parse_noise(const json& j) {
    reject_unknown_keys(j, {"enabled", "eta", "base"}, "noise");
    NoiseConfig n;
    n.enabled = require<bool>(j, "enabled", "noise");
    n.eta = optional_or<double>(j, "eta", "noise", 1.0);
    if (j.contains("base")) {
        const json& b = j.at("base");
        reject_unknown_keys(b, {"e_ro", "p1", "p2", "t1", "t2", "t_g"}, "noise.base");
        n.base.e_ro = require<double>(b, "e_ro", "noise.base");
        n.base.p1 = require<double>(b, "p1", "noise.base");
        n.base.p2 = require<double>(b, "p2", "noise.base");
        n.base.t1 = require<double>(b, "t1", "noise.base");
        n.base.t2 = require<double>(b, "t2", "noise.base");
        n.base.t_g = require<double>(b, "t_g", "noise.base");
    }
    if (n.eta < 0.0) throw ConfigError("config: noise.eta must be non-negative");
    try {
        n.base.validate();
        if (n.enabled) (void)scale_noise(n.base, n.eta);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid noise model: ") + e.what());
    }
    return n;
}

SeedsConfig parse_seeds(const json& j) {
    reject_unknown_keys(j, {"circuit", "shadows", "optimizer"}, "seeds");
    SeedsConfig s;
    s.circuit = require<std::uint64_t>(j, "circuit", "seeds");
    s.shadows = require<std::uint64_t>(j, "shadows", "seeds");
    s.optimizer = require<std::uint64_t>(j, "optimizer", "seeds");
    return s;
}

AnnealGridConfig parse_anneal(const json& j) {
    reject_unknown_keys(j, {"t_finals", "dts", "depth_target"}, "anneal");
    AnnealGridConfig a;
    a.t_finals = require<std::vector<double>>(j, "t_finals", "anneal");
    a.dts = require<std::vector<double>>(j, "dts", "anneal");
    a.depth_target = optional_or<int>(j, "depth_target", "anneal", 200);
    if (a.t_finals.empty() || a.dts.empty())
        throw ConfigError("config: anneal grid must be non-empty");
    for (double t : a.t_finals)
        if (!(t > 0.0)) throw ConfigError("config: anneal.t_finals must be positive");
    for (double dt : a.dts)
        if (!(dt > 0.0)) throw ConfigError("config: anneal.dts must be positive");
    if (a.depth_target < 1) throw ConfigError("config: anneal.depth_target must be positive");
    return a;
}

AnalyzeConfig parse_analyze(const json& j) {
    reject_unknown_keys(
        j, {"s", "random_instances", "mera_file", "shadows_file", "forecast", "bound_eps"},
        "analyze");
    AnalyzeConfig a;
    a.s = optional_or<std::size_t>(j, "s", "analyze", 10000);
    a.random_instances = optional_or<int>(j, "random_instances", "analyze", 10);
    if (j.contains("mera_file")) a.mera_file = require<std::string>(j, "mera_file", "analyze");
    if (j.contains("shadows_file"))
        a.shadows_file = require<std::string>(j, "shadows_file", "analyze");
    if (j.contains("forecast")) {
        const json& f = j.at("forecast");
        reject_unknown_keys(f, {"var_ref", "s_ref", "delta_e", "f"}, "analyze.forecast");
        ForecastConfig fc;
        fc.var_ref = require<double>(f, "var_ref", "analyze.forecast");
        fc.s_ref = require<std::uint64_t>(f, "s_ref", "analyze.forecast");
        fc.delta_e = require<double>(f, "delta_e", "analyze.forecast");
        fc.f = require<double>(f, "f", "analyze.forecast");
        a.forecast = fc;
    }
    a.bound_eps = optional_or<double>(j, "bound_eps", "analyze", 0.1);
    if (a.s < 1) throw ConfigError("config: analyze.s must be at least 1");
    if (a.random_instances < 0)
        throw ConfigError("config: analyze.random_instances must be non-negative");
    if (!(a.bound_eps > 0.0)) throw ConfigError("config: analyze.bound_eps must be positive");
    return a;
}

}  // namespace

std::string ExperimentConfig::hash() const {
    // FNV-1a 64 over the canonical (sorted-key) dump
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_json) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

std::string ExperimentConfig::seeds_line() const {
    std::ostringstream out;
    out << "circuit:" << seeds.circuit << ",shadows:" << seeds.shadows
        << ",optimizer:" << seeds.optimizer;
    return out.str();
}

ExperimentConfig parse_config(const std::string& text, bool allow_large) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    reject_unknown_keys(j,
                        {"system", "schedule", "mera", "optimizer", "interface", "noise",
                         "seeds", "anneal", "analyze", "noisy_optimize"},
                        "the top level");

    ExperimentConfig cfg;
    if (!j.contains("system")) throw ConfigError("config: missing section 'system'");
    cfg.system = parse_system(j.at("system"), allow_large);
    if (!j.contains("schedule")) throw ConfigError("config: missing section 'schedule'");
    cfg.schedule = parse_schedule(j.at("schedule"));
    if (!j.contains("mera")) throw ConfigError("config: missing section 'mera'");
    cfg.mera = parse_mera(j.at("mera"), cfg.system.n);
    if (!j.contains("optimizer")) throw ConfigError("config: missing section 'optimizer'");
    cfg.optimizer = parse_optimizer(j.at("optimizer"));
    if (!j.contains("interface")) throw ConfigError("config: missing section 'interface'");
    cfg.interface_ = parse_interface(j.at("interface"));
    if (!j.contains("noise")) throw ConfigError("config: missing section 'noise'");
    cfg.noise = parse_noise(j.at("noise"));
    if (!j.contains("seeds")) throw ConfigError("config: missing section 'seeds'");
    cfg.seeds = parse_seeds(j.at("seeds"));
    if (j.contains("anneal")) cfg.anneal = parse_anneal(j.at("anneal"));
    if (j.contains("analyze")) cfg.analyze = parse_analyze(j.at("analyze"));
    if (j.contains("noisy_optimize")) {
        const json& no = j.at("noisy_optimize");
        reject_unknown_keys(no, {"qa_trajectories"}, "noisy_optimize");
        cfg.noisy_optimize.qa_trajectories =
            optional_or<int>(no, "qa_trajectories", "noisy_optimize", 200);
        if (cfg.noisy_optimize.qa_trajectories < 1)
            throw ConfigError("config: noisy_optimize.qa_trajectories must be positive");
    }

    cfg.canonical_json = j.dump();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, bool allow_large) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), allow_large);
}

}  // namespace hmera
