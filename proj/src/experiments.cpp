#include "hmera/experiments.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hmera/mera.hpp"
#include "hmera/oracle.hpp"
#include "json.hpp"

namespace hmera {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- shared artifact plumbing ----------------------------------------------

class CsvFile {
public:
    CsvFile(const fs::path& path, const ExperimentConfig& cfg,
            const std::vector<std::string>& columns) {
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot open output file " + path.string());
        out_ << "# config_hash=" << cfg.hash() << "\n";
        out_ << "# seeds=" << cfg.seeds_line() << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }

private:
    std::ofstream out_;
};

std::string fmt(double v) { return format_double(v); }

void write_json(const fs::path& path, json j, const ExperimentConfig& cfg) {
    j["config_hash"] = cfg.hash();
    j["seeds"] = {{"circuit", cfg.seeds.circuit},
                  {"shadows", cfg.seeds.shadows},
                  {"optimizer", cfg.seeds.optimizer}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    out << j.dump(2) << "\n";
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string());
}

PauliSum hamiltonian_of(const ExperimentConfig& cfg) {
    return build_tfim(cfg.system.n, cfg.system.j, cfg.system.lam, cfg.system.boundary);
}

Mera initial_mera(const ExperimentConfig& cfg) {
    return cfg.mera.init == MeraConfig::Init::Identity
               ? Mera::identity(cfg.system.n, cfg.mera.layers)
               : Mera::random(cfg.system.n, cfg.mera.layers, cfg.seeds.optimizer);
}

OptimizeOptions optimize_options(const ExperimentConfig& cfg) {
    OptimizeOptions opt;
    opt.interface_kind = cfg.interface_.kind;
    opt.protocol = cfg.interface_.protocol;
    opt.steps = cfg.optimizer.steps;
    opt.shadow_samples = cfg.interface_.s;
    opt.shadow_seed = cfg.seeds.shadows;
    opt.adam = cfg.optimizer.adam;
    return opt;
}

void write_trace_csv(const fs::path& path, const ExperimentConfig& cfg,
                     const OptimizationTrace& trace) {
    CsvFile csv(path, cfg, {"step", "energy", "std_err"});
    for (const auto& rec : trace.records)
        csv.row({std::to_string(rec.step), fmt(rec.energy), fmt(rec.std_err)});
}

void write_reeval_csv(const fs::path& path, const ExperimentConfig& cfg,
                      const OptimizationTrace& trace) {
    CsvFile csv(path, cfg, {"step", "energy_exact"});
    for (std::size_t i = 0; i < trace.exact_reeval.size(); ++i)
        csv.row({std::to_string(trace.records[i].step), fmt(trace.exact_reeval[i])});
}

// ---- anneal -----------------------------------------------------------------

struct GridCell {
    double t_final;
    double dt_requested;
    double dt_effective;
    int n_steps;
    double energy_value;
    double rel_error;
    int depth;
    bool depth_pick = false;
};

}  // namespace

void cmd_anneal(const ExperimentConfig& cfg, const fs::path& out_dir) {
    if (!cfg.anneal)
        throw ConfigError("anneal: config needs an 'anneal' section with the sweep grid");
    ensure_dir(out_dir);
    const AnnealGridConfig& grid = *cfg.anneal;
    const PauliSum h = hamiltonian_of(cfg);
    const double e0 = dense_ground_state(h).e0;

    std::vector<GridCell> cells;
    for (double t_final : grid.t_finals) {
        for (double dt : grid.dts) {
            GridCell cell;
            cell.t_final = t_final;
            cell.dt_requested = dt;
            cell.n_steps = std::max(1, static_cast<int>(std::round(t_final / dt)));
            cell.dt_effective = t_final / cell.n_steps;
            const AnnealingSchedule s(t_final, cell.dt_effective);
            const Circuit c = build_annealing_circuit(s, cfg.system.n, cfg.system.boundary);
            cell.depth = two_qubit_depth(c);
            const Statevector psi = apply_circuit(Statevector::all_minus(cfg.system.n), c);
            cell.energy_value = energy(psi, h);
            cell.rel_error = relative_error(cell.energy_value, e0);
            cells.push_back(cell);
        }
    }

    // per t_final, mark the cell whose depth is nearest the target
    // (ties toward smaller dt)
    for (double t_final : grid.t_finals) {
        GridCell* best = nullptr;
        for (auto& cell : cells) {
            if (cell.t_final != t_final) continue;
            if (!best) {
                best = &cell;
                continue;
            }
            const int d_new = std::abs(cell.depth - grid.depth_target);
            const int d_old = std::abs(best->depth - grid.depth_target);
            if (d_new < d_old ||
                (d_new == d_old && cell.dt_requested < best->dt_requested))
                best = &cell;
        }
        if (best) best->depth_pick = true;
    }

    CsvFile csv(out_dir / "anneal.csv", cfg,
                {"t_final", "dt", "dt_effective", "n_steps", "energy", "e_exact",
                 "relative_error", "two_qubit_depth", "depth_pick"});
    for (const auto& cell : cells)
        csv.row({fmt(cell.t_final), fmt(cell.dt_requested), fmt(cell.dt_effective),
                 std::to_string(cell.n_steps), fmt(cell.energy_value), fmt(e0),
                 fmt(cell.rel_error), std::to_string(cell.depth),
                 cell.depth_pick ? "1" : "0"});

    write_json(out_dir / "anneal_summary.json",
               {{"e_exact", e0},
                {"cells", cells.size()},
                {"depth_target", grid.depth_target}},
               cfg);
}

void cmd_optimize(const ExperimentConfig& cfg, const fs::path& out_dir) {
    if (cfg.noise.enabled)
        throw ConfigError("optimize: noise must be disabled here; use noisy-optimize");
    ensure_dir(out_dir);
    const PauliSum h = hamiltonian_of(cfg);
    const Statevector psi = run_annealing(cfg.schedule.make(), cfg.system.n,
                                          cfg.system.boundary);
    const double e_qa = energy(psi, h);
    const double e0 = dense_ground_state(h).e0;

    OptimizeOptions opt = optimize_options(cfg);
    opt.record_exact_reeval = cfg.interface_.kind == Interface::Shadow;
    opt.track_isometry_residual = true;
    PoolSampler sampler;
    if (cfg.interface_.kind == Interface::Shadow)
        sampler = [&](std::uint64_t seed) {
            return sample_snapshots(psi, cfg.interface_.s, seed);
        };

    const OptimizationTrace trace = optimize(initial_mera(cfg), h, psi, opt, sampler);

    write_trace_csv(out_dir / "optimize_trace.csv", cfg, trace);
    if (!trace.exact_reeval.empty())
        write_reeval_csv(out_dir / "optimize_reeval.csv", cfg, trace);
    save_mera(trace.final_mera, out_dir / "mera_final.json");

    const double e_final_exact = energy_exact(trace.final_mera, psi, h);
    json summary = {
        {"e_qa", e_qa},
        {"e_exact", e0},
        {"e_final_estimate", trace.records.back().energy},
        {"e_final_exact", e_final_exact},
        {"rel_error_qa", relative_error(e_qa, e0)},
        {"rel_error_final", relative_error(e_final_exact, e0)},
        {"improvement_ratio",
         relative_error(e_final_exact, e0) > 0.0
             ? relative_error(e_qa, e0) / relative_error(e_final_exact, e0)
             : std::numeric_limits<double>::infinity()},
        {"steps", trace.records.back().step},
        {"early_stopped", trace.early_stopped},
        {"max_isometry_residual", trace.max_isometry_residual},
        {"wall_time_s", trace.records.back().wall_time_s},
    };
    if (cfg.interface_.kind == Interface::Shadow)
        summary["final_std_err"] = trace.records.back().std_err;
    write_json(out_dir / "optimize_summary.json", std::move(summary), cfg);
}

void cmd_protocol_study(const ExperimentConfig& cfg, const fs::path& out_dir) {
    if (cfg.interface_.kind != Interface::Shadow)
        throw ConfigError("protocol-study: requires the shadow interface");
    if (cfg.noise.enabled)
        throw ConfigError("protocol-study: noise must be disabled here");
    ensure_dir(out_dir);
    const PauliSum h = hamiltonian_of(cfg);
    const Statevector psi = run_annealing(cfg.schedule.make(), cfg.system.n,
                                          cfg.system.boundary);
    const double e0 = dense_ground_state(h).e0;

    const PoolSampler sampler = [&](std::uint64_t seed) {
        return sample_snapshots(psi, cfg.interface_.s, seed);
    };

    json per_protocol = json::object();
    for (Protocol p : {Protocol::FixedShared, Protocol::FixedSplit, Protocol::ResampleShared,
                       Protocol::ResampleIndependent}) {
        OptimizeOptions opt = optimize_options(cfg);
        opt.protocol = p;
        opt.record_exact_reeval = true;
        const OptimizationTrace trace = optimize(initial_mera(cfg), h, psi, opt, sampler);

        const std::string name = protocol_name(p);
        write_trace_csv(out_dir / ("protocol_" + name + "_trace.csv"), cfg, trace);
        write_reeval_csv(out_dir / ("protocol_" + name + "_reeval.csv"), cfg, trace);

        double min_energy = trace.records.front().energy;
        int min_step = 0;
        double max_std_err = 0.0;
        for (const auto& rec : trace.records) {
            if (rec.energy < min_energy) {
                min_energy = rec.energy;
                min_step = rec.step;
            }
            max_std_err = std::max(max_std_err, rec.std_err);
        }
        per_protocol[name] = {
            {"min_energy", min_energy},
            {"min_energy_step", min_step},
            {"final_energy", trace.records.back().energy},
            {"final_exact", trace.exact_reeval.back()},
            {"max_std_err", max_std_err},
        };
    }
    write_json(out_dir / "protocol_summary.json",
               {{"e_exact", e0}, {"protocols", std::move(per_protocol)}}, cfg);
}

void cmd_noisy_optimize(const ExperimentConfig& cfg, const fs::path& out_dir) {
    if (!cfg.noise.enabled) throw ConfigError("noisy-optimize: noise must be enabled");
    if (cfg.interface_.kind != Interface::Shadow)
        throw ConfigError("noisy-optimize: requires the shadow interface");
    ensure_dir(out_dir);
    const PauliSum h = hamiltonian_of(cfg);
    const AnnealingSchedule schedule = cfg.schedule.make();
    const Circuit circuit = build_annealing_circuit(schedule, cfg.system.n,
                                                    cfg.system.boundary);
    const Statevector psi_clean = apply_circuit(Statevector::all_minus(cfg.system.n), circuit);
    const double e_qa_clean = energy(psi_clean, h);
    const double e0 = dense_ground_state(h).e0;

    const NoiseModel scaled = scale_noise(cfg.noise.base, cfg.noise.eta);
    std::ostringstream tag;
    tag << "noisy(eta=" << format_double(cfg.noise.eta) << ")";
    const std::string source_tag = tag.str();

    const double e_qa_noisy = noisy_mean_energy(circuit, scaled, h,
                                                cfg.noisy_optimize.qa_trajectories,
                                                cfg.seeds.circuit);

    const PoolSampler sampler = [&](std::uint64_t seed) {
        return sample_snapshots_noisy(circuit, scaled, cfg.interface_.s, seed, source_tag);
    };

    OptimizeOptions opt = optimize_options(cfg);
    opt.record_exact_reeval = true;  // against the noiseless annealing state
    const OptimizationTrace trace = optimize(initial_mera(cfg), h, psi_clean, opt, sampler);

    write_trace_csv(out_dir / "noisy_trace.csv", cfg, trace);
    write_reeval_csv(out_dir / "noisy_reeval.csv", cfg, trace);
    save_mera(trace.final_mera, out_dir / "mera_final.json");

    write_json(out_dir / "noisy_summary.json",
               {{"eta", cfg.noise.eta},
                {"e_exact", e0},
                {"e_qa_noiseless", e_qa_clean},
                {"e_qa_noisy", e_qa_noisy},
                {"qa_trajectories", cfg.noisy_optimize.qa_trajectories},
                {"e_final_estimate", trace.records.back().energy},
                {"e_final_exact_reeval", trace.exact_reeval.back()},
                {"rel_error_qa_noisy", relative_error(e_qa_noisy, e0)},
                {"rel_error_final_reeval", relative_error(trace.exact_reeval.back(), e0)}},
               cfg);
}

void cmd_analyze(const ExperimentConfig& cfg, const fs::path& out_dir) {
    if (!cfg.analyze)
        throw ConfigError("analyze: config needs an 'analyze' section");
    ensure_dir(out_dir);
    const AnalyzeConfig& an = *cfg.analyze;
    const PauliSum h = hamiltonian_of(cfg);
    const Statevector psi = run_annealing(cfg.schedule.make(), cfg.system.n,
                                          cfg.system.boundary);

    ShadowSet set;
    if (an.shadows_file) {
        set = load_jsonl(*an.shadows_file);
        if (set.n_qubits != cfg.system.n)
            throw ConfigError("analyze: shadows file register size mismatch");
    } else {
        set = sample_snapshots(psi, an.s, cfg.seeds.shadows);
    }

    CsvFile csv(out_dir / "analyze_cw.csv", cfg, {"case", "weight", "c_w"});
    json totals = json::object();

    auto emit = [&](const std::string& name, const PauliSum& observable) {
        const auto wrv = weight_resolved_variance(set, observable);
        for (const auto& [w, c] : wrv.c_w)
            csv.row({name, std::to_string(w), fmt(c)});
        totals[name] = wrv.total;
        return wrv.total;
    };

    emit("original", h);

    if (an.mera_file) {
        const Mera m = load_mera(*an.mera_file);
        if (m.n_sites() != cfg.system.n)
            throw ConfigError("analyze: network file register size mismatch");
        emit("mera", transformed_pauli_sum(m, h));
    }

    if (an.random_instances > 0) {
        std::map<int, double> mean_cw;
        double mean_total = 0.0;
        for (int k = 0; k < an.random_instances; ++k) {
            const Mera m = Mera::random(cfg.system.n, cfg.mera.layers,
                                        derive_seed(cfg.seeds.optimizer, k));
            const auto wrv = weight_resolved_variance(set, transformed_pauli_sum(m, h));
            for (const auto& [w, c] : wrv.c_w) mean_cw[w] += c;
            mean_total += wrv.total;
        }
        for (auto& [w, c] : mean_cw) c /= an.random_instances;
        mean_total /= an.random_instances;
        for (const auto& [w, c] : mean_cw)
            csv.row({"random_mean", std::to_string(w), fmt(c)});
        totals["random_mean"] = mean_total;
    }

    json summary = {{"totals", std::move(totals)},
                    {"s_used", set.size()},
                    {"worst_case", json::object()}};
    for (int l : {1, 2}) {
        double max_norm = 0.0;
        for (const auto& t : h.terms()) max_norm = std::max(max_norm, std::abs(t.coeff));
        summary["worst_case"]["l" + std::to_string(l)] = {
            {"bound",
             worst_case_bound(h.size(), an.bound_eps, LocalityInput::layers(l), max_norm)},
            {"locality", worst_case_locality(l)},
        };
    }
    summary["worst_case"]["eps"] = an.bound_eps;
    if (an.forecast) {
        summary["forecast"] = {
            {"var_ref", an.forecast->var_ref},
            {"s_ref", an.forecast->s_ref},
            {"delta_e", an.forecast->delta_e},
            {"f", an.forecast->f},
            {"required_snapshots",
             required_snapshots(an.forecast->var_ref, an.forecast->s_ref,
                                an.forecast->delta_e, an.forecast->f)},
        };
    }
    write_json(out_dir / "analyze_summary.json", std::move(summary), cfg);
}

void cmd_shadows_sample(const ExperimentConfig& cfg, const fs::path& out_dir) {
    if (cfg.interface_.kind != Interface::Shadow)
        throw ConfigError("shadows-sample: requires the shadow interface (for the pool size)");
    ensure_dir(out_dir);
    const AnnealingSchedule schedule = cfg.schedule.make();
    ShadowSet set;
    if (cfg.noise.enabled) {
        const Circuit circuit = build_annealing_circuit(schedule, cfg.system.n,
                                                        cfg.system.boundary);
        const NoiseModel scaled = scale_noise(cfg.noise.base, cfg.noise.eta);
        std::ostringstream tag;
        tag << "noisy(eta=" << format_double(cfg.noise.eta) << ")";
        set = sample_snapshots_noisy(circuit, scaled, cfg.interface_.s, cfg.seeds.shadows,
                                     tag.str());
    } else {
        const Statevector psi = run_annealing(schedule, cfg.system.n, cfg.system.boundary);
        set = sample_snapshots(psi, cfg.interface_.s, cfg.seeds.shadows);
    }
    save_jsonl(set, out_dir / "shadows.jsonl");
    write_json(out_dir / "shadows_summary.json",
               {{"s", set.size()}, {"source", set.meta.source}}, cfg);
}

}  // namespace hmera
