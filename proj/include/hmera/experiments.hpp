#pragma once

#include <filesystem>

#include "hmera/config.hpp"

namespace hmera {

/// Implementations of the CLI subcommands. Each writes deterministic CSV/JSON
/// artifacts into out_dir; every file carries the config hash and seeds.

/// Sweeps the (t_final, dt) grid; fractional step counts snap to the nearest
/// integer and the effective dt is reported alongside the requested one. One
/// cell per t_final is marked as the closest match to the depth target.
void cmd_anneal(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// One optimization run: trace CSV, summary JSON and the final network.
void cmd_optimize(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Runs all four snapshot-pool protocols on identical seeds and records both
/// the in-protocol estimates and exact re-evaluations of every iterate.
void cmd_protocol_study(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Shadow optimization against noisy trajectories, with exact re-evaluations
/// against the noiseless annealing state.
void cmd_noisy_optimize(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Weight-resolved variance tables, snapshot-budget forecast and worst-case
/// measurement bounds.
void cmd_analyze(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Samples a snapshot set (ideal, or noisy when noise is enabled) to JSONL.
void cmd_shadows_sample(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace hmera
