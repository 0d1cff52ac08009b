#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hmera/annealing.hpp"
#include "hmera/noise.hpp"
#include "hmera/riemannian.hpp"

namespace hmera {

struct SystemConfig {
    int n = 8;
    double j = -1.0;
    double lam = 1.0;
    Boundary boundary = Boundary::Periodic;
};

struct MeraConfig {
    int layers = 1;
    enum class Init { Identity, Random } init = Init::Identity;
};

struct OptimizerConfig {
    int steps = 1000;
    AdamParams adam;
};

struct InterfaceConfig {
    Interface kind = Interface::Exact;
    std::size_t s = 0;  // snapshots per pool (shadow)
    Protocol protocol = Protocol::ResampleIndependent;
};

struct NoiseConfig {
    bool enabled = false;
    double eta = 1.0;
    NoiseModel base = NoiseModel::representative();
};

struct SeedsConfig {
    std::uint64_t circuit = 0;
    std::uint64_t shadows = 0;
    std::uint64_t optimizer = 0;
};

struct AnnealGridConfig {
    std::vector<double> t_finals;
    std::vector<double> dts;
    int depth_target = 200;
};

struct ForecastConfig {
    double var_ref = 0.0;
    std::uint64_t s_ref = 0;
    double delta_e = 0.0;
    double f = 0.25;
};

struct AnalyzeConfig {
    std::size_t s = 10000;
    int random_instances = 10;
    std::optional<std::string> mera_file;
    std::optional<std::string> shadows_file;
    std::optional<ForecastConfig> forecast;
    double bound_eps = 0.1;
};

struct NoisyOptimizeConfig {
    int qa_trajectories = 200;
};

/// Deferred schedule parameters: sweeps snap non-integral grids to the
/// nearest step count, single runs construct the schedule directly (which
/// enforces integrality).
struct ScheduleParams {
    double t_final = 10.0;
    double dt = 0.1;
    AnnealingSchedule make() const { return AnnealingSchedule(t_final, dt); }
};

/// Parsed, validated experiment description. The schema is strict: unknown
/// keys anywhere reject the file, and all three seeds must be explicit.
struct ExperimentConfig {
    SystemConfig system;
    ScheduleParams schedule;
    MeraConfig mera;
    OptimizerConfig optimizer;
    InterfaceConfig interface_;
    NoiseConfig noise;
    SeedsConfig seeds;
    std::optional<AnnealGridConfig> anneal;
    std::optional<AnalyzeConfig> analyze;
    NoisyOptimizeConfig noisy_optimize;

    std::string canonical_json;  // sorted-key dump used for hashing

    std::string hash() const;
    std::string seeds_line() const;
};

ExperimentConfig load_config(const std::filesystem::path& path, bool allow_large = false);
ExperimentConfig parse_config(const std::string& text, bool allow_large = false);

}  // namespace hmera
