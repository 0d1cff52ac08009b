#pragma once

#include <cstdint>
#include <limits>

#include "hmera/circuit.hpp"

namespace hmera {

/// Synthetic gate-level noise model: per-qubit readout flips, depolarizing
/// errors after 1- and 2-qubit gates, and T1/T2 relaxation applied once per
/// gate layer for the longest gate duration t_g. Times share one unit.
struct NoiseModel {
    double e_ro = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double t1 = kInfiniteTime;
    double t2 = kInfiniteTime;
    double t_g = 1.0;

    static constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

    static NoiseModel noiseless() { return {}; }
    /// Representative superconducting-transmon figures (readout 1e-2,
    /// depolarizing 3e-4 / 3e-3, T1 300us, T2 200us, t_g 70ns), in microseconds.
    /// Synthetic values, not a calibration of any particular device.
    static NoiseModel representative();

    bool is_noiseless() const;
    void validate() const;
};

/// Rescales every error source so the per-gate error probability scales by
/// eta. Readout and depolarizing probabilities scale linearly; relaxation
/// times become t~ = -t_g / ln(1 - eta (1 - e^{-t_g/t})).
NoiseModel scale_noise(const NoiseModel& m, double eta);

/// One Monte-Carlo quantum-jump trajectory of the circuit under the model.
/// Deterministic given (seed, circuit, model). Readout errors are not part of
/// the trajectory; they act at sampling time only.
Statevector run_noisy_trajectory(const Circuit& c, const NoiseModel& m, std::uint64_t seed);

/// Mean energy of h over n_traj independent trajectories (seeds derived from
/// seed in index order).
double noisy_mean_energy(const Circuit& c, const NoiseModel& m, const PauliSum& h, int n_traj,
                         std::uint64_t seed);

}  // namespace hmera
