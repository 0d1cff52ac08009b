#include "hmera/noise.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "hmera/util.hpp"

namespace hmera {

NoiseModel NoiseModel::representative() {
    NoiseModel m;
    m.e_ro = 1e-2;
    m.p1 = 3e-4;
    m.p2 = 3e-3;
    m.t1 = 300.0;
    m.t2 = 200.0;
    m.t_g = 0.07;
    return m;
}

bool NoiseModel::is_noiseless() const {
    return e_ro == 0.0 && p1 == 0.0 && p2 == 0.0 && std::isinf(t1) && std::isinf(t2);
}

void NoiseModel::validate() const {
    auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob_ok(e_ro) || !prob_ok(p1) || !prob_ok(p2))
        throw std::invalid_argument("NoiseModel: probabilities must lie in [0, 1]");
    if (!(t1 > 0.0) || !(t2 > 0.0) || !(t_g > 0.0))
        throw std::invalid_argument("NoiseModel: t1, t2, t_g must be positive");
    if (t2 > 2.0 * t1)
        throw std::invalid_argument("NoiseModel: t2 must not exceed 2*t1");
}

NoiseModel scale_noise(const NoiseModel& m, double eta) {
    m.validate();
    if (eta < 0.0) throw std::domain_error("scale_noise: eta must be non-negative");
    if (eta * m.e_ro > 1.0 || eta * m.p1 > 1.0 || eta * m.p2 > 1.0)
        throw std::domain_error("scale_noise: scaled probability exceeds 1");

    NoiseModel out = m;
    out.e_ro = eta * m.e_ro;
    out.p1 = eta * m.p1;
    out.p2 = eta * m.p2;
    auto scale_time = [&](double t) {
        const double per_gate = 1.0 - std::exp(-m.t_g / t);  // 0 when t is infinite
        const double scaled = eta * per_gate;
        if (scaled >= 1.0)
            throw std::domain_error("scale_noise: scaled relaxation probability reaches 1");
        if (scaled == 0.0) return NoiseModel::kInfiniteTime;
        return -m.t_g / std::log1p(-scaled);
    };
    out.t1 = scale_time(m.t1);
    out.t2 = scale_time(m.t2);
    out.validate();
    return out;
}

namespace {

void apply_pauli_on_qubit(std::vector<cplx>& amps, int n, int q, int axis) {
    const std::uint64_t bit = 1ULL << (n - 1 - q);
    const std::size_t dim = amps.size();
    switch (axis) {
        case 1:  // X
            for (std::size_t i = 0; i < dim; ++i)
                if (!(i & bit)) std::swap(amps[i], amps[i | bit]);
            break;
        case 2:  // Y
            for (std::size_t i = 0; i < dim; ++i)
                if (!(i & bit)) {
                    const cplx a0 = amps[i], a1 = amps[i | bit];
                    amps[i] = cplx(0, -1) * a1;
                    amps[i | bit] = cplx(0, 1) * a0;
                }
            break;
        case 3:  // Z
            for (std::size_t i = 0; i < dim; ++i)
                if (i & bit) amps[i] = -amps[i];
            break;
        default:
            break;
    }
}

double prob_one(const std::vector<cplx>& amps, int n, int q) {
    const std::uint64_t bit = 1ULL << (n - 1 - q);
    double p = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i)
        if (i & bit) p += std::norm(amps[i]);
    return p;
}

void renormalize(std::vector<cplx>& amps) {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    if (s <= 0.0) throw NumericalError("run_noisy_trajectory: state collapsed to zero");
    const double inv = 1.0 / std::sqrt(s);
    for (auto& a : amps) a *= inv;
}

// Quantum-jump amplitude damping for one qubit: jump |1>->|0> with probability
// gamma * P(1), otherwise the no-jump Kraus diag(1, sqrt(1-gamma)).
void amplitude_damp(std::vector<cplx>& amps, int n, int q, double gamma, std::mt19937_64& rng) {
    if (gamma <= 0.0) return;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double p1 = prob_one(amps, n, q);
    const std::uint64_t bit = 1ULL << (n - 1 - q);
    const std::size_t dim = amps.size();
    if (unif(rng) < gamma * p1) {
        // jump: |0> component annihilated, |1> component moved down
        for (std::size_t i = 0; i < dim; ++i) {
            if (i & bit) {
                amps[i ^ bit] = amps[i];
                amps[i] = 0.0;
            }
        }
        renormalize(amps);
    } else {
        const double damp = std::sqrt(1.0 - gamma);
        for (std::size_t i = 0; i < dim; ++i)
            if (i & bit) amps[i] *= damp;
        renormalize(amps);
    }
}

}  // namespace

Statevector run_noisy_trajectory(const Circuit& c, const NoiseModel& m, std::uint64_t seed) {
    m.validate();
    Statevector psi = Statevector::all_minus(c.n_qubits());
    if (m.is_noiseless()) return apply_circuit(psi, c);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = c.n_qubits();

    const double gamma1 = std::isinf(m.t1) ? 0.0 : 1.0 - std::exp(-m.t_g / m.t1);
    // Pure dephasing after removing the T1 contribution: 1/Tphi = 1/T2 - 1/(2 T1).
    double p_z = 0.0;
    if (!std::isinf(m.t2)) {
        const double inv_tphi = 1.0 / m.t2 - (std::isinf(m.t1) ? 0.0 : 0.5 / m.t1);
        if (inv_tphi > 0.0) p_z = 0.5 * (1.0 - std::exp(-m.t_g * inv_tphi));
    }

    for (std::size_t layer = 0; layer < c.n_layers(); ++layer) {
        auto [b, e] = c.layer_range(layer);
        for (std::size_t gi = b; gi < e; ++gi) {
            const Gate& g = c.gates()[gi];
            apply_gate_inplace(psi.amps, n, g);
            const double p_depol = g.qubits.size() == 1 ? m.p1 : m.p2;
            if (p_depol > 0.0 && unif(rng) < p_depol) {
                const std::uint64_t n_paulis = (1ULL << (2 * g.qubits.size())) - 1;
                std::uniform_int_distribution<std::uint64_t> pick(1, n_paulis);
                std::uint64_t code = pick(rng);
                for (std::size_t t = 0; t < g.qubits.size(); ++t) {
                    const int axis = static_cast<int>((code >> (2 * t)) & 3);
                    apply_pauli_on_qubit(psi.amps, n, g.qubits[t], axis);
                }
            }
        }
        for (int q = 0; q < n; ++q) {
            amplitude_damp(psi.amps, n, q, gamma1, rng);
            if (p_z > 0.0 && unif(rng) < p_z) apply_pauli_on_qubit(psi.amps, n, q, 3);
        }
    }
    return psi;
}

double noisy_mean_energy(const Circuit& c, const NoiseModel& m, const PauliSum& h, int n_traj,
                         std::uint64_t seed) {
    if (n_traj < 1) throw std::invalid_argument("noisy_mean_energy: need at least one trajectory");
    std::vector<double> energies(n_traj);
    parallel_for(n_traj, [&](std::size_t i) {
        const Statevector psi = run_noisy_trajectory(c, m, derive_seed(seed, i));
        energies[i] = energy(psi, h);
    });
    return pairwise_sum(energies) / n_traj;
}

}  // namespace hmera
