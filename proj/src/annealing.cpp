#include "hmera/annealing.hpp"

#include <cmath>

namespace hmera {

AnnealingSchedule::AnnealingSchedule(double t_final_, double dt_) : t_final(t_final_), dt(dt_) {
    if (!(t_final > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("AnnealingSchedule: t_final and dt must be positive");
    const double ratio = t_final / dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9)
        throw std::invalid_argument("AnnealingSchedule: t_final/dt must be a positive integer");
    n_steps_ = static_cast<int>(rounded);
}

StepAngles schedule_angles(const AnnealingSchedule& s, int k) {
    if (k < 0 || k >= s.n_steps())
        throw std::out_of_range("schedule_angles: step index out of range");
    const double tk = k * s.dt;
    const double j_mid = s.coupling(tk + s.dt / 2.0);
    const double lam_mid = s.field(tk + s.dt / 2.0);
    StepAngles a{};
    a.theta_odd = 2.0 * j_mid * s.dt;
    a.phi = 2.0 * lam_mid * s.dt / 2.0;
    a.theta_even_half = 2.0 * j_mid * s.dt / 2.0;
    const double j_next = s.coupling((k + 1) * s.dt + s.dt / 2.0);
    a.theta_even_merged = 2.0 * (j_mid + j_next) * s.dt / 2.0;
    return a;
}

namespace {

std::vector<std::pair<int, int>> bonds_with_parity(int n, Boundary boundary, int parity) {
    std::vector<std::pair<int, int>> bonds;
    for (int i = 0; i < n - 1; ++i)
        if (i % 2 == parity) bonds.emplace_back(i, i + 1);
    if (boundary == Boundary::Periodic && (n - 1) % 2 == parity) bonds.emplace_back(n - 1, 0);
    return bonds;
}

std::vector<Gate> rzz_layer(const std::vector<std::pair<int, int>>& bonds, double theta) {
    std::vector<Gate> layer;
    layer.reserve(bonds.size());
    for (auto [a, b] : bonds) layer.push_back(Gate::rzz(a, b, theta));
    return layer;
}

std::vector<Gate> rx_layer(int n, double phi) {
    std::vector<Gate> layer;
    layer.reserve(n);
    for (int q = 0; q < n; ++q) layer.push_back(Gate::rx(q, phi));
    return layer;
}

}  // namespace

Circuit build_annealing_circuit(const AnnealingSchedule& s, int n, Boundary boundary) {
    if (n < 2) throw std::invalid_argument("build_annealing_circuit: need at least 2 sites");
    if (boundary == Boundary::Periodic && n % 2 != 0)
        throw std::invalid_argument(
            "build_annealing_circuit: periodic boundary requires an even site count");

    const auto even_bonds = bonds_with_parity(n, boundary, 0);
    const auto odd_bonds = bonds_with_parity(n, boundary, 1);

    Circuit c(n);
    c.add_layer(rzz_layer(even_bonds, schedule_angles(s, 0).theta_even_half));
    for (int k = 0; k < s.n_steps(); ++k) {
        const StepAngles a = schedule_angles(s, k);
        c.add_layer(rx_layer(n, a.phi));
        c.add_layer(rzz_layer(odd_bonds, a.theta_odd));
        c.add_layer(rx_layer(n, a.phi));
        const bool last = k + 1 == s.n_steps();
        c.add_layer(rzz_layer(even_bonds, last ? a.theta_even_half : a.theta_even_merged));
    }
    return c;
}

Statevector run_annealing(const AnnealingSchedule& s, int n, Boundary boundary) {
    return apply_circuit(Statevector::all_minus(n), build_annealing_circuit(s, n, boundary));
}

}  // namespace hmera
