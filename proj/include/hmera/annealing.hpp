#pragma once

#include "hmera/circuit.hpp"
#include "hmera/pauli.hpp"

namespace hmera {

/// Linear ramp J(t) = -t/t_final at constant transverse field lambda(t) = 1,
/// discretized into n_steps = t_final/dt Trotter steps (must be integral).
struct AnnealingSchedule {
    double t_final = 10.0;
    double dt = 0.1;

    AnnealingSchedule(double t_final_, double dt_);

    int n_steps() const { return n_steps_; }
    double coupling(double t) const { return -t / t_final; }
    double field(double /*t*/) const { return 1.0; }

private:
    int n_steps_ = 0;
};

/// RZZ/RX angles for Trotter step k. The even-bond rotation appears as a half
/// angle at the circuit boundaries and as the merged two-step angle inside.
struct StepAngles {
    double theta_odd;
    double phi;
    double theta_even_half;
    double theta_even_merged;
};

StepAngles schedule_angles(const AnnealingSchedule& s, int k);

/// Second-order Trotter circuit for the ramped Ising evolution. Even bonds are
/// (i,i+1) with even i, odd bonds with odd i; the periodic wrap bond is
/// classified by its left index. Periodic chains require even n.
Circuit build_annealing_circuit(const AnnealingSchedule& s, int n, Boundary boundary);

/// Runs the annealing circuit on the |->^n product state.
Statevector run_annealing(const AnnealingSchedule& s, int n, Boundary boundary);

}  // namespace hmera
