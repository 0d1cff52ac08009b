#pragma once

#include <optional>
#include <vector>

#include "hmera/circuit.hpp"
#include "hmera/pauli.hpp"
#include "hmera/statevector.hpp"

namespace hmera {

struct GroundTruth {
    double e0 = 0.0;
    std::optional<Statevector> vector;
};

/// Lowest eigenpair of the Hamiltonian. Dense Hermitian solve up to 10 qubits,
/// Lanczos with full reorthogonalization above (n <= 14); either way the
/// residual ||Hv - e0 v|| is checked to 1e-9.
GroundTruth dense_ground_state(const PauliSum& h);

/// Full sorted spectrum via dense solve (n <= 8; test support).
std::vector<double> dense_spectrum(const PauliSum& h);

/// Open-chain transverse-field Ising ground energy from the Jordan-Wigner
/// single-particle problem: minus half the positive spectrum of the 2n x 2n
/// Bogoliubov-de-Gennes matrix.
double tfim_free_fermion_energy(int n, double j, double lam);

double relative_error(double e, double e0);

/// Layered depth over gates touching two or more qubits.
int two_qubit_depth(const Circuit& c);

}  // namespace hmera
