#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hmera/pauli.hpp"
#include "hmera/util.hpp"

namespace hmera {

/// Dense state of n qubits, 2^n amplitudes. Qubit 0 is the most significant
/// bit of the amplitude index. Normalization is never adjusted silently;
/// normalize() is the only place the norm changes.
struct Statevector {
    int n_qubits = 0;
    std::vector<cplx> amps;

    Statevector() = default;
    explicit Statevector(int n) : n_qubits(n), amps(std::size_t{1} << n, cplx{0.0}) {}

    static Statevector computational_zero(int n);
    /// |-> on every qubit: the ground state of +sum_i X_i.
    static Statevector all_minus(int n);

    std::size_t dim() const { return amps.size(); }
    double norm() const;
    /// Rescales to unit norm and returns the norm prior to rescaling.
    double normalize();
};

cplx inner(const Statevector& a, const Statevector& b);

/// out += coeff * P|in> for a single Pauli string.
void add_pauli_apply(const std::vector<cplx>& in, std::vector<cplx>& out, int n_qubits,
                     const PauliTerm& term);

/// H|psi> for a PauliSum.
Statevector apply_pauli_sum(const Statevector& psi, const PauliSum& h);

/// <psi|H|psi>; asserts the imaginary residual is below 1e-10.
double energy(const Statevector& psi, const PauliSum& h);

/// <psi|A|psi> for an operator on an explicit support.
double energy(const Statevector& psi, const SupportedOperator& op);
double energy(const Statevector& psi, const std::vector<SupportedOperator>& ops);

/// In-place block-unitary application on raw amplitudes. qubits[0] is the most
/// significant factor of the matrix index.
void apply_block_inplace(std::vector<cplx>& amps, int n_qubits, const std::vector<int>& qubits,
                         const Eigen::MatrixXcd& matrix);

}  // namespace hmera
