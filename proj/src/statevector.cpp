#include "hmera/statevector.hpp"

#include <bit>
#include <cmath>

namespace hmera {

Statevector Statevector::computational_zero(int n) {
    Statevector psi(n);
    psi.amps[0] = 1.0;
    return psi;
}

Statevector Statevector::all_minus(int n) {
    Statevector psi(n);
    const double a = std::pow(0.5, n / 2.0);
    for (std::size_t i = 0; i < psi.dim(); ++i)
        psi.amps[i] = (std::popcount(i) & 1) ? -a : a;
    return psi;
}

double Statevector::norm() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return std::sqrt(s);
}

double Statevector::normalize() {
    const double n = norm();
    if (n == 0.0) throw NumericalError("Statevector::normalize: zero state");
    const double inv = 1.0 / n;
    for (auto& a : amps) a *= inv;
    return n;
}

cplx inner(const Statevector& a, const Statevector& b) {
    if (a.n_qubits != b.n_qubits)
        throw std::invalid_argument("inner: qubit count mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amps[i]) * b.amps[i];
    return s;
}

void add_pauli_apply(const std::vector<cplx>& in, std::vector<cplx>& out, int n_qubits,
                     const PauliTerm& term) {
    const int n = n_qubits;
    std::uint64_t flip = 0, zmask = 0;
    int n_y = 0;
    for (int q = 0; q < n; ++q) {
        const std::uint64_t bit = 1ULL << (n - 1 - q);
        switch (term.string.axes[q]) {
            case Axis::I: break;
            case Axis::X: flip |= bit; break;
            case Axis::Y: flip |= bit; zmask |= bit; ++n_y; break;
            case Axis::Z: zmask |= bit; break;
        }
    }
    static const cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx pref = term.coeff * i_pow[n_y % 4];
    const std::size_t dim = in.size();
    for (std::size_t i = 0; i < dim; ++i) {
        const cplx ph = (std::popcount(i & zmask) & 1) ? -pref : pref;
        out[i ^ flip] += ph * in[i];
    }
}

Statevector apply_pauli_sum(const Statevector& psi, const PauliSum& h) {
    if (psi.n_qubits != h.n_qubits())
        throw std::invalid_argument("apply_pauli_sum: qubit count mismatch");
    Statevector out(psi.n_qubits);
    for (const auto& t : h.terms()) add_pauli_apply(psi.amps, out.amps, psi.n_qubits, t);
    return out;
}

double energy(const Statevector& psi, const PauliSum& h) {
    const cplx e = inner(psi, apply_pauli_sum(psi, h));
    if (std::abs(e.imag()) > 1e-10)
        throw NumericalError("energy: imaginary residual " + format_double(e.imag()));
    return e.real();
}

double energy(const Statevector& psi, const SupportedOperator& op) {
    std::vector<cplx> work = psi.amps;
    apply_block_inplace(work, psi.n_qubits, op.support, op.matrix);
    cplx e = 0.0;
    for (std::size_t i = 0; i < work.size(); ++i) e += std::conj(psi.amps[i]) * work[i];
    if (std::abs(e.imag()) > 1e-10)
        throw NumericalError("energy: imaginary residual " + format_double(e.imag()));
    return e.real();
}

double energy(const Statevector& psi, const std::vector<SupportedOperator>& ops) {
    std::vector<double> parts(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) parts[i] = energy(psi, ops[i]);
    return pairwise_sum(parts);
}

void apply_block_inplace(std::vector<cplx>& amps, int n_qubits, const std::vector<int>& qubits,
                         const Eigen::MatrixXcd& matrix) {
    const int n = n_qubits;
    const int k = static_cast<int>(qubits.size());
    const std::size_t bdim = 1ULL << k;
    if (matrix.rows() != static_cast<Eigen::Index>(bdim) || matrix.cols() != matrix.rows())
        throw std::invalid_argument("apply_block: matrix dimension mismatch");
    std::uint64_t block_mask = 0;
    std::vector<int> shifts(k);
    for (int t = 0; t < k; ++t) {
        const int q = qubits[t];
        if (q < 0 || q >= n) throw std::invalid_argument("apply_block: qubit index out of range");
        shifts[t] = n - 1 - q;
        block_mask |= 1ULL << shifts[t];
    }
    if (std::popcount(block_mask) != k)
        throw std::invalid_argument("apply_block: repeated qubit index");

    // Full index for every block pattern, given a base index with block bits 0.
    std::vector<std::uint64_t> pattern(bdim, 0);
    for (std::size_t b = 0; b < bdim; ++b)
        for (int t = 0; t < k; ++t)
            if ((b >> (k - 1 - t)) & 1) pattern[b] |= 1ULL << shifts[t];

    const std::size_t dim = amps.size();
    std::vector<cplx> gathered(bdim), mixed(bdim);
    for (std::uint64_t base = 0;; base = ((base | block_mask) + 1) & ~block_mask) {
        for (std::size_t b = 0; b < bdim; ++b) gathered[b] = amps[base | pattern[b]];
        for (std::size_t a = 0; a < bdim; ++a) {
            cplx acc = 0.0;
            for (std::size_t b = 0; b < bdim; ++b) acc += matrix(a, b) * gathered[b];
            mixed[a] = acc;
        }
        for (std::size_t a = 0; a < bdim; ++a) amps[base | pattern[a]] = mixed[a];
        if (((base | block_mask) + 1) >= dim) break;
    }
}

}  // namespace hmera
