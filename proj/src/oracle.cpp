#include "hmera/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace hmera {

namespace {

constexpr int kDenseSolveCap = 10;

GroundTruth dense_lowest(const PauliSum& h) {
    const auto op = to_dense(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.matrix);
    if (solver.info() != Eigen::Success)
        throw NumericalError("dense_ground_state: eigensolver failed");
    GroundTruth gt;
    gt.e0 = solver.eigenvalues()(0);
    Statevector v(h.n_qubits());
    Eigen::VectorXcd col = solver.eigenvectors().col(0);
    for (std::size_t i = 0; i < v.dim(); ++i) v.amps[i] = col(i);
    gt.vector = std::move(v);
    return gt;
}

// Lanczos with full reorthogonalization on the PauliSum matvec; restarts from
// the best Ritz vector until the residual converges.
GroundTruth lanczos_lowest(const PauliSum& h) {
    const int n = h.n_qubits();
    const std::size_t dim = 1ULL << n;
    const int max_krylov = 140;
    const int max_restarts = 12;

    Statevector v0(n);
    // deterministic pseudo-random start with overlap on every sector
    std::uint64_t s = 0x9d2c5680u;
    for (std::size_t i = 0; i < dim; ++i) {
        v0.amps[i] = cplx(static_cast<double>(splitmix64(s) % 1000) / 999.0 - 0.5,
                          static_cast<double>(splitmix64(s) % 1000) / 999.0 - 0.5);
    }
    v0.normalize();

    GroundTruth gt;
    for (int restart = 0; restart < max_restarts; ++restart) {
        std::vector<Statevector> basis;
        std::vector<double> alpha, beta;
        basis.push_back(v0);
        Statevector w(n);
        for (int it = 0; it < max_krylov; ++it) {
            w = apply_pauli_sum(basis.back(), h);
            // full reorthogonalization, twice for stability
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& b : basis) {
                    const cplx c = inner(b, w);
                    for (std::size_t i = 0; i < dim; ++i) w.amps[i] -= c * b.amps[i];
                }
            }
            alpha.push_back(inner(basis.back(), apply_pauli_sum(basis.back(), h)).real());
            const double nb = w.norm();
            if (nb < 1e-13) break;
            beta.push_back(nb);
            Statevector next(n);
            for (std::size_t i = 0; i < dim; ++i) next.amps[i] = w.amps[i] / nb;
            basis.push_back(std::move(next));
        }
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            tri(i, i) = alpha[i];
            if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tri);
        const Eigen::VectorXd coeffs = solver.eigenvectors().col(0);
        Statevector ritz(n);
        for (int i = 0; i < m; ++i)
            for (std::size_t a = 0; a < dim; ++a) ritz.amps[a] += coeffs(i) * basis[i].amps[a];
        ritz.normalize();
        const double e0 = energy(ritz, h);
        Statevector resid = apply_pauli_sum(ritz, h);
        for (std::size_t a = 0; a < dim; ++a) resid.amps[a] -= e0 * ritz.amps[a];
        if (resid.norm() <= 1e-10) {
            gt.e0 = e0;
            gt.vector = std::move(ritz);
            return gt;
        }
        v0 = std::move(ritz);
    }
    throw NumericalError("dense_ground_state: Lanczos failed to converge");
}

}  // namespace

GroundTruth dense_ground_state(const PauliSum& h) {
    if (h.n_qubits() > kDenseQubitCap)
        throw std::invalid_argument("dense_ground_state: qubit count exceeds cap");
    if (h.empty()) throw std::invalid_argument("dense_ground_state: empty Hamiltonian");
    GroundTruth gt = h.n_qubits() <= kDenseSolveCap ? dense_lowest(h) : lanczos_lowest(h);
    Statevector resid = apply_pauli_sum(*gt.vector, h);
    for (std::size_t i = 0; i < resid.dim(); ++i) resid.amps[i] -= gt.e0 * gt.vector->amps[i];
    if (resid.norm() > 1e-9)
        throw NumericalError("dense_ground_state: eigen-residual " + format_double(resid.norm()));
    return gt;
}

std::vector<double> dense_spectrum(const PauliSum& h) {
    if (h.n_qubits() > 8)
        throw std::invalid_argument("dense_spectrum: supported up to 8 qubits");
    const auto op = to_dense(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.matrix,
                                                           Eigen::EigenvaluesOnly);
    std::vector<double> ev(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + solver.eigenvalues().size());
    return ev;
}

double tfim_free_fermion_energy(int n, double j, double lam) {
    if (n < 2) throw std::invalid_argument("tfim_free_fermion_energy: need at least 2 sites");
    // Jordan-Wigner quadratic form of j XX + lam Z (a basis rotation of the
    // chain Hamiltonian with the same spectrum): hopping/pairing strength j,
    // chemical potential -2 lam.
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    auto A = [&](int r, int c) -> double& { return m(r, c); };
    for (int i = 0; i < n; ++i) {
        A(i, i) = -2.0 * lam;
        A(n + i, n + i) = 2.0 * lam;
    }
    for (int i = 0; i + 1 < n; ++i) {
        A(i, i + 1) = A(i + 1, i) = j;
        A(n + i, n + i + 1) = A(n + i + 1, n + i) = -j;
        // pairing block B and its negative transpose
        A(i, n + i + 1) = j;
        A(i + 1, n + i) = -j;
        A(n + i, i + 1) = -j;
        A(n + i + 1, i) = j;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    double sum_pos = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double e = solver.eigenvalues()(i);
        if (e > 0.0) sum_pos += e;
    }
    return -0.5 * sum_pos;
}

double relative_error(double e, double e0) {
    if (e0 == 0.0) throw std::invalid_argument("relative_error: zero reference energy");
    return std::abs(e - e0) / std::abs(e0);
}

int two_qubit_depth(const Circuit& c) {
    std::vector<int> depth(c.n_qubits(), 0);
    int result = 0;
    for (const auto& g : c.gates()) {
        if (g.qubits.size() < 2) continue;
        int d = 0;
        for (int q : g.qubits) d = std::max(d, depth[q]);
        ++d;
        for (int q : g.qubits) depth[q] = d;
        result = std::max(result, d);
    }
    return result;
}

}  // namespace hmera
