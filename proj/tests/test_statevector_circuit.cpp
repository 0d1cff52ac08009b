#include <random>

#include "doctest.h"
#include "hmera/circuit.hpp"
#include "hmera/oracle.hpp"

using namespace hmera;

namespace {

Statevector random_state(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Statevector psi(n);
    for (auto& a : psi.amps) a = cplx(gauss(rng), gauss(rng));
    psi.normalize();
    return psi;
}

}  // namespace

TEST_CASE("all_minus is the X-field ground state") {
    const int n = 3;
    const Statevector psi = Statevector::all_minus(n);
    CHECK(psi.norm() == doctest::Approx(1.0));
    const PauliSum field = build_tfim(n, 0.0, 1.0, Boundary::Open);
    CHECK(energy(psi, field) == doctest::Approx(-3.0));
}

TEST_CASE("RZZ phases a diagonal basis state") {
    Statevector psi = Statevector::computational_zero(2);
    const double theta = 0.7;
    apply_rzz_inplace(psi.amps, 2, 0, 1, theta);
    CHECK(std::abs(psi.amps[0] - std::polar(1.0, -theta / 2.0)) < 1e-14);
}

TEST_CASE("RX(pi) maps |0> to -i|1>") {
    Statevector psi = Statevector::computational_zero(1);
    apply_rx_inplace(psi.amps, 1, 0, std::acos(-1.0));
    CHECK(std::abs(psi.amps[0]) < 1e-14);
    CHECK(std::abs(psi.amps[1] - cplx(0.0, -1.0)) < 1e-14);
}

TEST_CASE("empty circuit leaves the state unchanged") {
    const Statevector psi = random_state(3, 5);
    const Statevector out = apply_circuit(psi, Circuit(3));
    for (std::size_t i = 0; i < psi.dim(); ++i) CHECK(out.amps[i] == psi.amps[i]);
}

TEST_CASE("circuit application preserves the norm") {
    Circuit c(4);
    std::vector<Gate> layer;
    for (int q = 0; q < 4; ++q) layer.push_back(Gate::rx(q, 0.3 + q));
    c.add_layer(std::move(layer));
    c.add_layer({Gate::rzz(0, 1, 0.4), Gate::rzz(2, 3, -1.1)});
    const Statevector out = apply_circuit(random_state(4, 7), c);
    CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("non-unitary blocks are rejected") {
    Circuit c(2);
    Eigen::MatrixXcd bad = 2.0 * Eigen::MatrixXcd::Identity(4, 4);
    CHECK_THROWS_AS(c.add_layer({Gate::block({0, 1}, bad)}), std::invalid_argument);
}

TEST_CASE("qubit-count mismatch is rejected") {
    const Circuit c(3);
    CHECK_THROWS_AS(apply_circuit(random_state(2, 1), c), std::invalid_argument);
}

TEST_CASE("energy of |00> under -Z0Z1") {
    const Statevector psi = Statevector::computational_zero(2);
    CHECK(energy(psi, PauliSum::from_text("-1 * ZZ")) == doctest::Approx(-1.0));
}

TEST_CASE("energy of |--> under X0+X1") {
    const Statevector psi = Statevector::all_minus(2);
    CHECK(energy(psi, PauliSum::from_text("1 * XI + 1 * IX")) == doctest::Approx(-2.0));
}

TEST_CASE("energy agrees with the dense quadratic form") {
    const int n = 4;
    const PauliSum h = build_tfim(n, -0.8, 1.3, Boundary::Periodic);
    const Statevector psi = random_state(n, 9);
    const auto dense = to_dense(h);
    Eigen::VectorXcd v(psi.dim());
    for (std::size_t i = 0; i < psi.dim(); ++i) v(i) = psi.amps[i];
    const double expected = (v.adjoint() * dense.matrix * v)(0, 0).real();
    CHECK(energy(psi, h) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("block application matches dense embedding") {
    const int n = 3;
    Statevector psi = random_state(n, 13);
    // random unitary on qubits (2, 0), embedded by hand into the register
    Eigen::MatrixXcd a(4, 4);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) a(r, c) = cplx(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    const Eigen::MatrixXcd u = qr.householderQ() * Eigen::MatrixXcd::Identity(4, 4);

    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(8, 8);
    for (int r = 0; r < 8; ++r) {
        const int r2 = (r >> 2) & 1, r0 = (r >> 0) & 1, r1 = (r >> 1) & 1;
        for (int c = 0; c < 8; ++c) {
            const int c2 = (c >> 2) & 1, c0 = (c >> 0) & 1, c1 = (c >> 1) & 1;
            // block order (2, 0): qubit 2 is the high matrix bit; qubit 2 is
            // the LSB of the register index, qubit 0 the MSB
            if (r1 != c1) continue;
            full(r, c) = u(2 * r0 + r2, 2 * c0 + c2);
        }
    }
    Eigen::VectorXcd v(8);
    for (int i = 0; i < 8; ++i) v(i) = psi.amps[i];
    const Eigen::VectorXcd expected = full * v;

    apply_block_inplace(psi.amps, n, {2, 0}, u);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(psi.amps[i] - expected(i)) < 1e-12);
}
