#include <cmath>

#include "doctest.h"
#include "hmera/annealing.hpp"
#include "hmera/oracle.hpp"

using namespace hmera;

TEST_CASE("two-site chain ground energy is -sqrt(5)") {
    const GroundTruth gt = dense_ground_state(build_tfim(2, -1.0, 1.0, Boundary::Open));
    CHECK(gt.e0 == doctest::Approx(-std::sqrt(5.0)).epsilon(1e-12));
    REQUIRE(gt.vector.has_value());
}

TEST_CASE("single transverse spin has energy -1") {
    const PauliSum h = PauliSum::from_text("1 * X");
    CHECK(dense_ground_state(h).e0 == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("free-fermion oracle agrees with dense diagonalization") {
    for (int n : {4, 8}) {
        const double ff = tfim_free_fermion_energy(n, -1.0, 1.0);
        const double ed = dense_ground_state(build_tfim(n, -1.0, 1.0, Boundary::Open)).e0;
        CHECK(std::abs(ff - ed) < 1e-9);
    }
    // mixed signs and magnitudes
    const double ff = tfim_free_fermion_energy(5, 0.7, -1.3);
    const double ed = dense_ground_state(build_tfim(5, 0.7, -1.3, Boundary::Open)).e0;
    CHECK(std::abs(ff - ed) < 1e-9);
}

TEST_CASE("lanczos path handles 12 sites") {
    const double ff = tfim_free_fermion_energy(12, -1.0, 1.0);
    const GroundTruth gt = dense_ground_state(build_tfim(12, -1.0, 1.0, Boundary::Open));
    CHECK(std::abs(gt.e0 - ff) < 1e-9);
}

TEST_CASE("free-fermion limits") {
    CHECK(tfim_free_fermion_energy(6, -1.0, 0.0) == doctest::Approx(-5.0));
    CHECK(tfim_free_fermion_energy(6, 1.5, 0.0) == doctest::Approx(-7.5));
    CHECK(tfim_free_fermion_energy(5, 0.0, 1.0) == doctest::Approx(-5.0));
    CHECK(tfim_free_fermion_energy(5, 0.0, -2.0) == doctest::Approx(-10.0));
}

TEST_CASE("eigen-residual of the returned pair is tight") {
    const PauliSum h = build_tfim(9, -1.0, 1.0, Boundary::Open);
    const GroundTruth gt = dense_ground_state(h);
    Statevector resid = apply_pauli_sum(*gt.vector, h);
    for (std::size_t i = 0; i < resid.dim(); ++i) resid.amps[i] -= gt.e0 * gt.vector->amps[i];
    CHECK(resid.norm() < 1e-9);
}

TEST_CASE("relative error") {
    CHECK(relative_error(-2.0, -2.0) == doctest::Approx(0.0));
    CHECK(relative_error(-1.9, -2.0) == doctest::Approx(0.05));
    CHECK_THROWS_AS(relative_error(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("two-qubit depth counts gate layers") {
    Circuit single(2);
    single.add_layer({Gate::rzz(0, 1, 0.1)});
    CHECK(two_qubit_depth(single) == 1);

    Circuit parallel(4);
    parallel.add_layer({Gate::rzz(0, 1, 0.1), Gate::rzz(2, 3, 0.1)});
    CHECK(two_qubit_depth(parallel) == 1);

    // one even layer + RX layer + one odd layer: RX does not count
    Circuit block(4);
    block.add_layer({Gate::rzz(0, 1, 0.1), Gate::rzz(2, 3, 0.1)});
    std::vector<Gate> rx;
    for (int q = 0; q < 4; ++q) rx.push_back(Gate::rx(q, 0.2));
    block.add_layer(rx);
    block.add_layer({Gate::rzz(1, 2, 0.1), Gate::rzz(3, 0, 0.1)});
    CHECK(two_qubit_depth(block) == 2);
}

TEST_CASE("annealing circuit depth is 2 n_steps + 1") {
    const AnnealingSchedule s(10.0, 0.1);
    const Circuit c = build_annealing_circuit(s, 8, Boundary::Periodic);
    CHECK(two_qubit_depth(c) == 201);
}

TEST_CASE("dense cap is enforced") {
    std::vector<PauliTerm> terms{{1.0, PauliString::identity(15)}};
    const PauliSum h(15, std::move(terms));
    CHECK_THROWS_AS(dense_ground_state(h), std::invalid_argument);
}
