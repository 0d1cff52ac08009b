#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "hmera/annealing.hpp"
#include "hmera/oracle.hpp"
#include "hmera/shadows.hpp"

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

Eigen::Vector2cd basis_eigenstate(Basis b, int bit) {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Vector2cd v;
    switch (b) {
        case Basis::X: v << s, (bit ? -s : s); break;
        case Basis::Y: v << s, (bit ? cplx(0, -s) : cplx(0, s)); break;
        case Basis::Z: v << (bit ? 0.0 : 1.0), (bit ? 1.0 : 0.0); break;
    }
    return v;
}

}  // namespace

TEST_CASE("dual factor examples") {
    const Eigen::Matrix2cd dz0 = dual_factor(Basis::Z, 0);
    CHECK(std::abs(dz0(0, 0) - cplx(2.0)) < 1e-14);
    CHECK(std::abs(dz0(1, 1) - cplx(-1.0)) < 1e-14);
    for (Basis b : {Basis::X, Basis::Y, Basis::Z})
        for (int bit : {0, 1})
            CHECK(std::abs(dual_factor(b, bit).trace() - cplx(1.0)) < 1e-14);
}

TEST_CASE("dual operators reconstruct single-qubit expectations") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_hermitian = [&] {
        Eigen::Matrix2cd a;
        a << cplx(gauss(rng), gauss(rng)), cplx(gauss(rng), gauss(rng)),
            cplx(gauss(rng), gauss(rng)), cplx(gauss(rng), gauss(rng));
        return Eigen::Matrix2cd(0.5 * (a + a.adjoint()));
    };
    const Eigen::Matrix2cd obs = random_hermitian();
    Eigen::Matrix2cd rho = random_hermitian();
    rho = rho * rho.adjoint();
    rho /= rho.trace();

    // sum over the 6 outcomes of (1/3) p(b, o) Tr[O dual(b, o)]
    cplx acc = 0.0;
    for (Basis b : {Basis::X, Basis::Y, Basis::Z}) {
        for (int bit : {0, 1}) {
            const Eigen::Vector2cd v = basis_eigenstate(b, bit);
            const cplx p = (v.adjoint() * rho * v)(0, 0);
            acc += (1.0 / 3.0) * p * (obs * dual_factor(b, bit)).trace();
        }
    }
    CHECK(std::abs(acc - (rho * obs).trace()) < 1e-12);
}

TEST_CASE("snapshot weights") {
    Snapshot snap{{Basis::Z}, {0}};
    CHECK(snapshot_weight(snap, {1.0, PauliString::from_text("Z")}) == doctest::Approx(3.0));
    Snapshot snapx{{Basis::X}, {0}};
    CHECK(snapshot_weight(snapx, {1.0, PauliString::from_text("Z")}) == doctest::Approx(0.0));
    Snapshot two{{Basis::X, Basis::Y}, {1, 0}};
    CHECK(snapshot_weight(two, {2.5, PauliString::from_text("II")}) == doctest::Approx(2.5));
    CHECK(snapshot_weight(two, {1.0, PauliString::from_text("XY")}) == doctest::Approx(-9.0));
}

TEST_CASE("measuring |0> in Z always yields outcome 0") {
    const ShadowSet set = sample_snapshots(Statevector::computational_zero(1), 2000, 5);
    for (const auto& snap : set.snapshots)
        if (snap.bases[0] == Basis::Z) CHECK(snap.outcomes[0] == 0);
}

TEST_CASE("measuring |0> in X is a fair coin") {
    const ShadowSet set = sample_snapshots(Statevector::computational_zero(1), 30000, 6);
    int n_x = 0, ones = 0;
    for (const auto& snap : set.snapshots) {
        if (snap.bases[0] != Basis::X) continue;
        ++n_x;
        ones += snap.outcomes[0];
    }
    REQUIRE(n_x > 5000);
    const double p = static_cast<double>(ones) / n_x;
    const double sigma = std::sqrt(0.25 / n_x);
    CHECK(std::abs(p - 0.5) < 5.0 * sigma);
}

TEST_CASE("Bell state outcomes coincide in the ZZ basis") {
    Statevector bell(2);
    bell.amps[0] = 1.0 / std::sqrt(2.0);
    bell.amps[3] = 1.0 / std::sqrt(2.0);
    const ShadowSet set = sample_snapshots(bell, 4000, 7);
    for (const auto& snap : set.snapshots)
        if (snap.bases[0] == Basis::Z && snap.bases[1] == Basis::Z)
            CHECK(snap.outcomes[0] == snap.outcomes[1]);
}

TEST_CASE("estimator recovers <Z> of |0>") {
    const ShadowSet set = sample_snapshots(Statevector::computational_zero(1), 10000, 8);
    const EstimatorResult r = estimate(set, PauliSum::from_text("1 * Z"));
    CHECK(r.s_used == 10000);
    CHECK(std::abs(r.mean - 1.0) < 4.0 * r.std_err);
}

TEST_CASE("identity observables have zero standard error") {
    const ShadowSet set = sample_snapshots(random_state(2, 9), 100, 10);
    const EstimatorResult r = estimate(set, PauliSum::from_text("0.75 * II"));
    CHECK(r.mean == doctest::Approx(0.75));
    CHECK(r.std_err == doctest::Approx(0.0));
}

TEST_CASE("estimate rejects an empty set") {
    ShadowSet set;
    set.n_qubits = 1;
    CHECK_THROWS_AS(estimate(set, PauliSum::from_text("1 * Z")), std::invalid_argument);
}

TEST_CASE("PauliSum and dense-support estimator paths agree") {
    const int n = 3;
    const Statevector psi = random_state(n, 11);
    const ShadowSet set = sample_snapshots(psi, 500, 12);
    const PauliSum h = build_tfim(n, -0.7, 1.2, Boundary::Open);

    const EstimatorResult via_pauli = estimate(set, h);

    // dense path: one operator per term, support = the non-identity sites
    std::vector<SupportedOperator> ops;
    for (const auto& term : h.terms()) {
        SupportedOperator op;
        std::vector<Axis> axes;
        for (int q = 0; q < n; ++q) {
            if (term.string.axes[q] != Axis::I) {
                op.support.push_back(q);
                axes.push_back(term.string.axes[q]);
            }
        }
        op.matrix = term.coeff * pauli_matrix(axes);
        ops.push_back(std::move(op));
    }
    const EstimatorResult via_dense = estimate(set, ops);
    CHECK(std::abs(via_pauli.mean - via_dense.mean) < 1e-10);
    CHECK(std::abs(via_pauli.std_err - via_dense.std_err) < 1e-10);
}

TEST_CASE("estimator is unbiased across independent sets") {
    const int n = 3;
    const Statevector psi = random_state(n, 13);
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Open);
    const double exact = energy(psi, h);
    const int n_sets = 30;
    const std::size_t s = 4000;
    double mean_of_means = 0.0, pooled_var = 0.0;
    for (int k = 0; k < n_sets; ++k) {
        const EstimatorResult r = estimate(sample_snapshots(psi, s, 100 + k), h);
        mean_of_means += r.mean;
        pooled_var += r.std_err * r.std_err;
    }
    mean_of_means /= n_sets;
    const double pooled_err = std::sqrt(pooled_var / n_sets / n_sets);
    CHECK(std::abs(mean_of_means - exact) < 3.0 * pooled_err);
}

TEST_CASE("variance follows the 1/S law") {
    const int n = 4;
    const Statevector psi = random_state(n, 14);
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    const std::size_t s = 4000;
    const EstimatorResult small = estimate(sample_snapshots(psi, s, 21), h);
    const EstimatorResult large = estimate(sample_snapshots(psi, 4 * s, 22), h);
    const double ratio = (large.std_err * large.std_err) / (small.std_err * small.std_err);
    CHECK(ratio > 0.18);
    CHECK(ratio < 0.35);
}

TEST_CASE("readout flips at 1/2 erase every traceless signal") {
    const int n = 2;
    const AnnealingSchedule s(1.0, 0.5);
    const Circuit c = build_annealing_circuit(s, n, Boundary::Open);
    NoiseModel m = NoiseModel::noiseless();
    m.e_ro = 0.5;
    const ShadowSet set = sample_snapshots_noisy(c, m, 20000, 23);
    const EstimatorResult r = estimate(set, PauliSum::from_text("1 * ZI + 1 * XI + 1 * IZ"));
    CHECK(std::abs(r.mean) < 4.0 * r.std_err);
}

TEST_CASE("noise-free noisy sampler matches the ideal sampler statistically") {
    const int n = 4;
    const AnnealingSchedule s(2.0, 0.5);
    const Circuit c = build_annealing_circuit(s, n, Boundary::Periodic);
    const Statevector psi = apply_circuit(Statevector::all_minus(n), c);
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    const EstimatorResult ideal = estimate(sample_snapshots(psi, 20000, 31), h);
    const EstimatorResult via_noisy =
        estimate(sample_snapshots_noisy(c, NoiseModel::noiseless(), 20000, 32), h);
    const double sigma = std::hypot(ideal.std_err, via_noisy.std_err);
    CHECK(std::abs(ideal.mean - via_noisy.mean) < 4.0 * sigma);
}

TEST_CASE("weight-resolved variance: single group equals the full variance") {
    const Statevector psi = random_state(2, 15);
    const ShadowSet set = sample_snapshots(psi, 300, 16);
    const PauliSum h = PauliSum::from_text("0.5 * XI + 0.25 * IZ");  // all weight 1
    const auto wrv = weight_resolved_variance(set, h);
    REQUIRE(wrv.c_w.size() == 1);
    const EstimatorResult r = estimate(set, h);
    CHECK(wrv.c_w.at(1) == doctest::Approx(r.std_err * r.std_err).epsilon(1e-12));
}

TEST_CASE("weight contributions sum to the estimator variance") {
    const int n = 4;
    for (std::uint64_t seed : {40ULL, 41ULL, 42ULL}) {
        const Statevector psi = random_state(n, seed);
        const ShadowSet set = sample_snapshots(psi, 600, seed + 100);
        const PauliSum h = build_tfim(n, -0.9, 1.1, Boundary::Periodic);
        const auto wrv = weight_resolved_variance(set, h);
        const EstimatorResult r = estimate(set, h);
        const double direct = r.std_err * r.std_err;
        CHECK(std::abs(wrv.total - direct) <= 1e-10 * std::max(1e-30, std::abs(direct)));
    }
}

TEST_CASE("snapshot budget forecast") {
    const std::uint64_t s = required_snapshots(0.0033, 100000, 0.07, 0.25);
    CHECK(s >= 1000000);
    CHECK(s <= 1100000);
    CHECK(s == 1077552);  // ceil(330 / 0.0175^2)
}

TEST_CASE("snapshot budget limits") {
    // f * delta_e = sqrt(var_ref), s_ref = 1  ->  exactly one snapshot
    CHECK(required_snapshots(0.04, 1, 0.4, 0.5) == 1);
    // doubling f quarters the budget
    const std::uint64_t s1 = required_snapshots(0.01, 1000, 0.1, 0.25);
    const std::uint64_t s2 = required_snapshots(0.01, 1000, 0.1, 0.5);
    CHECK(s1 == 4 * s2);
    CHECK_THROWS_AS(required_snapshots(-1.0, 10, 0.1, 0.25), std::invalid_argument);
}

TEST_CASE("worst-case bound prefactors") {
    const double l1 = worst_case_bound(100, 0.1, LocalityInput::layers(1), 1.0);
    const double l2 = worst_case_bound(100, 0.1, LocalityInput::layers(2), 1.0);
    CHECK(l2 / l1 == doctest::Approx(16.0));
    const double k0 = worst_case_bound(100, 0.1, LocalityInput::qubits(0), 2.0);
    CHECK(k0 == doctest::Approx(std::log(100.0) / 0.01 * 4.0));
    const double k2 = worst_case_bound(100, 0.1, LocalityInput::qubits(2), 1.0);
    CHECK(k2 / k0 * 4.0 == doctest::Approx(16.0));
    CHECK_THROWS_AS(worst_case_bound(100, 0.0, LocalityInput::qubits(1), 1.0),
                    std::invalid_argument);
}

TEST_CASE("worst-case locality after layers") {
    CHECK(worst_case_locality(0) == 3);
    CHECK(worst_case_locality(1) == 6);
    CHECK(worst_case_locality(2) == 12);
}

TEST_CASE("jsonl persistence round-trips bit-exactly") {
    const Statevector psi = random_state(3, 17);
    const ShadowSet set = sample_snapshots(psi, 64, 18);
    const auto path = std::filesystem::temp_directory_path() / "hmera_test_shadows.jsonl";
    save_jsonl(set, path);
    const ShadowSet back = load_jsonl(path);
    CHECK(back.n_qubits == set.n_qubits);
    CHECK(back.meta.seed == set.meta.seed);
    CHECK(back.meta.source == set.meta.source);
    REQUIRE(back.size() == set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(back.snapshots[i].bases == set.snapshots[i].bases);
        CHECK(back.snapshots[i].outcomes == set.snapshots[i].outcomes);
    }
    std::filesystem::remove(path);
}
