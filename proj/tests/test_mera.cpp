#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "hmera/annealing.hpp"
#include "hmera/mera.hpp"
#include "hmera/oracle.hpp"
#include "hmera/riemannian.hpp"

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

// Dense matrix of the whole network, by applying it to basis states.
Eigen::MatrixXcd mera_to_dense(const Mera& m) {
    const std::size_t dim = 1ULL << m.n_sites();
    Eigen::MatrixXcd u(dim, dim);
    for (std::size_t c = 0; c < dim; ++c) {
        Statevector basis(m.n_sites());
        basis.amps[c] = 1.0;
        const Statevector col = apply_mera(basis, m);
        for (std::size_t r = 0; r < dim; ++r) u(r, c) = col.amps[r];
    }
    return u;
}

}  // namespace

TEST_CASE("wiring: layer l has n / 2^l tensors per row") {
    const Mera m = Mera::identity(8, 2);
    int iso_l1 = 0, dis_l1 = 0, iso_l2 = 0, dis_l2 = 0;
    for (const auto& t : m.tensors()) {
        if (t.layer == 1 && t.kind == MeraTensor::Kind::Isometry) ++iso_l1;
        if (t.layer == 1 && t.kind == MeraTensor::Kind::Disentangler) ++dis_l1;
        if (t.layer == 2 && t.kind == MeraTensor::Kind::Isometry) ++iso_l2;
        if (t.layer == 2 && t.kind == MeraTensor::Kind::Disentangler) ++dis_l2;
        CHECK(t.matrix.rows() == (1 << (1 << t.layer)));
    }
    CHECK(iso_l1 == 4);
    CHECK(dis_l1 == 4);
    CHECK(iso_l2 == 2);
    CHECK(dis_l2 == 2);
    CHECK_THROWS_AS(Mera::identity(6, 2), std::invalid_argument);
}

TEST_CASE("identity network is the identity map") {
    const int n = 6;
    const Mera m = Mera::identity(n, 1);
    const Statevector psi = random_state(n, 3);
    const Statevector out = apply_mera(psi, m);
    for (std::size_t i = 0; i < psi.dim(); ++i) CHECK(std::abs(out.amps[i] - psi.amps[i]) < 1e-15);

    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    CHECK(energy_exact(m, psi, h) == doctest::Approx(energy(psi, h)).epsilon(1e-12));
}

TEST_CASE("identity network keeps original supports") {
    const int n = 8;
    const Mera m = Mera::identity(n, 1);
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    const auto transformed = transform_operator(m, h);
    REQUIRE(transformed.size() == h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        std::vector<int> expected;
        for (int q = 0; q < n; ++q)
            if (h.terms()[i].string.axes[q] != Axis::I) expected.push_back(q);
        CHECK(transformed[i].support == expected);
    }
}

TEST_CASE("random tensors satisfy the isometry tolerance") {
    const Mera m = Mera::random(8, 2, 99);
    CHECK(m.max_isometry_residual() <= 1e-10);
}

TEST_CASE("single-layer application matches the dense product at n=2") {
    const Mera m = Mera::random(2, 1, 5);
    // application order: isometry on (0,1), then disentangler on (1,0)
    const Eigen::MatrixXcd iso = m.tensors()[0].matrix;
    const Eigen::MatrixXcd dis = m.tensors()[1].matrix;
    REQUIRE(m.tensors()[0].kind == MeraTensor::Kind::Isometry);
    // embed the disentangler acting on (1,0): swap both matrix indices
    Eigen::MatrixXcd dis_std(4, 4);
    auto swap_bits = [](int v) { return ((v & 1) << 1) | ((v >> 1) & 1); };
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) dis_std(swap_bits(r), swap_bits(c)) = dis(r, c);
    const Eigen::MatrixXcd expected = dis_std * iso;
    const Eigen::MatrixXcd actual = mera_to_dense(m);
    CHECK((expected - actual).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("state path and operator path give the same energy") {
    const int n = 8;
    const Mera m = Mera::random(n, 1, 7);
    const Statevector psi = random_state(n, 8);
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    const double via_state = energy_exact(m, psi, h);
    const double via_operator = energy(psi, transform_operator(m, h));
    CHECK(std::abs(via_state - via_operator) < 1e-10);
}

TEST_CASE("transformed supports respect the causal-cone bounds") {
    const int n = 8;
    const Mera m = Mera::random(n, 1, 17);
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    const auto transformed = transform_operator(m, h);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const int links = weight(h.terms()[i].string);
        const int bound = support_after_layers(links, 1);
        CHECK(static_cast<int>(transformed[i].support.size()) <= bound);
    }
}

TEST_CASE("transformed terms stay Hermitian") {
    const Mera m = Mera::random(4, 1, 19);
    const PauliSum h = build_tfim(4, -1.0, 1.0, Boundary::Periodic);
    for (const auto& term : transform_operator(m, h))
        CHECK((term.matrix - term.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("conjugation preserves the spectrum") {
    const int n = 6;
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    const auto op = to_dense(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(op.matrix, Eigen::EigenvaluesOnly);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const Mera m = Mera::random(n, 1, seed);
        const Eigen::MatrixXcd u = mera_to_dense(m);
        const Eigen::MatrixXcd hm = u.adjoint() * op.matrix * u;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> got(hm, Eigen::EigenvaluesOnly);
        CHECK((ref.eigenvalues() - got.eigenvalues()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("random unitary keeps energies inside the spectrum") {
    const int n = 4;
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    const auto spec = dense_spectrum(h);
    const GroundTruth gt = dense_ground_state(h);
    const Mera m = Mera::random(n, 1, 23);
    const double e = energy_exact(m, *gt.vector, h);
    CHECK(e >= spec.front() - 1e-9);
    CHECK(e <= spec.back() + 1e-9);
}

TEST_CASE("support growth bounds") {
    CHECK(support_after_layers(1, 0) == 1);
    CHECK(support_after_layers(1, 1) == 4);
    CHECK(support_after_layers(2, 1) == 6);
    CHECK(support_after_layers(3, 2) == 12);
    CHECK_THROWS_AS(support_after_layers(0, 1), std::invalid_argument);
}

TEST_CASE("energy_shadow with the identity network equals the plain estimate") {
    const int n = 4;
    const Statevector psi = random_state(n, 29);
    const ShadowSet set = sample_snapshots(psi, 400, 30);
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    const Mera m = Mera::identity(n, 1);
    const EstimatorResult direct = estimate(set, h);
    const EstimatorResult via_mera = energy_shadow(m, set, h);
    CHECK(std::abs(direct.mean - via_mera.mean) < 1e-12);
    CHECK(std::abs(direct.std_err - via_mera.std_err) < 1e-12);
}

TEST_CASE("energy_shadow is consistent with energy_exact") {
    const int n = 6;
    const AnnealingSchedule s(10.0, 0.5);
    const Statevector psi = run_annealing(s, n, Boundary::Periodic);
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    const Mera m = Mera::random(n, 1, 31);
    const ShadowSet set = sample_snapshots(psi, 20000, 32);
    const EstimatorResult r = energy_shadow(m, set, h);
    CHECK(std::abs(r.mean - energy_exact(m, psi, h)) < 4.0 * r.std_err);
}

TEST_CASE("gradient matches central finite differences") {
    const int n = 6;
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    const Statevector psi = random_state(n, 33);
    const Mera m = Mera::random(n, 1, 34);
    const GradientSet g = gradient(m, psi, h);
    REQUIRE(g.size() == m.size());

    std::mt19937_64 rng(35);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double eps = 1e-5;
    for (std::size_t i = 0; i < m.size(); ++i) {
        Eigen::MatrixXcd dir(g[i].rows(), g[i].cols());
        for (Eigen::Index r = 0; r < dir.rows(); ++r)
            for (Eigen::Index c = 0; c < dir.cols(); ++c) dir(r, c) = cplx(gauss(rng), gauss(rng));
        const Mera plus = m.with_tensor_matrix(i, m.tensors()[i].matrix + eps * dir);
        const Mera minus = m.with_tensor_matrix(i, m.tensors()[i].matrix - eps * dir);
        const double fd = (energy_exact(plus, psi, h) - energy_exact(minus, psi, h)) / (2 * eps);
        const double analytic = 2.0 * (g[i].conjugate().cwiseProduct(dir)).sum().real();
        const double scale = std::max(1.0, std::abs(energy_exact(m, psi, h)));
        CHECK(std::abs(analytic - fd) <= 1e-5 * scale);
    }
}

TEST_CASE("identity network on an eigenstate is a stationary point") {
    const int n = 4;
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    const GroundTruth gt = dense_ground_state(h);
    const Mera m = Mera::identity(n, 1);
    const GradientSet g = gradient(m, *gt.vector, h);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const Eigen::MatrixXcd riem = project_tangent(m.tensors()[i].matrix, g[i]);
        CHECK(riem.cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("shadow gradient estimates the exact gradient") {
    const int n = 4;
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    const AnnealingSchedule s(4.0, 0.5);
    const Statevector psi = run_annealing(s, n, Boundary::Periodic);
    const Mera m = Mera::random(n, 1, 41);
    const GradientSet exact = gradient(m, psi, h);

    const int n_sets = 30;
    std::vector<GradientSet> samples;
    for (int k = 0; k < n_sets; ++k)
        samples.push_back(gradient(m, sample_snapshots(psi, 2000, 500 + k), h));

    for (std::size_t i = 0; i < m.size(); ++i) {
        Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(exact[i].rows(), exact[i].cols());
        for (const auto& s_k : samples) mean += s_k[i];
        mean /= n_sets;
        for (Eigen::Index r = 0; r < mean.rows(); ++r) {
            for (Eigen::Index c = 0; c < mean.cols(); ++c) {
                double var_re = 0.0, var_im = 0.0;
                for (const auto& s_k : samples) {
                    var_re += std::pow(s_k[i](r, c).real() - mean(r, c).real(), 2);
                    var_im += std::pow(s_k[i](r, c).imag() - mean(r, c).imag(), 2);
                }
                const double err_re = std::sqrt(var_re / n_sets / (n_sets - 1));
                const double err_im = std::sqrt(var_im / n_sets / (n_sets - 1));
                CHECK(std::abs(mean(r, c).real() - exact[i](r, c).real()) <
                      4.0 * err_re + 1e-9);
                CHECK(std::abs(mean(r, c).imag() - exact[i](r, c).imag()) <
                      4.0 * err_im + 1e-9);
            }
        }
    }
}

TEST_CASE("shadow-estimated transforms raise the variance on average") {
    const int n = 8;
    const AnnealingSchedule s(10.0, 0.5);
    const Statevector psi = run_annealing(s, n, Boundary::Periodic);
    const PauliSum h = build_tfim(n, -1.0, 1.0, Boundary::Periodic);
    const ShadowSet set = sample_snapshots(psi, 3000, 51);
    const EstimatorResult plain = estimate(set, h);
    double mean_var = 0.0;
    const int instances = 5;
    for (int k = 0; k < instances; ++k) {
        const Mera m = Mera::random(n, 1, 600 + k);
        const EstimatorResult r = energy_shadow(m, set, h);
        mean_var += r.std_err * r.std_err;
    }
    mean_var /= instances;
    CHECK(mean_var > plain.std_err * plain.std_err);
}

TEST_CASE("serialization round-trips bit-exactly") {
    const Mera m = Mera::random(4, 2, 61);
    const auto path = std::filesystem::temp_directory_path() / "hmera_test_mera.json";
    save_mera(m, path);
    const Mera back = load_mera(path);
    REQUIRE(back.size() == m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto& a = m.tensors()[i].matrix;
        const auto& b = back.tensors()[i].matrix;
        REQUIRE(a.rows() == b.rows());
        for (Eigen::Index r = 0; r < a.rows(); ++r)
            for (Eigen::Index c = 0; c < a.cols(); ++c) CHECK(a(r, c) == b(r, c));
    }
    std::filesystem::remove(path);
}
