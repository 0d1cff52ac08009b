#include "hmera/riemannian.hpp"

#include <Eigen/SVD>
#include <chrono>
#include <cmath>

namespace hmera {

Eigen::MatrixXcd project_tangent(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw std::invalid_argument("project_tangent: shape mismatch");
    return y - 0.5 * x * (x.adjoint() * y + y.adjoint() * x);
}

Eigen::MatrixXcd retract(const Eigen::MatrixXcd& candidate) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(candidate,
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(s.size() - 1) <= 1e-12 * s(0))
        throw NumericalError("retract: rank-deficient candidate");
    return svd.matrixU() * svd.matrixV().adjoint();
}

Eigen::MatrixXcd transport(const Eigen::MatrixXcd& x_new, const Eigen::MatrixXcd& v) {
    return project_tangent(x_new, v);
}

AdamState AdamState::init(const Mera& mera, AdamParams params) {
    AdamState s;
    s.params = params;
    s.m.reserve(mera.size());
    s.v.assign(mera.size(), 0.0);
    for (const auto& t : mera.tensors())
        s.m.push_back(Eigen::MatrixXcd::Zero(t.matrix.rows(), t.matrix.cols()));
    return s;
}

std::pair<Mera, AdamState> adam_step(const Mera& mera, const GradientSet& grads,
                                     const AdamState& state) {
    if (grads.size() != mera.size() || state.m.size() != mera.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    const AdamParams& p = state.params;
    AdamState next = state;
    next.t = state.t + 1;
    const double bc1 = 1.0 - std::pow(p.beta1, static_cast<double>(next.t));
    const double bc2 = 1.0 - std::pow(p.beta2, static_cast<double>(next.t));

    Mera out = mera;
    for (std::size_t i = 0; i < mera.size(); ++i) {
        const Eigen::MatrixXcd& x = mera.tensors()[i].matrix;
        if (!grads[i].allFinite())
            throw NumericalError("adam_step: non-finite gradient at tensor " +
                                 std::to_string(i));
        const Eigen::MatrixXcd g_r = project_tangent(x, grads[i]);
        next.m[i] = p.beta1 * transport(x, state.m[i]) + (1.0 - p.beta1) * g_r;
        next.v[i] = p.beta2 * state.v[i] + (1.0 - p.beta2) * g_r.squaredNorm();
        const Eigen::MatrixXcd m_hat = next.m[i] / bc1;
        const double v_hat = next.v[i] / bc2;
        const Eigen::MatrixXcd candidate = x - p.alpha * m_hat / (std::sqrt(v_hat) + p.eps);
        Eigen::MatrixXcd updated = retract(candidate);
        const Eigen::Index d = updated.rows();
        const double residual =
            (updated.adjoint() * updated - Eigen::MatrixXcd::Identity(d, d))
                .cwiseAbs()
                .maxCoeff();
        if (residual > 1e-10)
            throw NumericalError("adam_step: retraction left the manifold (residual " +
                                 format_double(residual) + ")");
        out = out.with_tensor_matrix(i, std::move(updated));
    }
    return {std::move(out), std::move(next)};
}

double riemannian_grad_norm(const Mera& mera, const GradientSet& grads) {
    double sq = 0.0;
    for (std::size_t i = 0; i < mera.size(); ++i)
        sq += project_tangent(mera.tensors()[i].matrix, grads[i]).squaredNorm();
    return std::sqrt(sq);
}

std::string protocol_name(Protocol p) {
    switch (p) {
        case Protocol::FixedShared: return "i";
        case Protocol::FixedSplit: return "ii";
        case Protocol::ResampleShared: return "iii";
        case Protocol::ResampleIndependent: return "iv";
    }
    return "?";
}

Protocol protocol_from_name(const std::string& name) {
    if (name == "i" || name == "fixed_shared") return Protocol::FixedShared;
    if (name == "ii" || name == "fixed_split") return Protocol::FixedSplit;
    if (name == "iii" || name == "resample_shared") return Protocol::ResampleShared;
    if (name == "iv" || name == "resample_independent") return Protocol::ResampleIndependent;
    throw ConfigError("unknown protocol: " + name);
}

OptimizationTrace optimize(const Mera& init, const PauliSum& h, const Statevector& psi_qa,
                           const OptimizeOptions& options, const PoolSampler& sampler) {
    if (options.steps < 0) throw ConfigError("optimize: negative step count");
    const bool shadow = options.interface_kind == Interface::Shadow;
    if (shadow) {
        if (!sampler) throw ConfigError("optimize: shadow interface needs a pool sampler");
        if (options.shadow_samples == 0)
            throw ConfigError("optimize: shadow interface needs a positive pool size");
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    auto pool_seed = [&](std::uint64_t k) { return derive_seed(options.shadow_seed, k); };

    OptimizationTrace trace;
    Mera mera = init;
    AdamState state = AdamState::init(mera, options.adam);

    // Fixed pools (protocols i and ii) are drawn once, up front.
    ShadowSet fixed_grad_pool, fixed_energy_pool;
    if (shadow && options.protocol == Protocol::FixedShared) {
        fixed_grad_pool = sampler(pool_seed(0));
        fixed_energy_pool = fixed_grad_pool;
    } else if (shadow && options.protocol == Protocol::FixedSplit) {
        fixed_grad_pool = sampler(pool_seed(0));
        fixed_energy_pool = sampler(pool_seed(1));
    }

    auto record_energy = [&](int step, const ShadowSet* energy_pool) {
        TraceRecord rec;
        rec.step = step;
        if (shadow) {
            const EstimatorResult est = energy_shadow(mera, *energy_pool, h);
            rec.energy = est.mean;
            rec.std_err = est.std_err;
        } else {
            rec.energy = energy_exact(mera, psi_qa, h);
            rec.std_err = 0.0;
        }
        rec.wall_time_s = elapsed();
        trace.records.push_back(rec);
        if (options.record_exact_reeval)
            trace.exact_reeval.push_back(energy_exact(mera, psi_qa, h));
        if (options.track_isometry_residual)
            trace.max_isometry_residual =
                std::max(trace.max_isometry_residual, mera.max_isometry_residual());
    };

    // step-0 record on the protocol's energy pool
    if (shadow) {
        ShadowSet initial_pool;
        const ShadowSet* pool = nullptr;
        switch (options.protocol) {
            case Protocol::FixedShared:
            case Protocol::FixedSplit:
                pool = &fixed_energy_pool;
                break;
            case Protocol::ResampleShared:
            case Protocol::ResampleIndependent:
                initial_pool = sampler(pool_seed(0));
                pool = &initial_pool;
                break;
        }
        record_energy(0, pool);
    } else {
        record_energy(0, nullptr);
    }

    for (int step = 1; step <= options.steps; ++step) {
        GradientSet grads;
        ShadowSet step_grad_pool, step_energy_pool;
        const ShadowSet* energy_pool = nullptr;
        if (shadow) {
            switch (options.protocol) {
                case Protocol::FixedShared:
                case Protocol::FixedSplit:
                    grads = gradient(mera, fixed_grad_pool, h);
                    energy_pool = &fixed_energy_pool;
                    break;
                case Protocol::ResampleShared:
                    step_grad_pool = sampler(pool_seed(step));
                    grads = gradient(mera, step_grad_pool, h);
                    energy_pool = &step_grad_pool;
                    break;
                case Protocol::ResampleIndependent:
                    step_grad_pool = sampler(pool_seed(2 * static_cast<std::uint64_t>(step) - 1));
                    step_energy_pool = sampler(pool_seed(2 * static_cast<std::uint64_t>(step)));
                    grads = gradient(mera, step_grad_pool, h);
                    energy_pool = &step_energy_pool;
                    break;
            }
        } else {
            grads = gradient(mera, psi_qa, h);
        }

        if (options.early_stop &&
            riemannian_grad_norm(mera, grads) < options.early_stop_grad_norm) {
            trace.early_stopped = true;
            break;
        }

        std::tie(mera, state) = adam_step(mera, grads, state);
        record_energy(step, energy_pool);
    }

    trace.final_mera = std::move(mera);
    return trace;
}

}  // namespace hmera
