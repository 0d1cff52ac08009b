#pragma once

#include <cstdint>
#include <functional>

#include "hmera/mera.hpp"

namespace hmera {

/// Tangent-space projection at an isometric point x:
/// y - (1/2) x (x^dag y + y^dag x).
Eigen::MatrixXcd project_tangent(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y);

/// Maps a candidate back to the isometric manifold via SVD: U S V^dag -> U V^dag
/// (the polar-nearest isometry).
Eigen::MatrixXcd retract(const Eigen::MatrixXcd& candidate);

/// Parallel transport of an optimizer moment into the tangent space at x_new;
/// realized as the tangent projection.
Eigen::MatrixXcd transport(const Eigen::MatrixXcd& x_new, const Eigen::MatrixXcd& v);

struct AdamParams {
    double alpha = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Per-tensor first moments, scalar second moments (squared Frobenius norm of
/// the Riemannian gradient), and a step counter shared across tensors.
struct AdamState {
    std::vector<Eigen::MatrixXcd> m;
    std::vector<double> v;
    long t = 0;
    AdamParams params;

    static AdamState init(const Mera& mera, AdamParams params = {});
};

/// One Riemannian ADAM step over all tensors; the result stays on the
/// manifold (checked to 1e-10). Throws NumericalError on non-finite gradients.
std::pair<Mera, AdamState> adam_step(const Mera& mera, const GradientSet& grads,
                                     const AdamState& state);

/// Total Frobenius norm of the tangent-projected gradient.
double riemannian_grad_norm(const Mera& mera, const GradientSet& grads);

enum class Interface { Exact, Shadow };

/// Snapshot-pool disciplines for the shadow interface, ordered from most to
/// least data reuse. Fresh pools remove gradient overfitting; independent
/// energy pools remove evaluation bias.
enum class Protocol {
    FixedShared,          // one fixed pool for gradients and energies
    FixedSplit,           // fixed training pool + fixed evaluation pool
    ResampleShared,       // fresh pool per step, shared; energy after update
    ResampleIndependent,  // fresh independent pools for gradient and energy
};

std::string protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);

struct OptimizeOptions {
    Interface interface_kind = Interface::Exact;
    Protocol protocol = Protocol::ResampleIndependent;
    int steps = 1000;
    std::size_t shadow_samples = 0;  // snapshots per pool (shadow interface)
    std::uint64_t shadow_seed = 0;   // master seed of the pool stream
    AdamParams adam;
    bool record_exact_reeval = false;
    bool track_isometry_residual = false;
    bool early_stop = false;
    double early_stop_grad_norm = 1e-10;
};

struct TraceRecord {
    int step = 0;
    double energy = 0.0;
    double std_err = 0.0;
    double wall_time_s = 0.0;
};

struct OptimizationTrace {
    std::vector<TraceRecord> records;  // records[0] is the initial energy
    std::vector<double> exact_reeval;  // parallel to records when recorded
    double max_isometry_residual = 0.0;
    bool early_stopped = false;
    Mera final_mera;
};

/// Samples one pool of snapshots for a given derived seed; the optimizer owns
/// the seed sequence so identical configs replay identical pools.
using PoolSampler = std::function<ShadowSet(std::uint64_t pool_seed)>;

/// Gradient/update loop for min_T <psi| U(T)^dag H U(T) |psi>. The exact
/// interface evaluates energies on the state directly; the shadow interface
/// follows the chosen pool protocol. Moments persist across pool refreshes.
OptimizationTrace optimize(const Mera& init, const PauliSum& h, const Statevector& psi_qa,
                           const OptimizeOptions& options, const PoolSampler& sampler = {});

}  // namespace hmera
