#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "hmera/pauli.hpp"
#include "hmera/shadows.hpp"
#include "hmera/statevector.hpp"

namespace hmera {

/// One block unitary of the network. Untruncated tensors at layer l act on
/// 2^l qubits (dimension 2^(2^l)); kept square, so isometric means unitary.
struct MeraTensor {
    enum class Kind { Isometry, Disentangler };
    Kind kind = Kind::Isometry;
    int layer = 1;
    std::vector<int> block;  // contiguous modulo n_sites
    Eigen::MatrixXcd matrix;
};

/// Periodic layered network of disentanglers and coarse-graining isometries.
/// Tensors are stored in application order: coarsest layer first, isometry
/// row before disentangler row, ascending block index within a row. Values
/// are immutable snapshots; updates build a new Mera.
class Mera {
public:
    Mera() = default;  // empty network; placeholder until assigned

    static Mera identity(int n_sites, int n_layers);
    /// Haar-like tensors: QR of a complex Gaussian matrix with phase fixing.
    static Mera random(int n_sites, int n_layers, std::uint64_t seed);

    int n_sites() const { return n_sites_; }
    int n_layers() const { return n_layers_; }
    const std::vector<MeraTensor>& tensors() const { return tensors_; }
    std::size_t size() const { return tensors_.size(); }

    /// Copy with one tensor matrix replaced (no isometry check; optimizer
    /// retraction and constructors are responsible for feasibility).
    Mera with_tensor_matrix(std::size_t index, Eigen::MatrixXcd matrix) const;

    /// max over tensors of ||X^dag X - I||_max.
    double max_isometry_residual() const;

private:
    Mera(int n_sites, int n_layers);

    int n_sites_ = 0;
    int n_layers_ = 0;
    std::vector<MeraTensor> tensors_;
};

/// Applies the network to a state, coarsest layer first.
Statevector apply_mera(const Statevector& psi, const Mera& m);

/// Heisenberg picture: conjugates every Hamiltonian term through the network,
/// touching only tensors inside each term's causal cone. Supports are shrunk
/// back whenever a qubit factors out as identity; they never exceed
/// min(n, 3 * 2^L) qubits.
std::vector<SupportedOperator> transform_operator(const Mera& m, const PauliSum& h);

/// <psi| U^dag H U |psi> through the state path.
double energy_exact(const Mera& m, const Statevector& psi, const PauliSum& h);

/// Pauli expansion of the transformed Hamiltonian for weight analyses.
PauliSum transformed_pauli_sum(const Mera& m, const PauliSum& h,
                               double drop_threshold = kDefaultDropThreshold);

/// Shadow estimate of the transformed Hamiltonian; unbiased for energy_exact.
EstimatorResult energy_shadow(const Mera& m, const ShadowSet& set, const PauliSum& h);

/// Euclidean gradients, one matrix per tensor in storage order, with the
/// convention dE = 2 Re<G, dX> under the Frobenius inner product.
using GradientSet = std::vector<Eigen::MatrixXcd>;

GradientSet gradient(const Mera& m, const Statevector& psi, const PauliSum& h);
/// Gradient of the empirical shadow estimator (linear in the snapshot
/// average of dual operators). Dense in 4^n; capped at 10 qubits.
GradientSet gradient(const Mera& m, const ShadowSet& set, const PauliSum& h);

/// Worst-case qubit support of an operator spanning initial_links links after
/// passing through the given number of layers: min(3, links+layers) * 2^layers.
int support_after_layers(int initial_links, int layers);

/// Versioned JSON container; doubles round-trip bit-exactly.
void save_mera(const Mera& m, const std::filesystem::path& path);
Mera load_mera(const std::filesystem::path& path);

}  // namespace hmera
