#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hmera/noise.hpp"
#include "hmera/pauli.hpp"
#include "hmera/statevector.hpp"

namespace hmera {

enum class Basis : std::uint8_t { X = 0, Y = 1, Z = 2 };

char basis_char(Basis b);
Basis basis_from_char(char c);

/// One randomized single-shot measurement record: a Pauli basis and an
/// outcome bit per qubit.
struct Snapshot {
    std::vector<Basis> bases;
    std::vector<std::uint8_t> outcomes;
};

struct ShadowMeta {
    std::uint64_t seed = 0;
    std::string source = "ideal";  // "ideal" or "noisy(eta=...)"
};

struct ShadowSet {
    int n_qubits = 0;
    std::vector<Snapshot> snapshots;
    ShadowMeta meta;

    std::size_t size() const { return snapshots.size(); }
};

struct EstimatorResult {
    double mean = 0.0;
    double std_err = 0.0;
    std::size_t s_used = 0;
};

/// Uniformly random X/Y/Z basis per qubit, outcomes from the exact Born
/// distribution of psi in the chosen product basis. Deterministic given seed.
ShadowSet sample_snapshots(const Statevector& psi, std::size_t s, std::uint64_t seed);

/// Each snapshot is measured on a fresh noisy trajectory of the circuit;
/// outcome bits then flip independently with probability e_ro. An explicit
/// source_tag (e.g. "noisy(eta=0.1)") overrides the default meta tag.
ShadowSet sample_snapshots_noisy(const Circuit& c, const NoiseModel& m, std::size_t s,
                                 std::uint64_t seed, const std::string& source_tag = "");

/// Frame dual of the single-qubit Pauli-6 POVM element: 3|b><b| - I, where
/// bit 0 selects the +1 eigenstate.
Eigen::Matrix2cd dual_factor(Basis basis, int bit);

/// Tr[(tensor of dual factors) * term]: coeff times a factor per site that is
/// 1 on identity, +-3 on a matching basis (sign from the outcome), 0 otherwise.
double snapshot_weight(const Snapshot& snap, const PauliTerm& term);

/// Unbiased estimator with the standard error of the mean.
EstimatorResult estimate(const ShadowSet& set, const PauliSum& obs);
/// Dense-support path; factors outside each support contribute trace 1.
EstimatorResult estimate(const ShadowSet& set, const std::vector<SupportedOperator>& obs);

/// Per-snapshot weights of a list of supported operators (sum over terms).
std::vector<double> snapshot_weights_dense(const ShadowSet& set,
                                           const std::vector<SupportedOperator>& obs);

struct WeightResolvedVariance {
    std::map<int, double> c_w;  // variance contribution per Pauli weight
    double total = 0.0;         // equals the full estimator variance
};

/// Splits the estimator variance by Pauli weight: C_w = Var(P_w) +
/// sum_{w' != w} Cov(P_w, P_w'), so that sum_w C_w recovers the variance.
WeightResolvedVariance weight_resolved_variance(const ShadowSet& set, const PauliSum& h);

/// Snapshot budget to resolve f * delta_e given a variance measured with
/// s_ref snapshots: ceil(var_ref * s_ref / (f * delta_e)^2).
std::uint64_t required_snapshots(double var_ref, std::uint64_t s_ref, double delta_e, double f);

struct LocalityInput {
    enum class Kind { Qubits, Layers };
    Kind kind = Kind::Qubits;
    int value = 0;

    static LocalityInput qubits(int k) { return {Kind::Qubits, k}; }
    static LocalityInput layers(int l) { return {Kind::Layers, l}; }
};

/// Loose worst-case measurement bound log(m)/eps^2 * 4^k * max_norm^2, with
/// 4^k replaced by 16^l for a layer count input.
double worst_case_bound(std::uint64_t m_obs, double eps, LocalityInput locality,
                        double max_norm);

/// Worst-case qubit locality reachable after l coarse-graining layers: 3 * 2^l.
int worst_case_locality(int layers);

/// JSON-lines persistence: one header record {n_qubits, seed, source, s},
/// then one record {"b": bases, "o": outcome bits} per snapshot.
void save_jsonl(const ShadowSet& set, const std::filesystem::path& path);
ShadowSet load_jsonl(const std::filesystem::path& path);

}  // namespace hmera
