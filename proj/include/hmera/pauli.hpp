#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "hmera/util.hpp"

namespace hmera {

enum class Axis : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char axis_char(Axis a);
Axis axis_from_char(char c);

/// Tensor product of single-qubit Pauli factors, one axis per site.
/// Site 0 is the most significant tensor factor everywhere in this codebase.
struct PauliString {
    std::vector<Axis> axes;

    PauliString() = default;
    explicit PauliString(std::vector<Axis> a) : axes(std::move(a)) {}
    static PauliString identity(int n_qubits) {
        return PauliString(std::vector<Axis>(n_qubits, Axis::I));
    }
    static PauliString from_text(const std::string& text);

    int size() const { return static_cast<int>(axes.size()); }
    std::string to_text() const;

    auto operator<=>(const PauliString&) const = default;
};

/// Number of non-identity factors.
int weight(const PauliString& p);

struct PauliTerm {
    cplx coeff{};
    PauliString string;
};

/// Weighted sum of Pauli strings in canonical order (lexicographic by axes,
/// duplicates merged, coefficients below the drop threshold removed).
class PauliSum {
public:
    PauliSum() = default;
    /// Canonicalizes: sorts, merges duplicates, drops |coeff| <= drop_threshold.
    PauliSum(int n_qubits, std::vector<PauliTerm> terms, double drop_threshold = 0.0);

    int n_qubits() const { return n_qubits_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    /// Text form like "-1 * ZZII + 1 * XIII"; parse is whitespace-insensitive.
    std::string to_text() const;
    static PauliSum from_text(const std::string& text, double drop_threshold = 0.0);

private:
    int n_qubits_ = 0;
    std::vector<PauliTerm> terms_;
};

enum class Boundary { Open, Periodic };

/// Transverse-field Ising chain: j * sum_i Z_i Z_{i+1} + lam * sum_i X_i.
/// Periodic adds the wrap bond Z_{n-1} Z_0.
PauliSum build_tfim(int n, double j, double lam, Boundary boundary);

/// Splits a sum into per-weight groups; the groups partition the input.
std::map<int, PauliSum> group_by_weight(const PauliSum& h);

/// Dense operator living on an explicit, ordered subset of qubits.
/// matrix dimension is 2^|support|; support[0] is the most significant factor.
struct SupportedOperator {
    std::vector<int> support;
    Eigen::MatrixXcd matrix;
};

inline constexpr int kDenseQubitCap = 14;
inline constexpr double kDefaultDropThreshold = 1e-12;

/// Kronecker realization of a PauliSum on all of its qubits (n <= cap).
SupportedOperator to_dense(const PauliSum& h, int cap = kDenseQubitCap);

/// Dense 2^k matrix for a Pauli string restricted to k axes.
Eigen::MatrixXcd pauli_matrix(const std::vector<Axis>& axes);

/// Trace inner-product decomposition c_P = Tr[P op] / 2^k of a Hermitian
/// operator; terms with |c_P| <= drop_threshold are omitted. The result lives
/// on op.support (embedded back into n_qubits-length strings).
PauliSum pauli_decompose(const SupportedOperator& op, int n_qubits,
                         double drop_threshold = kDefaultDropThreshold,
                         double hermiticity_tol = 1e-9);

}  // namespace hmera
