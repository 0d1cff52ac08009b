#include "hmera/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace hmera {

char axis_char(Axis a) {
    switch (a) {
        case Axis::I: return 'I';
        case Axis::X: return 'X';
        case Axis::Y: return 'Y';
        case Axis::Z: return 'Z';
    }
    return '?';
}

Axis axis_from_char(char c) {
    switch (c) {
        case 'I': return Axis::I;
        case 'X': return Axis::X;
        case 'Y': return Axis::Y;
        case 'Z': return Axis::Z;
        default: throw std::invalid_argument(std::string("invalid Pauli axis character: ") + c);
    }
}

PauliString PauliString::from_text(const std::string& text) {
    std::vector<Axis> axes;
    axes.reserve(text.size());
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        axes.push_back(axis_from_char(c));
    }
    return PauliString(std::move(axes));
}

std::string PauliString::to_text() const {
    std::string s;
    s.reserve(axes.size());
    for (Axis a : axes) s.push_back(axis_char(a));
    return s;
}

int weight(const PauliString& p) {
    int w = 0;
    for (Axis a : p.axes)
        if (a != Axis::I) ++w;
    return w;
}

PauliSum::PauliSum(int n_qubits, std::vector<PauliTerm> terms, double drop_threshold)
    : n_qubits_(n_qubits) {
    if (n_qubits < 0) throw std::invalid_argument("PauliSum: negative qubit count");
    for (const auto& t : terms) {
        if (t.string.size() != n_qubits)
            throw std::invalid_argument("PauliSum: term length does not match qubit count");
    }
    std::sort(terms.begin(), terms.end(),
              [](const PauliTerm& a, const PauliTerm& b) { return a.string < b.string; });
    terms_.reserve(terms.size());
    for (auto& t : terms) {
        if (!terms_.empty() && terms_.back().string == t.string)
            terms_.back().coeff += t.coeff;
        else
            terms_.push_back(std::move(t));
    }
    std::erase_if(terms_,
                  [&](const PauliTerm& t) { return std::abs(t.coeff) <= drop_threshold; });
}

std::string PauliSum::to_text() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& t : terms_) {
        double re = t.coeff.real();
        double im = t.coeff.imag();
        if (std::abs(im) > 1e-12) {
            out << (first ? "" : " + ") << "(" << format_double(re) << "," << format_double(im)
                << ") * " << t.string.to_text();
        } else {
            if (first) {
                if (re < 0) out << "-";
            } else {
                out << (re < 0 ? " - " : " + ");
            }
            out << format_double(std::abs(re)) << " * " << t.string.to_text();
        }
        first = false;
    }
    return out.str();
}

PauliSum PauliSum::from_text(const std::string& text, double drop_threshold) {
    std::string squeezed;
    squeezed.reserve(text.size());
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) squeezed.push_back(c);
    if (squeezed.empty() || squeezed == "0") return PauliSum(0, {});

    std::vector<PauliTerm> terms;
    std::size_t pos = 0;
    double sign = 1.0;
    if (squeezed[pos] == '+' || squeezed[pos] == '-') {
        sign = squeezed[pos] == '-' ? -1.0 : 1.0;
        ++pos;
    }
    while (pos < squeezed.size()) {
        std::size_t next = pos;
        int depth = 0;
        while (next < squeezed.size()) {
            char c = squeezed[next];
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (depth == 0 && (c == '+' || c == '-') && next > pos &&
                squeezed[next - 1] != 'e' && squeezed[next - 1] != 'E')
                break;
            ++next;
        }
        std::string chunk = squeezed.substr(pos, next - pos);
        auto star = chunk.find('*');
        cplx coeff;
        std::string axes_text;
        if (star == std::string::npos) {
            coeff = 1.0;
            axes_text = chunk;
        } else {
            std::string cs = chunk.substr(0, star);
            axes_text = chunk.substr(star + 1);
            if (!cs.empty() && cs.front() == '(') {
                auto comma = cs.find(',');
                if (comma == std::string::npos || cs.back() != ')')
                    throw std::invalid_argument("PauliSum: bad complex coefficient: " + cs);
                coeff = cplx(std::stod(cs.substr(1, comma - 1)),
                             std::stod(cs.substr(comma + 1, cs.size() - comma - 2)));
            } else {
                coeff = std::stod(cs);
            }
        }
        terms.push_back({sign * coeff, PauliString::from_text(axes_text)});
        if (next >= squeezed.size()) break;
        sign = squeezed[next] == '-' ? -1.0 : 1.0;
        pos = next + 1;
    }
    if (terms.empty()) return PauliSum(0, {});
    const int n = terms.front().string.size();
    return PauliSum(n, std::move(terms), drop_threshold);
}

PauliSum build_tfim(int n, double j, double lam, Boundary boundary) {
    if (n < 2) throw std::invalid_argument("build_tfim: need at least 2 sites");
    std::vector<PauliTerm> terms;
    const int n_bonds = boundary == Boundary::Periodic ? n : n - 1;
    for (int i = 0; i < n_bonds; ++i) {
        auto p = PauliString::identity(n);
        p.axes[i] = Axis::Z;
        p.axes[(i + 1) % n] = Axis::Z;
        terms.push_back({j, std::move(p)});
    }
    for (int i = 0; i < n; ++i) {
        auto p = PauliString::identity(n);
        p.axes[i] = Axis::X;
        terms.push_back({lam, std::move(p)});
    }
    return PauliSum(n, std::move(terms));
}

std::map<int, PauliSum> group_by_weight(const PauliSum& h) {
    std::map<int, std::vector<PauliTerm>> buckets;
    for (const auto& t : h.terms()) buckets[weight(t.string)].push_back(t);
    std::map<int, PauliSum> out;
    for (auto& [w, ts] : buckets) out.emplace(w, PauliSum(h.n_qubits(), std::move(ts)));
    return out;
}

namespace {

// Action of one Pauli string on computational basis states: bit-flip mask plus
// a per-index phase. Site 0 occupies the most significant bit.
struct PauliAction {
    std::uint64_t flip_mask = 0;
    std::uint64_t z_mask = 0;   // sites with Z or Y
    std::uint64_t y_mask = 0;   // sites with Y
    cplx y_prefactor = 1.0;     // i^(#Y)

    explicit PauliAction(const std::vector<Axis>& axes) {
        const int n = static_cast<int>(axes.size());
        int n_y = 0;
        for (int q = 0; q < n; ++q) {
            const std::uint64_t bit = 1ULL << (n - 1 - q);
            switch (axes[q]) {
                case Axis::I: break;
                case Axis::X: flip_mask |= bit; break;
                case Axis::Y: flip_mask |= bit; z_mask |= bit; y_mask |= bit; ++n_y; break;
                case Axis::Z: z_mask |= bit; break;
            }
        }
        // Y|b> = i(-1)^b |1-b>; collect the i factors once, signs per index.
        static const cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        y_prefactor = i_pow[n_y % 4];
    }

    cplx phase(std::uint64_t idx) const {
        const int par = std::popcount(idx & z_mask) & 1;
        return par ? -y_prefactor : y_prefactor;
    }
};

}  // namespace

Eigen::MatrixXcd pauli_matrix(const std::vector<Axis>& axes) {
    const int k = static_cast<int>(axes.size());
    const std::size_t dim = 1ULL << k;
    PauliAction act(axes);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::uint64_t col = 0; col < dim; ++col) m(col ^ act.flip_mask, col) = act.phase(col);
    return m;
}

SupportedOperator to_dense(const PauliSum& h, int cap) {
    const int n = h.n_qubits();
    if (n > cap) throw std::invalid_argument("to_dense: qubit count exceeds dense cap");
    const std::size_t dim = 1ULL << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& t : h.terms()) {
        PauliAction act(t.string.axes);
        for (std::uint64_t col = 0; col < dim; ++col)
            m(col ^ act.flip_mask, col) += t.coeff * act.phase(col);
    }
    std::vector<int> support(n);
    for (int q = 0; q < n; ++q) support[q] = q;
    return {std::move(support), std::move(m)};
}

namespace {

// Recursive Pauli-basis transform: coefficients of M = sum_P c_P P with
// c_P = Tr[P M] / 2^k, filled into a flat array indexed base-4 by axis codes
// (support[0] = most significant digit, I=0 X=1 Y=2 Z=3). O(k 4^k).
void pauli_transform(const Eigen::MatrixXcd& m, cplx* out, std::size_t stride) {
    const std::size_t d = m.rows();
    if (d == 1) {
        out[0] = m(0, 0);
        return;
    }
    const std::size_t h = d / 2;
    const cplx i_unit(0, 1);
    Eigen::MatrixXcd c_i = 0.5 * (m.topLeftCorner(h, h) + m.bottomRightCorner(h, h));
    Eigen::MatrixXcd c_x = 0.5 * (m.topRightCorner(h, h) + m.bottomLeftCorner(h, h));
    Eigen::MatrixXcd c_y = 0.5 * i_unit * (m.topRightCorner(h, h) - m.bottomLeftCorner(h, h));
    Eigen::MatrixXcd c_z = 0.5 * (m.topLeftCorner(h, h) - m.bottomRightCorner(h, h));
    const std::size_t sub = stride / 4;
    pauli_transform(c_i, out + 0 * sub, sub);
    pauli_transform(c_x, out + 1 * sub, sub);
    pauli_transform(c_y, out + 2 * sub, sub);
    pauli_transform(c_z, out + 3 * sub, sub);
}

}  // namespace

PauliSum pauli_decompose(const SupportedOperator& op, int n_qubits, double drop_threshold,
                         double hermiticity_tol) {
    const int k = static_cast<int>(op.support.size());
    if (op.matrix.rows() != op.matrix.cols() ||
        op.matrix.rows() != static_cast<Eigen::Index>(1ULL << k))
        throw std::invalid_argument("pauli_decompose: matrix dimension mismatch with support");
    if (k > 12) throw std::invalid_argument("pauli_decompose: support too large (cap 12)");
    for (int q : op.support)
        if (q < 0 || q >= n_qubits)
            throw std::invalid_argument("pauli_decompose: support index out of range");

    const double herm_residual = (op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm_residual > hermiticity_tol)
        throw std::invalid_argument("pauli_decompose: operator is not Hermitian (residual " +
                                    format_double(herm_residual) + ")");
    Eigen::MatrixXcd sym = 0.5 * (op.matrix + op.matrix.adjoint());

    const std::size_t n_codes = 1ULL << (2 * k);
    std::vector<cplx> coeffs(n_codes);
    pauli_transform(sym, coeffs.data(), n_codes);

    std::vector<PauliTerm> terms;
    for (std::size_t code = 0; code < n_codes; ++code) {
        const cplx c = coeffs[code];
        if (std::abs(c) <= drop_threshold) continue;
        auto p = PauliString::identity(n_qubits);
        for (int t = 0; t < k; ++t) {
            const auto digit = (code >> (2 * (k - 1 - t))) & 3;
            p.axes[op.support[t]] = static_cast<Axis>(digit);
        }
        terms.push_back({c, std::move(p)});
    }
    return PauliSum(n_qubits, std::move(terms), drop_threshold);
}

}  // namespace hmera
