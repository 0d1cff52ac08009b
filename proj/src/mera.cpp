#include "hmera/mera.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "json.hpp"

namespace hmera {

namespace {

void check_divisibility(int n_sites, int n_layers) {
    if (n_layers < 1) throw std::invalid_argument("Mera: need at least one layer");
    if (n_sites < 2) throw std::invalid_argument("Mera: need at least two sites");
    if (n_sites % (1 << n_layers) != 0)
        throw std::invalid_argument("Mera: site count must be divisible by 2^layers");
}

}  // namespace

Mera::Mera(int n_sites, int n_layers) : n_sites_(n_sites), n_layers_(n_layers) {
    check_divisibility(n_sites, n_layers);
    for (int l = n_layers; l >= 1; --l) {
        const int bs = 1 << l;
        const int nb = n_sites / bs;
        for (int kind_pass = 0; kind_pass < 2; ++kind_pass) {
            const bool iso = kind_pass == 0;
            for (int i = 0; i < nb; ++i) {
                MeraTensor t;
                t.kind = iso ? MeraTensor::Kind::Isometry : MeraTensor::Kind::Disentangler;
                t.layer = l;
                t.block.resize(bs);
                const int start = iso ? i * bs : i * bs + bs / 2;
                for (int q = 0; q < bs; ++q) t.block[q] = (start + q) % n_sites;
                t.matrix = Eigen::MatrixXcd::Identity(1 << bs, 1 << bs);
                tensors_.push_back(std::move(t));
            }
        }
    }
}

Mera Mera::identity(int n_sites, int n_layers) { return Mera(n_sites, n_layers); }

Mera Mera::random(int n_sites, int n_layers, std::uint64_t seed) {
    Mera m(n_sites, n_layers);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& t : m.tensors_) {
        const Eigen::Index d = t.matrix.rows();
        Eigen::MatrixXcd a(d, d);
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index c = 0; c < d; ++c) a(r, c) = cplx(gauss(rng), gauss(rng));
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
        Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
        Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Eigen::Index c = 0; c < d; ++c) {
            const cplx diag = r(c, c);
            const cplx phase = diag == cplx(0.0) ? cplx(1.0) : diag / std::abs(diag);
            q.col(c) *= phase;
        }
        t.matrix = std::move(q);
    }
    return m;
}

Mera Mera::with_tensor_matrix(std::size_t index, Eigen::MatrixXcd matrix) const {
    if (index >= tensors_.size()) throw std::out_of_range("Mera::with_tensor_matrix");
    if (matrix.rows() != tensors_[index].matrix.rows() ||
        matrix.cols() != tensors_[index].matrix.cols())
        throw std::invalid_argument("Mera::with_tensor_matrix: shape mismatch");
    Mera out = *this;
    out.tensors_[index].matrix = std::move(matrix);
    return out;
}

double Mera::max_isometry_residual() const {
    double worst = 0.0;
    for (const auto& t : tensors_) {
        const Eigen::Index d = t.matrix.rows();
        const double res = (t.matrix.adjoint() * t.matrix - Eigen::MatrixXcd::Identity(d, d))
                               .cwiseAbs()
                               .maxCoeff();
        worst = std::max(worst, res);
    }
    return worst;
}

Statevector apply_mera(const Statevector& psi, const Mera& m) {
    if (psi.n_qubits != m.n_sites())
        throw std::invalid_argument("apply_mera: qubit count mismatch");
    Statevector out = psi;
    for (const auto& t : m.tensors())
        apply_block_inplace(out.amps, out.n_qubits, t.block, t.matrix);
    return out;
}

namespace {

// ---- dense operators on explicit supports ---------------------------------

// Positions (within the support list) of each block qubit.
std::vector<int> positions_in_support(const std::vector<int>& support,
                                      const std::vector<int>& block) {
    std::vector<int> pos(block.size());
    for (std::size_t t = 0; t < block.size(); ++t) {
        const auto it = std::find(support.begin(), support.end(), block[t]);
        if (it == support.end())
            throw std::logic_error("positions_in_support: block not inside support");
        pos[t] = static_cast<int>(it - support.begin());
    }
    return pos;
}

// Embeds an operator into a larger support (identity on the new qubits).
SupportedOperator embed_operator(const SupportedOperator& op,
                                 const std::vector<int>& new_support) {
    const int k_old = static_cast<int>(op.support.size());
    const int k_new = static_cast<int>(new_support.size());
    const auto pos = positions_in_support(new_support, op.support);
    std::vector<int> shift(k_old);
    for (int t = 0; t < k_old; ++t) shift[t] = k_new - 1 - pos[t];
    std::uint64_t old_mask = 0;
    for (int t = 0; t < k_old; ++t) old_mask |= 1ULL << shift[t];

    const std::size_t dim_new = 1ULL << k_new;
    const std::size_t dim_old = 1ULL << k_old;
    // expand old index bits to their new positions
    std::vector<std::uint64_t> spread(dim_old, 0);
    for (std::size_t v = 0; v < dim_old; ++v)
        for (int t = 0; t < k_old; ++t)
            if ((v >> (k_old - 1 - t)) & 1) spread[v] |= 1ULL << shift[t];

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_new, dim_new);
    for (std::uint64_t rest = 0;; rest = ((rest | old_mask) + 1) & ~old_mask) {
        for (std::size_t r = 0; r < dim_old; ++r)
            for (std::size_t c = 0; c < dim_old; ++c)
                out(rest | spread[r], rest | spread[c]) = op.matrix(r, c);
        if (((rest | old_mask) + 1) >= dim_new) break;
    }
    return {new_support, std::move(out)};
}

// A <- T_emb A  (T acting on the given bit positions of the row index).
void left_apply_block(Eigen::MatrixXcd& a, int n_bits, const std::vector<int>& positions,
                      const Eigen::MatrixXcd& t) {
    std::vector<cplx> col(a.rows());
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        for (Eigen::Index r = 0; r < a.rows(); ++r) col[r] = a(r, c);
        apply_block_inplace(col, n_bits, positions, t);
        for (Eigen::Index r = 0; r < a.rows(); ++r) a(r, c) = col[r];
    }
}

// A <- A T_emb  (right multiplication; rows transform with T^T).
void right_apply_block(Eigen::MatrixXcd& a, int n_bits, const std::vector<int>& positions,
                       const Eigen::MatrixXcd& t) {
    const Eigen::MatrixXcd tt = t.transpose();
    std::vector<cplx> row(a.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) row[c] = a(r, c);
        apply_block_inplace(row, n_bits, positions, tt);
        for (Eigen::Index c = 0; c < a.cols(); ++c) a(r, c) = row[c];
    }
}

// A <- T_emb^dag A T_emb
void conjugate_by_block(Eigen::MatrixXcd& a, int n_bits, const std::vector<int>& positions,
                        const Eigen::MatrixXcd& t) {
    const Eigen::MatrixXcd td = t.adjoint();
    left_apply_block(a, n_bits, positions, td);
    right_apply_block(a, n_bits, positions, t);
}

// Drops support qubits on which the operator acts as identity.
void shrink_support(SupportedOperator& op, double tol = 1e-12) {
    bool changed = true;
    while (changed && !op.support.empty()) {
        changed = false;
        const int k = static_cast<int>(op.support.size());
        const double scale = std::max(1.0, op.matrix.cwiseAbs().maxCoeff());
        for (int t = 0; t < k; ++t) {
            const int shift = k - 1 - t;
            const std::uint64_t bit = 1ULL << shift;
            const std::size_t half = op.matrix.rows() / 2;
            // reduced = (1/2) Tr_t[op]
            Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(half, half);
            auto sub_index = [&](std::size_t v) {
                const std::uint64_t low = v & (bit - 1);
                return ((v >> 1) & ~(bit - 1)) | low;
            };
            for (std::size_t r = 0; r < static_cast<std::size_t>(op.matrix.rows()); ++r) {
                for (std::size_t c = 0; c < static_cast<std::size_t>(op.matrix.cols()); ++c) {
                    if ((r & bit) != (c & bit)) continue;
                    reduced(sub_index(r), sub_index(c)) += 0.5 * op.matrix(r, c);
                }
            }
            // check op == I_t (x) reduced
            double residual = 0.0;
            for (std::size_t r = 0; r < static_cast<std::size_t>(op.matrix.rows()); ++r) {
                for (std::size_t c = 0; c < static_cast<std::size_t>(op.matrix.cols()); ++c) {
                    const cplx expected = (r & bit) == (c & bit)
                                              ? reduced(sub_index(r), sub_index(c))
                                              : cplx(0.0);
                    residual = std::max(residual, std::abs(op.matrix(r, c) - expected));
                    if (residual > tol * scale) break;
                }
                if (residual > tol * scale) break;
            }
            if (residual <= tol * scale) {
                std::vector<int> new_support;
                for (int u = 0; u < k; ++u)
                    if (u != t) new_support.push_back(op.support[u]);
                op.support = std::move(new_support);
                op.matrix = std::move(reduced);
                changed = true;
                break;
            }
        }
    }
}

}  // namespace

std::vector<SupportedOperator> transform_operator(const Mera& m, const PauliSum& h) {
    if (h.n_qubits() != m.n_sites())
        throw std::invalid_argument("transform_operator: qubit count mismatch");

    std::vector<SupportedOperator> out(h.size());
    const auto& tensors = m.tensors();
    parallel_for(h.size(), [&](std::size_t ti) {
        const PauliTerm& term = h.terms()[ti];
        SupportedOperator cur;
        std::vector<Axis> local_axes;
        for (int q = 0; q < h.n_qubits(); ++q) {
            if (term.string.axes[q] != Axis::I) {
                cur.support.push_back(q);
                local_axes.push_back(term.string.axes[q]);
            }
        }
        cur.matrix = term.coeff * pauli_matrix(local_axes);

        // Conjugate in reverse application order (finest layer first,
        // disentangler row before isometry row).
        int row_layer = -1;
        int row_kind = -1;
        for (auto it = tensors.rbegin(); it != tensors.rend(); ++it) {
            const MeraTensor& t = *it;
            const int kind_id = t.kind == MeraTensor::Kind::Isometry ? 0 : 1;
            if (t.layer != row_layer || kind_id != row_kind) {
                shrink_support(cur);
                row_layer = t.layer;
                row_kind = kind_id;
            }
            if (cur.support.empty()) continue;
            const bool touches = std::any_of(t.block.begin(), t.block.end(), [&](int q) {
                return std::find(cur.support.begin(), cur.support.end(), q) !=
                       cur.support.end();
            });
            if (!touches) continue;
            std::set<int> merged(cur.support.begin(), cur.support.end());
            merged.insert(t.block.begin(), t.block.end());
            std::vector<int> new_support(merged.begin(), merged.end());
            if (new_support.size() != cur.support.size())
                cur = embed_operator(cur, new_support);
            const auto pos = positions_in_support(cur.support, t.block);
            conjugate_by_block(cur.matrix, static_cast<int>(cur.support.size()), pos,
                               t.matrix);
        }
        shrink_support(cur);
        out[ti] = std::move(cur);
    });
    return out;
}

double energy_exact(const Mera& m, const Statevector& psi, const PauliSum& h) {
    return energy(apply_mera(psi, m), h);
}

PauliSum transformed_pauli_sum(const Mera& m, const PauliSum& h, double drop_threshold) {
    const auto transformed = transform_operator(m, h);
    std::vector<PauliTerm> terms;
    for (const auto& op : transformed) {
        const PauliSum part = pauli_decompose(op, m.n_sites(), drop_threshold, 1e-8);
        terms.insert(terms.end(), part.terms().begin(), part.terms().end());
    }
    return PauliSum(m.n_sites(), std::move(terms), drop_threshold);
}

EstimatorResult energy_shadow(const Mera& m, const ShadowSet& set, const PauliSum& h) {
    if (set.snapshots.empty()) throw std::invalid_argument("energy_shadow: empty shadow set");
    if (set.n_qubits != m.n_sites())
        throw std::invalid_argument("energy_shadow: qubit count mismatch");
    return estimate(set, transform_operator(m, h));
}

namespace {

// G[a, b] = sum_rest phi[(a, rest)] conj(chi[(b, rest)]) over the block bits.
Eigen::MatrixXcd ptrace_outer(const std::vector<cplx>& phi, const std::vector<cplx>& chi,
                              int n_qubits, const std::vector<int>& block) {
    const int k = static_cast<int>(block.size());
    const std::size_t bdim = 1ULL << k;
    std::uint64_t mask = 0;
    std::vector<std::uint64_t> pattern(bdim, 0);
    for (int t = 0; t < k; ++t) mask |= 1ULL << (n_qubits - 1 - block[t]);
    for (std::size_t b = 0; b < bdim; ++b)
        for (int t = 0; t < k; ++t)
            if ((b >> (k - 1 - t)) & 1) pattern[b] |= 1ULL << (n_qubits - 1 - block[t]);

    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(bdim, bdim);
    const std::size_t dim = phi.size();
    for (std::uint64_t base = 0;; base = ((base | mask) + 1) & ~mask) {
        for (std::size_t a = 0; a < bdim; ++a) {
            const cplx pa = phi[base | pattern[a]];
            if (pa == cplx(0.0)) continue;
            for (std::size_t b = 0; b < bdim; ++b)
                g(a, b) += pa * std::conj(chi[base | pattern[b]]);
        }
        if (((base | mask) + 1) >= dim) break;
    }
    return g;
}

Eigen::MatrixXcd ptrace_matrix(const Eigen::MatrixXcd& full, int n_qubits,
                               const std::vector<int>& block) {
    const int k = static_cast<int>(block.size());
    const std::size_t bdim = 1ULL << k;
    std::uint64_t mask = 0;
    std::vector<std::uint64_t> pattern(bdim, 0);
    for (int t = 0; t < k; ++t) mask |= 1ULL << (n_qubits - 1 - block[t]);
    for (std::size_t b = 0; b < bdim; ++b)
        for (int t = 0; t < k; ++t)
            if ((b >> (k - 1 - t)) & 1) pattern[b] |= 1ULL << (n_qubits - 1 - block[t]);

    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(bdim, bdim);
    const std::size_t dim = full.rows();
    for (std::uint64_t base = 0;; base = ((base | mask) + 1) & ~mask) {
        for (std::size_t a = 0; a < bdim; ++a)
            for (std::size_t b = 0; b < bdim; ++b)
                g(a, b) += full(base | pattern[a], base | pattern[b]);
        if (((base | mask) + 1) >= dim) break;
    }
    return g;
}

// Average of the tensor products of single-qubit dual factors.
Eigen::MatrixXcd dual_average(const ShadowSet& set) {
    const int n = set.n_qubits;
    const std::size_t dim = 1ULL << n;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd cur, next;
    for (const auto& snap : set.snapshots) {
        cur = Eigen::MatrixXcd::Ones(1, 1);
        for (int q = 0; q < n; ++q) {
            const Eigen::Matrix2cd d = dual_factor(snap.bases[q], snap.outcomes[q]);
            const Eigen::Index hd = cur.rows();
            next.resize(2 * hd, 2 * hd);
            next.block(0, 0, hd, hd) = d(0, 0) * cur;
            next.block(0, hd, hd, hd) = d(0, 1) * cur;
            next.block(hd, 0, hd, hd) = d(1, 0) * cur;
            next.block(hd, hd, hd, hd) = d(1, 1) * cur;
            cur.swap(next);
        }
        acc += cur;
    }
    return acc / static_cast<double>(set.size());
}

}  // namespace

GradientSet gradient(const Mera& m, const Statevector& psi, const PauliSum& h) {
    if (psi.n_qubits != m.n_sites() || h.n_qubits() != m.n_sites())
        throw std::invalid_argument("gradient: size mismatch");
    const int n = m.n_sites();

    Statevector chi = apply_mera(psi, m);
    Statevector lambda = apply_pauli_sum(chi, h);

    GradientSet grads(m.size());
    const auto& tensors = m.tensors();
    for (std::size_t idx = m.size(); idx-- > 0;) {
        const MeraTensor& t = tensors[idx];
        const Eigen::MatrixXcd adj = t.matrix.adjoint();
        apply_block_inplace(chi.amps, n, t.block, adj);
        grads[idx] = ptrace_outer(lambda.amps, chi.amps, n, t.block);
        apply_block_inplace(lambda.amps, n, t.block, adj);
    }
    return grads;
}

GradientSet gradient(const Mera& m, const ShadowSet& set, const PauliSum& h) {
    if (set.n_qubits != m.n_sites() || h.n_qubits() != m.n_sites())
        throw std::invalid_argument("gradient: size mismatch");
    const int n = m.n_sites();
    if (n > 10)
        throw std::invalid_argument(
            "gradient: shadow-interface gradient is dense in 4^n and capped at 10 qubits");

    const std::size_t n_tensors = m.size();
    const auto& tensors = m.tensors();

    // forward densities sigma_i = U_i ... U_1 rho U_1^dag ... U_i^dag
    std::vector<Eigen::MatrixXcd> sigma(n_tensors + 1);
    sigma[0] = dual_average(set);
    for (std::size_t i = 0; i < n_tensors; ++i) {
        sigma[i + 1] = sigma[i];
        left_apply_block(sigma[i + 1], n, tensors[i].block, tensors[i].matrix);
        right_apply_block(sigma[i + 1], n, tensors[i].block, tensors[i].matrix.adjoint());
    }

    Eigen::MatrixXcd lambda = to_dense(h).matrix;
    GradientSet grads(n_tensors);
    for (std::size_t idx = n_tensors; idx-- > 0;) {
        const MeraTensor& t = tensors[idx];
        Eigen::MatrixXcd applied = sigma[idx];
        left_apply_block(applied, n, t.block, t.matrix);
        const Eigen::MatrixXcd g_emb = lambda * applied;
        grads[idx] = ptrace_matrix(g_emb, n, t.block);
        conjugate_by_block(lambda, n, t.block, t.matrix);
    }
    return grads;
}

int support_after_layers(int initial_links, int layers) {
    if (initial_links < 1 || initial_links > 3)
        throw std::invalid_argument("support_after_layers: initial links must be 1, 2 or 3");
    if (layers < 0) throw std::invalid_argument("support_after_layers: negative layer count");
    int links = initial_links;
    for (int l = 0; l < layers; ++l) links = std::min(3, links + 1);
    return links * (1 << layers);
}

void save_mera(const Mera& m, const std::filesystem::path& path) {
    nlohmann::json j;
    j["format"] = "hmera-mera";
    j["version"] = 1;
    j["n_sites"] = m.n_sites();
    j["n_layers"] = m.n_layers();
    auto tensors = nlohmann::json::array();
    for (const auto& t : m.tensors()) {
        nlohmann::json tj;
        tj["kind"] = t.kind == MeraTensor::Kind::Isometry ? "isometry" : "disentangler";
        tj["layer"] = t.layer;
        tj["block"] = t.block;
        auto rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < t.matrix.rows(); ++r) {
            auto row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < t.matrix.cols(); ++c)
                row.push_back({t.matrix(r, c).real(), t.matrix(r, c).imag()});
            rows.push_back(std::move(row));
        }
        tj["matrix"] = std::move(rows);
        tensors.push_back(std::move(tj));
    }
    j["tensors"] = std::move(tensors);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_mera: cannot open " + path.string());
    out << j.dump(2) << "\n";
}

Mera load_mera(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_mera: cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    if (j.at("format").get<std::string>() != "hmera-mera" || j.at("version").get<int>() != 1)
        throw std::runtime_error("load_mera: unsupported container format");
    Mera m = Mera::identity(j.at("n_sites").get<int>(), j.at("n_layers").get<int>());
    const auto& tensors = j.at("tensors");
    if (tensors.size() != m.size())
        throw std::runtime_error("load_mera: tensor count does not match wiring");
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto& tj = tensors[i];
        const auto& ref = m.tensors()[i];
        const std::string kind = tj.at("kind").get<std::string>();
        const auto block = tj.at("block").get<std::vector<int>>();
        if (tj.at("layer").get<int>() != ref.layer || block != ref.block ||
            kind != (ref.kind == MeraTensor::Kind::Isometry ? "isometry" : "disentangler"))
            throw std::runtime_error("load_mera: wiring mismatch at tensor " +
                                     std::to_string(i));
        const auto& rows = tj.at("matrix");
        Eigen::MatrixXcd mat(ref.matrix.rows(), ref.matrix.cols());
        for (Eigen::Index r = 0; r < mat.rows(); ++r)
            for (Eigen::Index c = 0; c < mat.cols(); ++c)
                mat(r, c) = cplx(rows[r][c][0].get<double>(), rows[r][c][1].get<double>());
        m = m.with_tensor_matrix(i, std::move(mat));
    }
    if (m.max_isometry_residual() > 1e-10)
        throw NumericalError("load_mera: tensors violate the isometry tolerance");
    return m;
}

}  // namespace hmera
