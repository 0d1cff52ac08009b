#include "hmera/shadows.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

namespace hmera {

char basis_char(Basis b) {
    switch (b) {
        case Basis::X: return 'X';
        case Basis::Y: return 'Y';
        case Basis::Z: return 'Z';
    }
    return '?';
}

Basis basis_from_char(char c) {
    switch (c) {
        case 'X': return Basis::X;
        case 'Y': return Basis::Y;
        case 'Z': return Basis::Z;
        default: throw std::invalid_argument(std::string("invalid basis character: ") + c);
    }
}

namespace {

// Rotation taking the +-1 eigenstates of the measured Pauli to |0>, |1>.
const Eigen::Matrix2cd& basis_rotation(Basis b) {
    static const double s = 1.0 / std::sqrt(2.0);
    static const Eigen::Matrix2cd rx = (Eigen::Matrix2cd() << s, s, s, -s).finished();
    static const Eigen::Matrix2cd ry =
        (Eigen::Matrix2cd() << s, cplx(0, -s), s, cplx(0, s)).finished();
    static const Eigen::Matrix2cd rz = Eigen::Matrix2cd::Identity();
    switch (b) {
        case Basis::X: return rx;
        case Basis::Y: return ry;
        case Basis::Z: return rz;
    }
    return rz;
}

void rotate_single_qubit(std::vector<cplx>& amps, int n, int q, const Eigen::Matrix2cd& r) {
    const std::uint64_t bit = 1ULL << (n - 1 - q);
    const std::size_t dim = amps.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const cplx a0 = amps[i], a1 = amps[i | bit];
        amps[i] = r(0, 0) * a0 + r(0, 1) * a1;
        amps[i | bit] = r(1, 0) * a0 + r(1, 1) * a1;
    }
}

Snapshot measure_once(const Statevector& psi, std::mt19937_64& rng) {
    const int n = psi.n_qubits;
    std::uniform_int_distribution<int> pick_basis(0, 2);
    Snapshot snap;
    snap.bases.resize(n);
    snap.outcomes.resize(n);
    for (int q = 0; q < n; ++q) snap.bases[q] = static_cast<Basis>(pick_basis(rng));

    std::vector<cplx> rotated = psi.amps;
    for (int q = 0; q < n; ++q) {
        if (snap.bases[q] == Basis::Z) continue;
        rotate_single_qubit(rotated, n, q, basis_rotation(snap.bases[q]));
    }
    double total = 0.0;
    for (const auto& a : rotated) total += std::norm(a);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng) * total;
    double acc = 0.0;
    std::size_t chosen = rotated.size() - 1;
    for (std::size_t i = 0; i < rotated.size(); ++i) {
        acc += std::norm(rotated[i]);
        if (u < acc) {
            chosen = i;
            break;
        }
    }
    for (int q = 0; q < n; ++q)
        snap.outcomes[q] = static_cast<std::uint8_t>((chosen >> (n - 1 - q)) & 1);
    return snap;
}

}  // namespace

ShadowSet sample_snapshots(const Statevector& psi, std::size_t s, std::uint64_t seed) {
    if (s < 1) throw std::invalid_argument("sample_snapshots: need at least one snapshot");
    ShadowSet set;
    set.n_qubits = psi.n_qubits;
    set.meta = {seed, "ideal"};
    set.snapshots.resize(s);
    parallel_for(s, [&](std::size_t i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        set.snapshots[i] = measure_once(psi, rng);
    });
    return set;
}

ShadowSet sample_snapshots_noisy(const Circuit& c, const NoiseModel& m, std::size_t s,
                                 std::uint64_t seed, const std::string& source_tag) {
    if (s < 1) throw std::invalid_argument("sample_snapshots_noisy: need at least one snapshot");
    m.validate();
    ShadowSet set;
    set.n_qubits = c.n_qubits();
    set.meta = {seed,
                !source_tag.empty() ? source_tag : (m.is_noiseless() ? "ideal" : "noisy")};
    set.snapshots.resize(s);
    parallel_for(s, [&](std::size_t i) {
        const std::uint64_t base = derive_seed(seed, i);
        const Statevector psi = run_noisy_trajectory(c, m, base);
        std::uint64_t mix = base ^ 0x517cc1b727220a95ULL;
        std::mt19937_64 rng(splitmix64(mix));
        Snapshot snap = measure_once(psi, rng);
        if (m.e_ro > 0.0) {
            std::bernoulli_distribution flip(m.e_ro);
            for (auto& o : snap.outcomes)
                if (flip(rng)) o ^= 1;
        }
        set.snapshots[i] = snap;
    });
    return set;
}

Eigen::Matrix2cd dual_factor(Basis basis, int bit) {
    Eigen::Vector2cd v;
    const double s = 1.0 / std::sqrt(2.0);
    switch (basis) {
        case Basis::X: v << s, (bit ? -s : s); break;
        case Basis::Y: v << s, (bit ? cplx(0, -s) : cplx(0, s)); break;
        case Basis::Z:
            if (bit)
                v << 0, 1;
            else
                v << 1, 0;
            break;
    }
    return 3.0 * v * v.adjoint() - Eigen::Matrix2cd::Identity();
}

double snapshot_weight(const Snapshot& snap, const PauliTerm& term) {
    const int n = term.string.size();
    if (static_cast<int>(snap.bases.size()) != n)
        throw std::invalid_argument("snapshot_weight: size mismatch");
    double factor = 1.0;
    for (int q = 0; q < n; ++q) {
        const Axis a = term.string.axes[q];
        if (a == Axis::I) continue;
        if (static_cast<int>(snap.bases[q]) != static_cast<int>(a) - 1) return 0.0;
        factor *= snap.outcomes[q] ? -3.0 : 3.0;
    }
    const cplx w = term.coeff * factor;
    if (std::abs(w.imag()) > 1e-9 * (1.0 + std::abs(w.real())))
        throw NumericalError("snapshot_weight: complex weight for non-Hermitian term");
    return w.real();
}

namespace {

EstimatorResult reduce_weights(std::vector<double>&& weights) {
    const std::size_t s = weights.size();
    EstimatorResult r;
    r.s_used = s;
    r.mean = pairwise_sum(weights) / static_cast<double>(s);
    if (s > 1) {
        std::vector<double> sq(s);
        for (std::size_t i = 0; i < s; ++i) {
            const double d = weights[i] - r.mean;
            sq[i] = d * d;
        }
        r.std_err = std::sqrt(pairwise_sum(sq) / (static_cast<double>(s) *
                                                  static_cast<double>(s - 1)));
    }
    return r;
}

// Tr[(d_0 x d_1 x ... ) * M], folding one dual factor at a time.
double dense_term_weight(const Snapshot& snap, const SupportedOperator& term) {
    const int k = static_cast<int>(term.support.size());
    Eigen::MatrixXcd cur = term.matrix;
    for (int t = 0; t < k; ++t) {
        const int q = term.support[t];
        const Eigen::Matrix2cd d = dual_factor(snap.bases[q], snap.outcomes[q]);
        const Eigen::Index h = cur.rows() / 2;
        Eigen::MatrixXcd next(h, h);
        next = d(0, 0) * cur.block(0, 0, h, h) + d(0, 1) * cur.block(h, 0, h, h) +
               d(1, 0) * cur.block(0, h, h, h) + d(1, 1) * cur.block(h, h, h, h);
        cur = std::move(next);
    }
    const cplx val = cur(0, 0);
    if (std::abs(val.imag()) > 1e-9 * (1.0 + std::abs(val.real())))
        throw NumericalError("estimate: complex snapshot weight for non-Hermitian operator");
    return val.real();
}

}  // namespace

std::vector<double> snapshot_weights_dense(const ShadowSet& set,
                                           const std::vector<SupportedOperator>& obs) {
    for (const auto& term : obs)
        for (int q : term.support)
            if (q < 0 || q >= set.n_qubits)
                throw std::invalid_argument("estimate: operator support outside register");
    std::vector<double> weights(set.size());
    parallel_for(set.size(), [&](std::size_t i) {
        double w = 0.0;
        for (const auto& term : obs) w += dense_term_weight(set.snapshots[i], term);
        weights[i] = w;
    });
    return weights;
}

EstimatorResult estimate(const ShadowSet& set, const PauliSum& obs) {
    if (set.snapshots.empty()) throw std::invalid_argument("estimate: empty shadow set");
    if (obs.n_qubits() != set.n_qubits)
        throw std::invalid_argument("estimate: qubit count mismatch");
    std::vector<double> weights(set.size());
    parallel_for(set.size(), [&](std::size_t i) {
        double w = 0.0;
        for (const auto& term : obs.terms()) w += snapshot_weight(set.snapshots[i], term);
        weights[i] = w;
    });
    return reduce_weights(std::move(weights));
}

EstimatorResult estimate(const ShadowSet& set, const std::vector<SupportedOperator>& obs) {
    if (set.snapshots.empty()) throw std::invalid_argument("estimate: empty shadow set");
    return reduce_weights(snapshot_weights_dense(set, obs));
}

WeightResolvedVariance weight_resolved_variance(const ShadowSet& set, const PauliSum& h) {
    if (set.snapshots.empty())
        throw std::invalid_argument("weight_resolved_variance: empty shadow set");
    if (h.n_qubits() != set.n_qubits)
        throw std::invalid_argument("weight_resolved_variance: qubit count mismatch");

    const auto groups = group_by_weight(h);
    const std::size_t s = set.size();
    const std::size_t n_groups = groups.size();
    std::vector<int> group_weights;
    std::vector<const PauliSum*> group_sums;
    for (const auto& [w, g] : groups) {
        group_weights.push_back(w);
        group_sums.push_back(&g);
    }

    // omega[g][s]: per-snapshot weight of weight-group g
    std::vector<std::vector<double>> omega(n_groups, std::vector<double>(s));
    parallel_for(s, [&](std::size_t i) {
        for (std::size_t g = 0; g < n_groups; ++g) {
            double w = 0.0;
            for (const auto& term : group_sums[g]->terms())
                w += snapshot_weight(set.snapshots[i], term);
            omega[g][i] = w;
        }
    });

    std::vector<double> mean(n_groups);
    for (std::size_t g = 0; g < n_groups; ++g)
        mean[g] = pairwise_sum(omega[g]) / static_cast<double>(s);

    const double norm = s > 1 ? 1.0 / (static_cast<double>(s) * static_cast<double>(s - 1)) : 0.0;
    std::vector<std::vector<double>> cov(n_groups, std::vector<double>(n_groups, 0.0));
    std::vector<double> prod(s);
    for (std::size_t a = 0; a < n_groups; ++a) {
        for (std::size_t b = a; b < n_groups; ++b) {
            for (std::size_t i = 0; i < s; ++i)
                prod[i] = (omega[a][i] - mean[a]) * (omega[b][i] - mean[b]);
            cov[a][b] = cov[b][a] = pairwise_sum(prod) * norm;
        }
    }

    WeightResolvedVariance out;
    std::vector<double> contributions(n_groups);
    for (std::size_t a = 0; a < n_groups; ++a) {
        double c = 0.0;
        for (std::size_t b = 0; b < n_groups; ++b) c += cov[a][b];
        out.c_w[group_weights[a]] = c;
        contributions[a] = c;
    }
    out.total = pairwise_sum(contributions);
    return out;
}

std::uint64_t required_snapshots(double var_ref, std::uint64_t s_ref, double delta_e, double f) {
    if (!(var_ref > 0.0) || s_ref == 0 || !(delta_e > 0.0) || !(f > 0.0))
        throw std::invalid_argument("required_snapshots: all inputs must be positive");
    const double target = f * delta_e;
    const double s = var_ref * static_cast<double>(s_ref) / (target * target);
    return static_cast<std::uint64_t>(std::ceil(s));
}

double worst_case_bound(std::uint64_t m_obs, double eps, LocalityInput locality,
                        double max_norm) {
    if (!(eps > 0.0)) throw std::invalid_argument("worst_case_bound: eps must be positive");
    if (m_obs == 0) throw std::invalid_argument("worst_case_bound: need at least one observable");
    if (locality.value < 0)
        throw std::invalid_argument("worst_case_bound: locality must be non-negative");
    const double prefactor = locality.kind == LocalityInput::Kind::Qubits
                                 ? std::pow(4.0, locality.value)
                                 : std::pow(16.0, locality.value);
    return std::log(static_cast<double>(m_obs)) / (eps * eps) * prefactor * max_norm * max_norm;
}

int worst_case_locality(int layers) {
    if (layers < 0) throw std::invalid_argument("worst_case_locality: negative layer count");
    return 3 * (1 << layers);
}

void save_jsonl(const ShadowSet& set, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_jsonl: cannot open " + path.string());
    nlohmann::json header = {{"n_qubits", set.n_qubits},
                             {"seed", set.meta.seed},
                             {"source", set.meta.source},
                             {"s", set.size()}};
    out << header.dump() << "\n";
    for (const auto& snap : set.snapshots) {
        std::string b, o;
        b.reserve(snap.bases.size());
        o.reserve(snap.outcomes.size());
        for (Basis bb : snap.bases) b.push_back(basis_char(bb));
        for (auto bit : snap.outcomes) o.push_back(bit ? '1' : '0');
        out << nlohmann::json{{"b", b}, {"o", o}}.dump() << "\n";
    }
}

ShadowSet load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_jsonl: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_jsonl: missing header");
    const auto header = nlohmann::json::parse(line);
    ShadowSet set;
    set.n_qubits = header.at("n_qubits").get<int>();
    set.meta.seed = header.at("seed").get<std::uint64_t>();
    set.meta.source = header.at("source").get<std::string>();
    const auto s = header.at("s").get<std::size_t>();
    set.snapshots.reserve(s);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        const auto b = j.at("b").get<std::string>();
        const auto o = j.at("o").get<std::string>();
        if (b.size() != static_cast<std::size_t>(set.n_qubits) || o.size() != b.size())
            throw std::runtime_error("load_jsonl: malformed snapshot record");
        Snapshot snap;
        snap.bases.reserve(b.size());
        snap.outcomes.reserve(o.size());
        for (char c : b) snap.bases.push_back(basis_from_char(c));
        for (char c : o) snap.outcomes.push_back(c == '1' ? 1 : 0);
        set.snapshots.push_back(std::move(snap));
    }
    if (set.snapshots.size() != s)
        throw std::runtime_error("load_jsonl: snapshot count does not match header");
    return set;
}

}  // namespace hmera
