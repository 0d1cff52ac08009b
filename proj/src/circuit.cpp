#include "hmera/circuit.hpp"

#include <cmath>

#include "json.hpp"

namespace hmera {

Gate Gate::block(std::vector<int> qubits, Eigen::MatrixXcd matrix) {
    Gate g;
    g.kind = Kind::Block;
    g.qubits = std::move(qubits);
    g.matrix = std::move(matrix);
    return g;
}

std::pair<std::size_t, std::size_t> Circuit::layer_range(std::size_t l) const {
    if (l >= layer_ends_.size()) throw std::out_of_range("Circuit::layer_range");
    const std::size_t begin = l == 0 ? 0 : layer_ends_[l - 1];
    return {begin, layer_ends_[l]};
}

void Circuit::validate_gate(const Gate& g) const {
    for (int q : g.qubits)
        if (q < 0 || q >= n_qubits_)
            throw std::invalid_argument("Circuit: qubit index out of range");
    switch (g.kind) {
        case Gate::Kind::Rzz:
            if (g.qubits.size() != 2 || g.qubits[0] == g.qubits[1])
                throw std::invalid_argument("Circuit: RZZ needs two distinct qubits");
            break;
        case Gate::Kind::Rx:
            if (g.qubits.size() != 1)
                throw std::invalid_argument("Circuit: RX needs one qubit");
            break;
        case Gate::Kind::Block: {
            const std::size_t dim = 1ULL << g.qubits.size();
            if (g.matrix.rows() != static_cast<Eigen::Index>(dim) ||
                g.matrix.cols() != g.matrix.rows())
                throw std::invalid_argument("Circuit: block matrix dimension mismatch");
            const double res =
                (g.matrix.adjoint() * g.matrix - Eigen::MatrixXcd::Identity(dim, dim))
                    .cwiseAbs()
                    .maxCoeff();
            if (res > 1e-10)
                throw std::invalid_argument("Circuit: block matrix is not unitary (residual " +
                                            format_double(res) + ")");
            break;
        }
    }
}

void Circuit::add_layer(std::vector<Gate> layer) {
    if (layer.empty()) return;
    for (const auto& g : layer) validate_gate(g);
    for (auto& g : layer) gates_.push_back(std::move(g));
    layer_ends_.push_back(gates_.size());
}

std::string Circuit::to_json() const {
    nlohmann::json j;
    j["n_qubits"] = n_qubits_;
    auto layers = nlohmann::json::array();
    for (std::size_t l = 0; l < n_layers(); ++l) {
        auto [b, e] = layer_range(l);
        auto layer = nlohmann::json::array();
        for (std::size_t i = b; i < e; ++i) {
            const Gate& g = gates_[i];
            nlohmann::json gj;
            switch (g.kind) {
                case Gate::Kind::Rzz:
                    gj = {{"gate", "rzz"}, {"qubits", g.qubits}, {"angle", g.angle}};
                    break;
                case Gate::Kind::Rx:
                    gj = {{"gate", "rx"}, {"qubits", g.qubits}, {"angle", g.angle}};
                    break;
                case Gate::Kind::Block: {
                    auto rows = nlohmann::json::array();
                    for (Eigen::Index r = 0; r < g.matrix.rows(); ++r) {
                        auto row = nlohmann::json::array();
                        for (Eigen::Index c = 0; c < g.matrix.cols(); ++c)
                            row.push_back({g.matrix(r, c).real(), g.matrix(r, c).imag()});
                        rows.push_back(std::move(row));
                    }
                    gj = {{"gate", "block"}, {"qubits", g.qubits}, {"matrix", std::move(rows)}};
                    break;
                }
            }
            layer.push_back(std::move(gj));
        }
        layers.push_back(std::move(layer));
    }
    j["layers"] = std::move(layers);
    return j.dump(2);
}

void apply_rzz_inplace(std::vector<cplx>& amps, int n_qubits, int a, int b, double theta) {
    const std::uint64_t bit_a = 1ULL << (n_qubits - 1 - a);
    const std::uint64_t bit_b = 1ULL << (n_qubits - 1 - b);
    const cplx aligned = std::polar(1.0, -theta / 2.0);
    const cplx opposed = std::polar(1.0, +theta / 2.0);
    const std::size_t dim = amps.size();
    for (std::size_t i = 0; i < dim; ++i) {
        const bool same = ((i & bit_a) != 0) == ((i & bit_b) != 0);
        amps[i] *= same ? aligned : opposed;
    }
}

void apply_rx_inplace(std::vector<cplx>& amps, int n_qubits, int q, double phi) {
    const std::uint64_t bit = 1ULL << (n_qubits - 1 - q);
    const double c = std::cos(phi / 2.0);
    const cplx s = cplx(0.0, -std::sin(phi / 2.0));
    const std::size_t dim = amps.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const std::size_t j = i | bit;
        const cplx a0 = amps[i], a1 = amps[j];
        amps[i] = c * a0 + s * a1;
        amps[j] = s * a0 + c * a1;
    }
}

void apply_gate_inplace(std::vector<cplx>& amps, int n_qubits, const Gate& g) {
    switch (g.kind) {
        case Gate::Kind::Rzz:
            apply_rzz_inplace(amps, n_qubits, g.qubits[0], g.qubits[1], g.angle);
            break;
        case Gate::Kind::Rx:
            apply_rx_inplace(amps, n_qubits, g.qubits[0], g.angle);
            break;
        case Gate::Kind::Block:
            apply_block_inplace(amps, n_qubits, g.qubits, g.matrix);
            break;
    }
}

Statevector apply_circuit(const Statevector& psi, const Circuit& c) {
    if (psi.n_qubits != c.n_qubits())
        throw std::invalid_argument("apply_circuit: qubit count mismatch");
    const double norm_in = psi.norm();
    Statevector out = psi;
    for (const auto& g : c.gates()) apply_gate_inplace(out.amps, out.n_qubits, g);
    const double norm_out = out.norm();
    if (std::abs(norm_out - norm_in) > 1e-10)
        throw NumericalError("apply_circuit: norm drifted from " + format_double(norm_in) +
                             " to " + format_double(norm_out));
    return out;
}

}  // namespace hmera
