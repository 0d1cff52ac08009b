#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hmera/statevector.hpp"

namespace hmera {

/// One gate: a two-qubit ZZ rotation, a single-qubit X rotation, or a dense
/// block unitary on an ordered qubit list.
struct Gate {
    enum class Kind { Rzz, Rx, Block };
    Kind kind = Kind::Rx;
    std::vector<int> qubits;
    double angle = 0.0;        // Rzz/Rx only
    Eigen::MatrixXcd matrix;   // Block only

    static Gate rzz(int a, int b, double theta) { return {Kind::Rzz, {a, b}, theta, {}}; }
    static Gate rx(int q, double phi) { return {Kind::Rx, {q}, phi, {}}; }
    static Gate block(std::vector<int> qubits, Eigen::MatrixXcd matrix);
};

/// Ordered gate list with layer boundaries. Layers group gates that act in the
/// same time slice; the noisy simulator attaches relaxation after each layer.
class Circuit {
public:
    explicit Circuit(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 1) throw std::invalid_argument("Circuit: need at least one qubit");
    }

    int n_qubits() const { return n_qubits_; }
    const std::vector<Gate>& gates() const { return gates_; }
    std::size_t n_layers() const { return layer_ends_.size(); }
    /// [begin, end) gate-index range of layer l.
    std::pair<std::size_t, std::size_t> layer_range(std::size_t l) const;

    /// Appends a non-empty layer of gates; empty layers are dropped.
    void add_layer(std::vector<Gate> layer);

    std::string to_json() const;

private:
    void validate_gate(const Gate& g) const;

    int n_qubits_;
    std::vector<Gate> gates_;
    std::vector<std::size_t> layer_ends_;
};

/// RZZ(i,j,theta): phase e^{-i theta/2} on aligned bits, e^{+i theta/2} otherwise.
void apply_rzz_inplace(std::vector<cplx>& amps, int n_qubits, int a, int b, double theta);
/// RX(q,phi): standard X rotation by half-angle phi/2.
void apply_rx_inplace(std::vector<cplx>& amps, int n_qubits, int q, double phi);
void apply_gate_inplace(std::vector<cplx>& amps, int n_qubits, const Gate& g);

/// Applies all gates in order; checks norm preservation to 1e-10.
Statevector apply_circuit(const Statevector& psi, const Circuit& c);

}  // namespace hmera
