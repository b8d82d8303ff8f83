#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rcs {

using cplx = std::complex<double>;

enum class GateKind { SqrtX, SqrtY, SqrtW, TwoQubit };

const char* gate_kind_name(GateKind kind);
GateKind gate_kind_from_name(const std::string& name);

// Fixed unitary for a gate kind, row-major. 2x2 for the single-qubit kinds,
// 4x4 (fSim(pi/2, pi/6)) for TwoQubit.
std::vector<cplx> gate_unitary(GateKind kind);

struct Gate {
    GateKind kind;
    std::vector<int> targets;    // 1 or 2 qubit indices
    std::vector<cplx> unitary;   // row-major, 4 or 16 entries

    int matrix_dim() const { return targets.size() == 1 ? 2 : 4; }
};

struct Layer {
    std::vector<Gate> gates;
};

// Immutable after construction; safe for shared reads.
struct Circuit {
    int n_qubits = 0;
    std::uint64_t seed = 0;
    std::string topology;
    std::vector<Layer> layers;          // alternating single-qubit / two-qubit layers
    bool exceeds_exact_cap = false;     // flagged when n is above the oracle default cap

    int n_cycles() const { return static_cast<int>(layers.size()) / 2; }
};

// Coupler patterns over a qubit graph. Pattern t of a two-qubit layer at cycle
// c is pattern_sequence[c % len]; each pattern is a disjoint set of pairs.
struct Topology {
    std::string name;
    int n_qubits = 0;
    std::vector<std::vector<std::pair<int, int>>> patterns;
    std::vector<int> sequence;          // indices into patterns, cycled per two-qubit layer
};

// Supported names: "line", "ring", "grid(R,C)".
Topology make_topology(const std::string& name, int n_qubits);

// One cycle = one layer of random single-qubit gates (no immediate repetition
// per qubit) followed by one layer of two-qubit gates on the coupler pattern.
Circuit gen_random_circuit(int n_qubits, int n_cycles, const std::string& topology,
                           std::uint64_t seed);

std::string circuit_to_json(const Circuit& circuit);
Circuit circuit_from_json(const std::string& text);

}  // namespace rcs
