#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcs/circuit.hpp"

namespace rcs {

using Label = int;

// Dense tensor with binary indices. labels[0] varies slowest (row-major).
struct Tensor {
    std::vector<Label> labels;
    std::vector<cplx> data;

    int rank() const { return static_cast<int>(labels.size()); }
    std::uint64_t size() const { return data.size(); }
};

// A wire segment between two gates, with its spacetime position. Used by the
// broken-edge selection policy.
struct WireEdge {
    Label label;
    int qubit;
    int layer;  // layer index of the gate that produced the segment
};

struct TensorNetwork {
    std::vector<Tensor> tensors;
    std::vector<std::string> label_names;   // indexed by label
    std::vector<Label> output_labels;       // final wire label per qubit
    std::vector<Label> open_labels;         // subset of output_labels left free
    std::vector<int> open_qubits;           // ascending, parallel to open_labels
    std::vector<WireEdge> wire_edges;       // internal (gate-to-gate) edges
    int n_qubits = 0;
    int n_layers = 0;

    const std::string& label_name(Label l) const { return label_names[l]; }
    Label label_by_name(const std::string& name) const;
    bool is_open(Label l) const;
};

// One tensor per gate plus rank-1 |0> caps on every input leg. Output legs of
// `open_qubits` are left free; the remaining output legs stay free in the
// network object and are pinned per execution assignment.
TensorNetwork circuit_to_network(const Circuit& circuit, const std::vector<int>& open_qubits);

}  // namespace rcs
