#include "rcs/tensor_network.hpp"

#include <algorithm>
#include <set>

#include "rcs/errors.hpp"

namespace rcs {

Label TensorNetwork::label_by_name(const std::string& name) const {
    for (std::size_t i = 0; i < label_names.size(); ++i)
        if (label_names[i] == name) return static_cast<Label>(i);
    throw ConfigError("unknown index label: " + name);
}

bool TensorNetwork::is_open(Label l) const {
    return std::find(open_labels.begin(), open_labels.end(), l) != open_labels.end();
}

TensorNetwork circuit_to_network(const Circuit& circuit, const std::vector<int>& open_qubits) {
    std::set<int> open_set(open_qubits.begin(), open_qubits.end());
    if (open_set.size() != open_qubits.size())
        throw ConfigError("duplicate open qubits");
    for (int q : open_qubits)
        if (q < 0 || q >= circuit.n_qubits)
            throw ConfigError("open qubit out of range: " + std::to_string(q));

    TensorNetwork net;
    net.n_qubits = circuit.n_qubits;
    net.n_layers = static_cast<int>(circuit.layers.size());

    auto new_label = [&net](const std::string& name) {
        net.label_names.push_back(name);
        return static_cast<Label>(net.label_names.size() - 1);
    };

    std::vector<Label> current(circuit.n_qubits);
    std::vector<int> produced_layer(circuit.n_qubits, -1);

    // |0> caps on every input leg
    for (int q = 0; q < circuit.n_qubits; ++q) {
        current[q] = new_label("q" + std::to_string(q) + ".in");
        Tensor cap;
        cap.labels = {current[q]};
        cap.data = {cplx(1.0, 0.0), cplx(0.0, 0.0)};
        net.tensors.push_back(std::move(cap));
    }

    auto consume = [&](int q) {
        if (produced_layer[q] >= 0)
            net.wire_edges.push_back({current[q], q, produced_layer[q]});
    };

    for (int t = 0; t < static_cast<int>(circuit.layers.size()); ++t) {
        for (const Gate& g : circuit.layers[t].gates) {
            if (g.targets.size() == 1) {
                const int q = g.targets[0];
                consume(q);
                Label out = new_label("q" + std::to_string(q) + ".t" + std::to_string(t));
                Tensor tensor;
                tensor.labels = {out, current[q]};  // index = out*2 + in = U[out][in]
                tensor.data = g.unitary;
                net.tensors.push_back(std::move(tensor));
                current[q] = out;
                produced_layer[q] = t;
            } else {
                const int a = g.targets[0], b = g.targets[1];
                consume(a);
                consume(b);
                Label oa = new_label("q" + std::to_string(a) + ".t" + std::to_string(t));
                Label ob = new_label("q" + std::to_string(b) + ".t" + std::to_string(t));
                Tensor tensor;
                // index = oa*8 + ob*4 + ia*2 + ib = U[oa*2+ob][ia*2+ib]
                tensor.labels = {oa, ob, current[a], current[b]};
                tensor.data = g.unitary;
                net.tensors.push_back(std::move(tensor));
                current[a] = oa;
                current[b] = ob;
                produced_layer[a] = produced_layer[b] = t;
            }
        }
    }

    net.output_labels = current;
    for (int q = 0; q < circuit.n_qubits; ++q) {
        if (open_set.count(q)) {
            net.open_qubits.push_back(q);
            net.open_labels.push_back(current[q]);
        }
    }
    return net;
}

}  // namespace rcs
