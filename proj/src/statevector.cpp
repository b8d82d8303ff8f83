#include "rcs/statevector.hpp"

#include <cstring>
#include <istream>
#include <ostream>

#include "rcs/errors.hpp"

namespace rcs {

double StateVector::norm_sq() const {
    double s = 0.0;
    for (const cplx& a : amps) s += std::norm(a);
    return s;
}

StateVector make_zero_state(int n_qubits) {
    StateVector state;
    state.n_qubits = n_qubits;
    state.amps.assign(std::uint64_t{1} << n_qubits, cplx(0.0, 0.0));
    state.amps[0] = 1.0;
    return state;
}

namespace {

void apply_1q(StateVector& state, int q, const cplx* u) {
    const std::uint64_t dim = state.amps.size();
    const std::uint64_t bit = std::uint64_t{1} << q;
    for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const std::uint64_t j = i | bit;
        const cplx a0 = state.amps[i];
        const cplx a1 = state.amps[j];
        state.amps[i] = u[0] * a0 + u[1] * a1;
        state.amps[j] = u[2] * a0 + u[3] * a1;
    }
}

// Basis order within the 4-dim block: (bit of targets[0]) << 1 | bit of targets[1].
void apply_2q(StateVector& state, int qa, int qb, const cplx* u) {
    const std::uint64_t dim = state.amps.size();
    const std::uint64_t ba = std::uint64_t{1} << qa;
    const std::uint64_t bb = std::uint64_t{1} << qb;
    for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & (ba | bb)) continue;
        const std::uint64_t idx[4] = {i, i | bb, i | ba, i | ba | bb};
        cplx in[4], out[4];
        for (int r = 0; r < 4; ++r) in[r] = state.amps[idx[r]];
        for (int r = 0; r < 4; ++r)
            out[r] = u[4 * r + 0] * in[0] + u[4 * r + 1] * in[1] +
                     u[4 * r + 2] * in[2] + u[4 * r + 3] * in[3];
        for (int r = 0; r < 4; ++r) state.amps[idx[r]] = out[r];
    }
}

}  // namespace

void apply_gate(StateVector& state, const Gate& gate) {
    if (gate.targets.size() == 1) {
        apply_1q(state, gate.targets[0], gate.unitary.data());
    } else {
        apply_2q(state, gate.targets[0], gate.targets[1], gate.unitary.data());
    }
}

void apply_gate_dagger(StateVector& state, const Gate& gate) {
    const int d = gate.matrix_dim();
    std::vector<cplx> dag(gate.unitary.size());
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) dag[c * d + r] = std::conj(gate.unitary[r * d + c]);
    if (d == 2) {
        apply_1q(state, gate.targets[0], dag.data());
    } else {
        apply_2q(state, gate.targets[0], gate.targets[1], dag.data());
    }
}

StateVector simulate_exact(const Circuit& circuit, int cap) {
    if (circuit.n_qubits > cap)
        throw CapacityError("exact simulation capped at " + std::to_string(cap) +
                            " qubits, circuit has " + std::to_string(circuit.n_qubits));
    StateVector state = make_zero_state(circuit.n_qubits);
    for (const Layer& layer : circuit.layers)
        for (const Gate& gate : layer.gates) apply_gate(state, gate);
    return state;
}

std::uint64_t bitstring_to_index(const std::string& bitstring) {
    std::uint64_t idx = 0;
    for (std::size_t q = 0; q < bitstring.size(); ++q) {
        char c = bitstring[q];
        if (c != '0' && c != '1') throw ConfigError("bitstring must be 0/1");
        if (c == '1') idx |= std::uint64_t{1} << q;
    }
    return idx;
}

std::string index_to_bitstring(std::uint64_t index, int n_qubits) {
    std::string s(n_qubits, '0');
    for (int q = 0; q < n_qubits; ++q)
        if (index & (std::uint64_t{1} << q)) s[q] = '1';
    return s;
}

double ideal_probability(const StateVector& state, const std::string& bitstring) {
    if (static_cast<int>(bitstring.size()) != state.n_qubits)
        throw ConfigError("bitstring length " + std::to_string(bitstring.size()) +
                          " does not match n_qubits " + std::to_string(state.n_qubits));
    return std::norm(state.amps[bitstring_to_index(bitstring)]);
}

void dump_amplitudes(const StateVector& state, std::ostream& out) {
    char header[16] = {0};
    std::memcpy(header, "QSVD", 4);
    std::uint32_t version = 1;
    std::uint32_t n = static_cast<std::uint32_t>(state.n_qubits);
    std::memcpy(header + 4, &version, 4);
    std::memcpy(header + 8, &n, 4);
    out.write(header, 16);
    for (const cplx& a : state.amps) {
        double re = a.real(), im = a.imag();
        out.write(reinterpret_cast<const char*>(&re), 8);
        out.write(reinterpret_cast<const char*>(&im), 8);
    }
}

StateVector load_amplitudes(std::istream& in) {
    char header[16];
    in.read(header, 16);
    if (!in || std::memcmp(header, "QSVD", 4) != 0)
        throw ConfigError("bad amplitude dump header");
    std::uint32_t n;
    std::memcpy(&n, header + 8, 4);
    StateVector state;
    state.n_qubits = static_cast<int>(n);
    state.amps.resize(std::uint64_t{1} << n);
    for (cplx& a : state.amps) {
        double re, im;
        in.read(reinterpret_cast<char*>(&re), 8);
        in.read(reinterpret_cast<char*>(&im), 8);
        a = cplx(re, im);
    }
    if (!in) throw ConfigError("truncated amplitude dump");
    return state;
}

}  // namespace rcs
