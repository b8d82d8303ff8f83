#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rcs/circuit.hpp"

namespace rcs {

// Dense 2^n amplitude vector. Qubit q maps to bit q of the array index
// (LSB = qubit 0). Exclusively owned while mutated, freely shared afterwards.
struct StateVector {
    int n_qubits = 0;
    std::vector<cplx> amps;

    double norm_sq() const;
};

constexpr int kDefaultExactCap = 24;

StateVector make_zero_state(int n_qubits);

// In-place stride-indexed gate application; no full-matrix construction.
void apply_gate(StateVector& state, const Gate& gate);
void apply_gate_dagger(StateVector& state, const Gate& gate);

StateVector simulate_exact(const Circuit& circuit, int cap = kDefaultExactCap);

// |amplitude(bitstring)|^2. Bitstring character j is the value of qubit j.
double ideal_probability(const StateVector& state, const std::string& bitstring);

std::uint64_t bitstring_to_index(const std::string& bitstring);
std::string index_to_bitstring(std::uint64_t index, int n_qubits);

// Binary amplitude dump: 16-byte header {magic "QSVD", version u32, n_qubits
// u32, pad u32}, then little-endian float64 (re, im) interleaved.
void dump_amplitudes(const StateVector& state, std::ostream& out);
StateVector load_amplitudes(std::istream& in);

}  // namespace rcs
