#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rcs/contraction_plan.hpp"
#include "rcs/tensor_network.hpp"

namespace rcs {

// Subtask selection over K broken edges: m distinct assignments, bit i of an
// assignment is the value pinned on broken_labels[i].
struct BrokenEdgeConfig {
    std::vector<Label> broken_labels;
    std::vector<std::uint64_t> configurations;

    int k() const { return static_cast<int>(broken_labels.size()); }
    std::uint64_t m() const { return configurations.size(); }
    double predicted_fidelity() const;
};

// The first m assignments in Gray-code order from a seeded random start.
BrokenEdgeConfig make_broken_config(std::vector<Label> broken_labels, std::uint64_t m,
                                    std::uint64_t seed);

struct ExecutionStats {
    std::uint64_t flops = 0;       // counted multiply-adds, 8 real FLOPs each
    std::uint64_t peak_bytes = 0;  // max bytes alive in the executor at once
};

struct SubtaskTiming {
    std::uint64_t subtask_id = 0;
    std::uint64_t config_bits = 0;
    double wall_ms = 0;
    std::uint64_t flops = 0;
};

// Batched amplitudes of one candidate group: all 2^l open-qubit assignments
// over a shared non-open substring. amplitudes[i] has open-qubit bits i, with
// bit j belonging to the j-th smallest open qubit.
struct AmplitudeBatch {
    std::uint64_t group_id = 0;
    int n_open = 0;
    std::uint64_t fixed_bits = 0;  // values of non-open qubits, packed by qubit order
    std::vector<cplx> amplitudes;
};

// Single contraction with every label in `assignment` pinned. Returns the
// tensor over the remaining free labels, transposed so that bit j of the data
// index belongs to the j-th smallest open qubit. Throws NumericFault if any
// intermediate goes non-finite.
std::vector<cplx> execute_assignment(const TensorNetwork& network,
                                     const ContractionPlan& plan,
                                     const std::map<Label, int>& assignment,
                                     ExecutionStats* stats = nullptr);

// Path sum over the configurations in `config` (or exact when config is
// null), enumerating sliced assignments internally; `fixed_outputs` pins
// non-open output legs. Deterministic Kahan reduction in ascending
// configuration order regardless of worker count.
struct ContractResult {
    std::vector<cplx> amplitudes;
    std::vector<SubtaskTiming> timings;
    ExecutionStats stats;
};

ContractResult contract(const TensorNetwork& network, const ContractionPlan& plan,
                        const BrokenEdgeConfig* config,
                        const std::map<Label, int>& fixed_outputs = {},
                        int workers = 1);

AmplitudeBatch contract_group(const TensorNetwork& network, const ContractionPlan& plan,
                              const BrokenEdgeConfig* config, std::uint64_t group_id,
                              std::uint64_t fixed_bits);

// |<exact|approx>|^2 / (<exact|exact> <approx|approx>); 0 with a warning flag
// for a zero-norm approximation.
struct FidelityResult {
    double value = 0;
    bool zero_norm_warning = false;
};
FidelityResult state_fidelity(std::span<const cplx> approx, std::span<const cplx> exact);

std::string timings_to_csv(const std::vector<SubtaskTiming>& timings);

}  // namespace rcs
