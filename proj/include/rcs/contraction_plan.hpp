#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcs/tensor_network.hpp"

namespace rcs {

struct PlanStep {
    int lhs = -1, rhs = -1, result = -1;  // node ids; 0..n_tensors-1 are leaves
    std::vector<Label> result_labels;     // sorted ascending
    std::uint64_t summed = 0;             // number of summed binary indices
    std::uint64_t flops = 0;              // real FLOPs, 8 per complex multiply-add
    std::uint64_t result_bytes = 0;
};

// Pairwise contraction order plus the externally-enumerated index sets.
// Immutable once built; shared read-only by executors.
struct ContractionPlan {
    std::vector<PlanStep> steps;
    std::vector<Label> sliced;            // summed externally over all 2^s values
    std::vector<Label> broken;            // restricted to m of 2^K values
    std::vector<Label> fixed_outputs;     // output legs pinned per execution
    std::uint64_t flops_per_slice = 0;
    std::uint64_t traffic_bytes_per_slice = 0;
    std::uint64_t peak_bytes = 0;         // max live bytes incl. transposition buffers
    std::uint64_t memory_budget_bytes = 0;

    std::uint64_t n_slices() const { return std::uint64_t{1} << sliced.size(); }
    // Per-subtask totals; one subtask = one broken-edge configuration,
    // enumerating every sliced assignment internally.
    std::uint64_t subtask_flops() const { return flops_per_slice * n_slices(); }
    std::uint64_t subtask_traffic_bytes() const { return traffic_bytes_per_slice * n_slices(); }
};

enum class SearchEffort { Low, Medium, High };

// Greedy cost-minimizing pairing refined by simulated annealing over subtree
// rotations, then slice selection until the peak fits the budget. Deterministic
// under (network, budget, effort, seed).
ContractionPlan find_contraction_path(const TensorNetwork& network,
                                      std::uint64_t memory_budget_bytes,
                                      SearchEffort effort = SearchEffort::Medium,
                                      std::uint64_t seed = 0,
                                      const std::vector<Label>& broken = {});

// Break edges in the spacetime bulk (middle third of layers), greedily picking
// the edge whose removal most reduces the greedy-path cost, ties by label name.
std::vector<Label> select_broken_edges(const TensorNetwork& network, int k_edges,
                                       std::uint64_t seed = 0);

struct ComplexityReport {
    double per_subtask_flops = 0;
    double total_flops = 0;
    std::uint64_t peak_bytes = 0;
    double total_traffic_bytes = 0;
    std::uint64_t n_subtasks = 0;

    // 8*T_c/(P*t) with the complex-product factor 8 already folded into the
    // FLOP totals; P is device peak FLOP/s, t wall seconds.
    double efficiency(double device_peak_flops, double wall_seconds) const {
        return total_flops / (device_peak_flops * wall_seconds);
    }
};

ComplexityReport estimate_complexity(const ContractionPlan& plan, std::uint64_t n_subtasks);

// Documentation-scale operating point for the 53-qubit target task: a
// per-subtask cost of 1.0859e13 FLOPs over 344277 effective subtasks.
ComplexityReport published_scale_reference();

std::string plan_to_json(const ContractionPlan& plan, const TensorNetwork& network);

}  // namespace rcs
