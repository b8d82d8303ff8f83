#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcs/circuit.hpp"
#include "rcs/contraction_engine.hpp"
#include "rcs/sampling.hpp"
#include "rcs/statevector.hpp"

namespace rcs {

enum class SampleMode { Direct, TopK };

struct ExperimentConfig {
    // circuit
    int n_qubits = 12;
    int n_cycles = 12;
    std::string topology = "line";
    std::uint64_t seed = 1;
    // approximation
    int broken_edges = 0;        // K
    std::uint64_t m_configs = 1; // m
    // candidate set
    std::vector<int> open_qubits;  // empty -> first `l_open` qubits
    int l_open = 4;
    std::uint64_t n_groups = 1 << 12;  // M
    // post-processing
    SampleMode sample_mode = SampleMode::TopK;
    std::uint64_t k = 1 << 8;
    // execution
    int workers = 1;
    std::uint64_t memory_budget_bytes = std::uint64_t{80} << 20;
    std::string precision = "f64";
    int oracle_cap = kDefaultExactCap;
    std::string effort = "medium";
    // output
    std::string out_dir = ".";

    std::vector<int> resolved_open_qubits() const;
    void validate() const;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

// Circuit -> network -> broken-edge plan -> summed approximate state, plus the
// oracle state when n fits under the cap.
struct PipelineResult {
    Circuit circuit;
    TensorNetwork network;
    ContractionPlan plan;
    BrokenEdgeConfig broken_config;
    std::vector<cplx> approx_state;  // full 2^n, all output legs open
    std::optional<StateVector> exact;
    std::vector<SubtaskTiming> timings;
    ExecutionStats stats;
};

PipelineResult run_approx_state(const ExperimentConfig& config);

struct RunArtifacts {
    MetricsReport metrics;
    std::string metrics_json;
    std::string samples_text;
    SampleSet samples;
};

// Full pipeline; writes circuit.json, plan.json, samples.txt, metrics.json and
// timings.csv under config.out_dir.
RunArtifacts cmd_run(const ExperimentConfig& config);

struct ScalingReport {
    double a = 0;  // time ~ a/w + b
    double b = 0;
    double r_squared = 0;
    double extrapolated_time = 0;
    int extrapolated_workers = 0;
    std::vector<int> worker_counts;
    std::vector<double> times_s;
};

// Least-squares fit of time against 1/workers.
ScalingReport fit_scaling(const std::vector<int>& workers, const std::vector<double>& times_s,
                          int extrapolate_at);

// Runs the configured contraction once per worker count and fits the timings.
ScalingReport cmd_scaling(const ExperimentConfig& config, const std::vector<int>& worker_counts,
                          int extrapolate_at = 0);

struct EnergyModel {
    double device_power_watts = 0;
    int device_count = 0;
    double wall_seconds = 0;

    double energy_kwh() const {
        return device_power_watts * device_count * wall_seconds / 3.6e6;
    }
};

// Declared-power model, not a measurement; the report says so.
std::string cmd_energy(const EnergyModel& model);

enum class Figure { FidelityVsK, AmplificationVsK, Scaling, PtHistogram };
Figure figure_from_name(const std::string& name);

// Desk-scale datasets for external plotting; one "x,y,y_predicted,y_err" CSV
// per curve, written under out_dir. Returns the file names.
std::vector<std::string> cmd_reproduce(Figure figure, const std::string& out_dir);

std::string metrics_to_json(const MetricsReport& metrics, const ExperimentConfig& config);

}  // namespace rcs
