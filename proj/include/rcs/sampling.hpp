#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rcs {

// Probability of the bitstring with the given index (qubit q = bit q).
using ProbFn = std::function<double(std::uint64_t)>;

// M groups sharing open-qubit positions; each group iterates all 2^l open
// substrings over one fixed non-open substring. Groups may repeat a fixed
// substring; the count is recorded.
struct CandidateSet {
    int n_qubits = 0;
    std::vector<int> open_qubits;            // ascending
    std::vector<std::uint64_t> group_fixed;  // non-open bits, packed by qubit order
    int duplicate_groups = 0;

    int l() const { return static_cast<int>(open_qubits.size()); }
    std::uint64_t n_groups() const { return group_fixed.size(); }
    std::uint64_t size() const { return n_groups() << l(); }
    // full bitstring index of member i of group L
    std::uint64_t member(std::uint64_t group, std::uint64_t i) const;
};

CandidateSet build_candidate_set(int n_qubits, std::vector<int> open_qubits,
                                 std::uint64_t n_groups, std::uint64_t seed);

enum class Provenance { Direct, TopK };

struct SampleSet {
    int n_qubits = 0;
    std::vector<std::uint64_t> bitstrings;
    Provenance provenance = Provenance::Direct;
    std::uint64_t k = 0;  // for top-k
};

// (2^n/|S|) * sum q(s) - 1
double xeb(const SampleSet& samples, const ProbFn& q);

// The k candidates with the largest probabilities; ties broken by
// lexicographic bitstring order. Deterministic in (candidates, k).
SampleSet top_k_select(const CandidateSet& candidates, const ProbFn& p, std::uint64_t k);

// One draw per group from the within-group normalized probabilities.
SampleSet direct_sample(const CandidateSet& candidates, const ProbFn& p,
                        std::uint64_t rng_seed);

double predicted_topk_xeb(double fidelity, std::uint64_t candidate_size, std::uint64_t k);

// Closed-form top-fraction statistics under Porter-Thomas output probabilities.
struct TopKLaw {
    double xeb = 0;               // -ln(alpha)
    double threshold = 0;         // t = ln(1/alpha)
    double tail_expectation = 0;  // alpha * (1 - ln(alpha))
};
TopKLaw ideal_topk_law(double alpha);

struct PorterThomasFit {
    double ks_statistic = 0;
    double p_value = 0;
    double mean_scaled_prob = 0;  // mean of 2^n * q, ideally 1
};
PorterThomasFit porter_thomas_check(std::span<const double> probs, int n_qubits);

struct MetricsReport {
    double xeb = 0;
    double fidelity = 0;
    double predicted_xeb = 0;
    double pearson_r = 0;
    double pt_ks_statistic = 0;
    double pt_p_value = 0;
    double xeb_over_fidelity = 0;
};

// Lexicographic bitstring order key ("0...0" < "0...1" < ...); qubit 0 is the
// first character, so comparison reverses the index bits.
std::uint64_t lexicographic_key(std::uint64_t index, int n_qubits);

std::string samples_to_text(const SampleSet& samples);
SampleSet samples_from_text(const std::string& text);

}  // namespace rcs
