#include "rcs/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "rcs/errors.hpp"
#include "rcs/rng.hpp"
#include "rcs/stats.hpp"

namespace rcs {

std::uint64_t CandidateSet::member(std::uint64_t group, std::uint64_t i) const {
    std::uint64_t index = 0;
    for (int j = 0; j < l(); ++j)
        if ((i >> j) & 1) index |= std::uint64_t{1} << open_qubits[j];
    int bit = 0;
    std::uint64_t fixed = group_fixed[group];
    for (int q = 0; q < n_qubits; ++q) {
        if (std::find(open_qubits.begin(), open_qubits.end(), q) != open_qubits.end())
            continue;
        if ((fixed >> bit) & 1) index |= std::uint64_t{1} << q;
        ++bit;
    }
    return index;
}

CandidateSet build_candidate_set(int n_qubits, std::vector<int> open_qubits,
                                 std::uint64_t n_groups, std::uint64_t seed) {
    std::sort(open_qubits.begin(), open_qubits.end());
    if (std::adjacent_find(open_qubits.begin(), open_qubits.end()) != open_qubits.end())
        throw ConfigError("open qubits must be distinct");
    for (int q : open_qubits)
        if (q < 0 || q >= n_qubits) throw ConfigError("open qubit out of range");
    const int l = static_cast<int>(open_qubits.size());
    if (l > n_qubits) throw ConfigError("more open qubits than qubits");
    if (n_groups < 1) throw ConfigError("group count must be >= 1");
    if (l == n_qubits && n_groups > 1)
        throw ConfigError("all qubits open: group count must be 1 (groups would collide)");

    CandidateSet set;
    set.n_qubits = n_qubits;
    set.open_qubits = std::move(open_qubits);
    set.group_fixed.reserve(n_groups);
    const int n_fixed = n_qubits - l;
    if (n_fixed == 0) {
        set.group_fixed.push_back(0);  // exhaustive case, no randomness consumed
        return set;
    }
    Rng rng(seed);
    for (std::uint64_t g = 0; g < n_groups; ++g)
        set.group_fixed.push_back(rng.next_below(std::uint64_t{1} << n_fixed));

    std::vector<std::uint64_t> sorted = set.group_fixed;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] == sorted[i - 1]) ++set.duplicate_groups;
    return set;
}

double xeb(const SampleSet& samples, const ProbFn& q) {
    if (samples.bitstrings.empty()) throw ConfigError("XEB needs at least one sample");
    const double scale = std::pow(2.0, samples.n_qubits);
    double sum = 0;
    for (std::uint64_t s : samples.bitstrings) {
        const double prob = q(s);
        if (!(prob >= 0.0) || !std::isfinite(prob))
            throw ConfigError("missing or invalid ideal probability for a sample");
        sum += prob;
    }
    return scale * sum / static_cast<double>(samples.bitstrings.size()) - 1.0;
}

std::uint64_t lexicographic_key(std::uint64_t index, int n_qubits) {
    std::uint64_t key = 0;
    for (int q = 0; q < n_qubits; ++q)
        if ((index >> q) & 1) key |= std::uint64_t{1} << (n_qubits - 1 - q);
    return key;
}

SampleSet top_k_select(const CandidateSet& candidates, const ProbFn& p, std::uint64_t k) {
    if (k < 1 || k > candidates.size())
        throw ConfigError("top-k size k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(candidates.size()) + "]");
    struct Entry {
        double prob;
        std::uint64_t key;
        std::uint64_t index;
    };
    std::vector<Entry> entries;
    entries.reserve(candidates.size());
    const std::uint64_t per_group = std::uint64_t{1} << candidates.l();
    for (std::uint64_t g = 0; g < candidates.n_groups(); ++g) {
        for (std::uint64_t i = 0; i < per_group; ++i) {
            const std::uint64_t index = candidates.member(g, i);
            entries.push_back({p(index), lexicographic_key(index, candidates.n_qubits), index});
        }
    }
    auto before = [](const Entry& a, const Entry& b) {
        if (a.prob != b.prob) return a.prob > b.prob;
        return a.key < b.key;
    };
    std::nth_element(entries.begin(), entries.begin() + (k - 1), entries.end(), before);
    std::sort(entries.begin(), entries.begin() + k, before);

    SampleSet out;
    out.n_qubits = candidates.n_qubits;
    out.provenance = Provenance::TopK;
    out.k = k;
    out.bitstrings.reserve(k);
    for (std::uint64_t i = 0; i < k; ++i) out.bitstrings.push_back(entries[i].index);
    return out;
}

SampleSet direct_sample(const CandidateSet& candidates, const ProbFn& p,
                        std::uint64_t rng_seed) {
    SampleSet out;
    out.n_qubits = candidates.n_qubits;
    out.provenance = Provenance::Direct;
    Rng rng(rng_seed);
    const std::uint64_t per_group = std::uint64_t{1} << candidates.l();
    std::vector<double> probs(per_group);
    for (std::uint64_t g = 0; g < candidates.n_groups(); ++g) {
        double total = 0;
        for (std::uint64_t i = 0; i < per_group; ++i) {
            probs[i] = p(candidates.member(g, i));
            total += probs[i];
        }
        if (total <= 0.0)
            throw ConfigError("group " + std::to_string(g) +
                              " has zero total probability; cannot sample");
        double u = rng.next_double() * total;
        std::uint64_t pick = per_group - 1;
        for (std::uint64_t i = 0; i < per_group; ++i) {
            u -= probs[i];
            if (u <= 0.0) {
                pick = i;
                break;
            }
        }
        out.bitstrings.push_back(candidates.member(g, pick));
    }
    return out;
}

double predicted_topk_xeb(double fidelity, std::uint64_t candidate_size, std::uint64_t k) {
    if (fidelity < 0.0 || fidelity > 1.0) throw ConfigError("fidelity outside [0, 1]");
    if (k < 1 || k > candidate_size) throw ConfigError("k outside [1, candidate_size]");
    return fidelity * std::log(static_cast<double>(candidate_size) / static_cast<double>(k));
}

TopKLaw ideal_topk_law(double alpha) {
    if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("alpha must be in (0, 1]");
    TopKLaw law;
    law.xeb = -std::log(alpha);
    law.threshold = std::log(1.0 / alpha);
    law.tail_expectation = alpha * (1.0 - std::log(alpha));
    return law;
}

PorterThomasFit porter_thomas_check(std::span<const double> probs, int n_qubits) {
    if (probs.size() < 1000)
        throw ConfigError("Porter-Thomas check needs >= 1000 probabilities");
    const double scale = std::pow(2.0, n_qubits);
    std::vector<double> scaled(probs.size());
    double mean = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        scaled[i] = scale * probs[i];
        mean += scaled[i];
    }
    mean /= static_cast<double>(probs.size());
    KsResult ks = ks_test_exponential(std::move(scaled));
    return {ks.statistic, ks.p_value, mean};
}

std::string samples_to_text(const SampleSet& samples) {
    std::ostringstream out;
    out << "# provenance="
        << (samples.provenance == Provenance::TopK ? "top_k" : "direct") << "\n";
    if (samples.provenance == Provenance::TopK) out << "# k=" << samples.k << "\n";
    out << "# n_qubits=" << samples.n_qubits << "\n";
    for (std::uint64_t s : samples.bitstrings) {
        for (int q = 0; q < samples.n_qubits; ++q) out << (((s >> q) & 1) ? '1' : '0');
        out << '\n';
    }
    return out.str();
}

SampleSet samples_from_text(const std::string& text) {
    SampleSet samples;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# provenance=top_k", 0) == 0) samples.provenance = Provenance::TopK;
            else if (line.rfind("# k=", 0) == 0) samples.k = std::stoull(line.substr(4));
            else if (line.rfind("# n_qubits=", 0) == 0)
                samples.n_qubits = std::stoi(line.substr(11));
            continue;
        }
        std::uint64_t index = 0;
        for (std::size_t q = 0; q < line.size(); ++q)
            if (line[q] == '1') index |= std::uint64_t{1} << q;
        if (samples.n_qubits == 0) samples.n_qubits = static_cast<int>(line.size());
        samples.bitstrings.push_back(index);
    }
    return samples;
}

}  // namespace rcs
