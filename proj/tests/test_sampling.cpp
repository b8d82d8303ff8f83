#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "rcs/circuit.hpp"
#include "rcs/errors.hpp"
#include "rcs/rng.hpp"
#include "rcs/sampling.hpp"
#include "rcs/statevector.hpp"
#include "rcs/stats.hpp"

using namespace rcs;

namespace {

std::vector<int> iota_qubits(int n) {
    std::vector<int> qs(n);
    for (int i = 0; i < n; ++i) qs[i] = i;
    return qs;
}

ProbFn probs_of(const StateVector& state) {
    return [&state](std::uint64_t i) { return std::norm(state.amps[i]); };
}

}  // namespace

TEST_CASE("candidate set structure: n=4, open={0,1}, M=3") {
    CandidateSet set = build_candidate_set(4, {0, 1}, 3, 77);
    CHECK(set.l() == 2);
    CHECK(set.n_groups() == 3);
    CHECK(set.size() == 12);
    for (std::uint64_t g = 0; g < 3; ++g) {
        std::set<std::uint64_t> open_patterns, fixed_patterns;
        for (std::uint64_t i = 0; i < 4; ++i) {
            std::uint64_t s = set.member(g, i);
            open_patterns.insert(s & 0b0011);
            fixed_patterns.insert(s & 0b1100);
        }
        CHECK(open_patterns.size() == 4);   // all open substrings, exhaustive
        CHECK(fixed_patterns.size() == 1);  // shared non-open substring
    }
    // deterministic under seed
    CandidateSet again = build_candidate_set(4, {0, 1}, 3, 77);
    CHECK(again.group_fixed == set.group_fixed);
}

TEST_CASE("exhaustive candidate set consumes no randomness") {
    CandidateSet a = build_candidate_set(12, iota_qubits(12), 1, 1);
    CandidateSet b = build_candidate_set(12, iota_qubits(12), 1, 999);
    CHECK(a.group_fixed == b.group_fixed);
    CHECK(a.size() == 4096);
    for (std::uint64_t i = 0; i < 4096; ++i) CHECK(a.member(0, i) == i);
}

TEST_CASE("candidate set validation and duplicate accounting") {
    CHECK_THROWS_AS(build_candidate_set(4, {0, 0}, 1, 0), ConfigError);
    CHECK_THROWS_AS(build_candidate_set(4, {5}, 1, 0), ConfigError);
    CHECK_THROWS_AS(build_candidate_set(4, iota_qubits(4), 2, 0), ConfigError);
    CHECK_THROWS_AS(build_candidate_set(4, {0}, 0, 0), ConfigError);
    // 1 fixed bit and many groups force duplicates; they are permitted and counted
    CandidateSet dup = build_candidate_set(3, {0, 1}, 8, 5);
    CHECK(dup.duplicate_groups >= 6);
}

TEST_CASE("XEB trivial values") {
    SampleSet one;
    one.n_qubits = 12;
    one.bitstrings = {123};
    CHECK(xeb(one, [](std::uint64_t) { return 1.0 / 4096.0; }) == 0.0);
    CHECK_THROWS_AS(xeb(one, [](std::uint64_t) { return -0.5; }), ConfigError);
    SampleSet empty;
    empty.n_qubits = 12;
    CHECK_THROWS_AS(xeb(empty, [](std::uint64_t) { return 1.0; }), ConfigError);
}

TEST_CASE("XEB near 0 for uniform samples, near 1 for ideal samples") {
    const int n = 12;
    Circuit c = gen_random_circuit(n, n, "line", 8);
    StateVector state = simulate_exact(c);
    const std::size_t n_samples = 100000;

    SampleSet uniform;
    uniform.n_qubits = n;
    Rng rng(123);
    for (std::size_t i = 0; i < n_samples; ++i)
        uniform.bitstrings.push_back(rng.next_below(4096));
    CHECK(std::abs(xeb(uniform, probs_of(state))) <= 0.05);

    // inverse-CDF draws from the ideal distribution itself
    std::vector<double> cdf(4096);
    double acc = 0;
    for (int i = 0; i < 4096; ++i) {
        acc += std::norm(state.amps[i]);
        cdf[i] = acc;
    }
    SampleSet ideal;
    ideal.n_qubits = n;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double u = rng.next_double() * acc;
        ideal.bitstrings.push_back(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    }
    CHECK(xeb(ideal, probs_of(state)) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("top-k selection: full set, ties, determinism, range check") {
    CandidateSet tiny = build_candidate_set(2, {0, 1}, 1, 0);
    ProbFn flat = [](std::uint64_t) { return 0.25; };
    SampleSet all = top_k_select(tiny, flat, 4);
    CHECK(all.bitstrings.size() == 4);
    CHECK(all.provenance == Provenance::TopK);
    CHECK(all.k == 4);

    // equal probabilities: ties resolved by lexicographic bitstring order,
    // where character j is qubit j ("01" means qubit 1 set, index 2)
    SampleSet two = top_k_select(tiny, flat, 2);
    REQUIRE(two.bitstrings.size() == 2);
    CHECK(two.bitstrings[0] == 0);
    CHECK(two.bitstrings[1] == 2);

    CHECK_THROWS_AS(top_k_select(tiny, flat, 0), ConfigError);
    CHECK_THROWS_AS(top_k_select(tiny, flat, 5), ConfigError);
}

TEST_CASE("top-k XEB on exact probabilities follows ln(|S|/k)") {
    const int n = 16;
    Circuit c = gen_random_circuit(n, n, "line", 6);
    StateVector state = simulate_exact(c);
    CandidateSet all = build_candidate_set(n, iota_qubits(n), 1, 0);
    SampleSet top = top_k_select(all, probs_of(state), 1 << 6);
    const double measured = xeb(top, probs_of(state));
    CHECK(measured == doctest::Approx(std::log(std::pow(2.0, 10))).epsilon(0.7 / 6.93));
}

TEST_CASE("direct sampling") {
    CandidateSet set = build_candidate_set(6, {0, 1}, 64, 9);
    // all weight on open substring 0 within each group
    ProbFn spiked = [](std::uint64_t s) { return (s & 0b11) == 0 ? 1.0 : 0.0; };
    SampleSet spike_samples = direct_sample(set, spiked, 4);
    REQUIRE(spike_samples.bitstrings.size() == 64);
    for (std::uint64_t i = 0; i < 64; ++i) {
        CHECK((spike_samples.bitstrings[i] & 0b11) == 0);
        CHECK(spike_samples.bitstrings[i] == set.member(i, 0));
    }

    try {
        direct_sample(set, [](std::uint64_t) { return 0.0; }, 4);
        FAIL("expected a zero-probability group error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("group 0") != std::string::npos);
    }
}

TEST_CASE("direct sampling of a uniform group passes a chi-square test") {
    CandidateSet set = build_candidate_set(4, {0, 1}, 10000, 42);
    SampleSet samples = direct_sample(set, [](std::uint64_t) { return 1.0; }, 7);
    REQUIRE(samples.bitstrings.size() == 10000);
    double counts[4] = {0, 0, 0, 0};
    for (std::uint64_t s : samples.bitstrings) counts[s & 0b11] += 1.0;
    double stat = 0;
    for (double c : counts) stat += (c - 2500.0) * (c - 2500.0) / 2500.0;
    CHECK(chi_squared_pvalue(stat, 3) > 0.01);
}

TEST_CASE("predicted top-k XEB") {
    CHECK(predicted_topk_xeb(1.0, std::uint64_t{1} << 30, std::uint64_t{1} << 15) ==
          doctest::Approx(10.3972).epsilon(1e-4 / 10.3972));
    CHECK(predicted_topk_xeb(0.5, 1000, 1000) == 0.0);
    CHECK(predicted_topk_xeb(0.002, std::uint64_t{1} << 30, std::uint64_t{1} << 15) ==
          doctest::Approx(0.002 * 15.0 * std::log(2.0)));
    CHECK_THROWS_AS(predicted_topk_xeb(1.5, 100, 10), ConfigError);
    CHECK_THROWS_AS(predicted_topk_xeb(0.5, 100, 0), ConfigError);
}

TEST_CASE("ideal top-fraction law: closed form and Monte-Carlo oracle") {
    CHECK(ideal_topk_law(1.0).xeb == 0.0);
    TopKLaw law = ideal_topk_law(std::pow(2.0, -15));
    CHECK(law.xeb == doctest::Approx(10.3972).epsilon(1e-4 / 10.3972));
    CHECK(law.threshold == doctest::Approx(15.0 * std::log(2.0)));
    CHECK(law.tail_expectation ==
          doctest::Approx(std::pow(2.0, -15) * (1.0 + 15.0 * std::log(2.0))));
    CHECK_THROWS_AS(ideal_topk_law(0.0), ConfigError);
    CHECK_THROWS_AS(ideal_topk_law(1.5), ConfigError);

    // 10^7 Exponential(1) draws, top 10^-3 fraction
    const std::size_t n_draws = 10000000;
    const std::size_t top = n_draws / 1000;
    std::vector<double> draws(n_draws);
    Rng rng(17);
    for (double& x : draws) x = -std::log(1.0 - rng.next_double());
    std::nth_element(draws.begin(), draws.begin() + top, draws.end(),
                     std::greater<double>());
    double mean = 0;
    for (std::size_t i = 0; i < top; ++i) mean += draws[i];
    mean /= static_cast<double>(top);
    CHECK(mean - 1.0 == doctest::Approx(-std::log(1e-3)).epsilon(0.05 / 6.908));
}

TEST_CASE("pearson correlation basics") {
    std::vector<double> x = {0.1, 0.4, 0.2, 0.9, 0.5};
    std::vector<double> y = x;
    CHECK(pearson_r(x, y) == doctest::Approx(1.0));
    std::vector<double> neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i] + 3.0;
    CHECK(pearson_r(x, neg) == doctest::Approx(-1.0));
    std::vector<double> flat(x.size(), 0.5);
    CHECK_THROWS_AS(pearson_r(x, flat), ConfigError);
}

TEST_CASE("Porter-Thomas check: synthetic pass, deep pass, shallow fail") {
    const int n = 12;
    const double N = 4096.0;

    std::vector<double> synthetic(4096);
    Rng rng(3);
    for (double& p : synthetic) p = -std::log(1.0 - rng.next_double()) / N;
    PorterThomasFit self = porter_thomas_check(synthetic, n);
    CHECK(self.p_value > 0.01);
    CHECK(self.mean_scaled_prob == doctest::Approx(1.0).epsilon(0.05));

    Circuit deep = gen_random_circuit(n, n, "line", 11);
    StateVector deep_state = simulate_exact(deep);
    std::vector<double> deep_probs(4096);
    for (int i = 0; i < 4096; ++i) deep_probs[i] = std::norm(deep_state.amps[i]);
    CHECK(porter_thomas_check(deep_probs, n).p_value > 0.01);

    Circuit shallow = gen_random_circuit(n, 1, "line", 11);
    StateVector shallow_state = simulate_exact(shallow);
    std::vector<double> shallow_probs(4096);
    for (int i = 0; i < 4096; ++i) shallow_probs[i] = std::norm(shallow_state.amps[i]);
    CHECK(porter_thomas_check(shallow_probs, n).p_value < 0.01);

    std::vector<double> few(100, 0.01);
    CHECK_THROWS_AS(porter_thomas_check(few, 7), ConfigError);
}

TEST_CASE("samples text round trip") {
    SampleSet samples;
    samples.n_qubits = 5;
    samples.provenance = Provenance::TopK;
    samples.k = 3;
    samples.bitstrings = {0, 19, 31};
    std::string text = samples_to_text(samples);
    CHECK(text.find("# provenance=top_k") != std::string::npos);
    CHECK(text.find("# k=3") != std::string::npos);
    CHECK(text.find("11001") != std::string::npos);  // 19: qubits 0,1,4 set

    SampleSet back = samples_from_text(text);
    CHECK(back.n_qubits == 5);
    CHECK(back.provenance == Provenance::TopK);
    CHECK(back.k == 3);
    CHECK(back.bitstrings == samples.bitstrings);
}

TEST_CASE("lexicographic key reverses qubit bits") {
    CHECK(lexicographic_key(0, 4) == 0);
    CHECK(lexicographic_key(1, 4) == 8);   // "1000"
    CHECK(lexicographic_key(8, 4) == 1);   // "0001"
    CHECK(lexicographic_key(0b0110, 4) == 0b0110);
}
