#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <vector>

#include "rcs/circuit.hpp"
#include "rcs/contraction_engine.hpp"
#include "rcs/contraction_plan.hpp"
#include "rcs/errors.hpp"
#include "rcs/statevector.hpp"
#include "rcs/stats.hpp"
#include "rcs/tensor_network.hpp"

using namespace rcs;

namespace {

constexpr std::uint64_t kBig = std::uint64_t{1} << 30;

std::vector<int> iota_qubits(int n) {
    std::vector<int> qs(n);
    for (int i = 0; i < n; ++i) qs[i] = i;
    return qs;
}

double rel_err(cplx got, cplx want) {
    const double mag = std::abs(want);
    const double err = std::abs(got - want);
    return mag > 1e-14 ? err / mag : err;
}

struct ApproxSetup {
    TensorNetwork net;
    ContractionPlan plan;
    BrokenEdgeConfig config;
};

ApproxSetup broken_setup(const Circuit& circuit, int k_edges, std::uint64_t m,
                         std::uint64_t seed) {
    ApproxSetup s;
    s.net = circuit_to_network(circuit, iota_qubits(circuit.n_qubits));
    std::vector<Label> broken = select_broken_edges(s.net, k_edges, seed);
    s.plan = find_contraction_path(s.net, kBig, SearchEffort::Low, seed, broken);
    s.config = make_broken_config(broken, m, seed);
    return s;
}

}  // namespace

TEST_CASE("complete path sum reproduces the exact contraction") {
    for (int K : {2, 4}) {
        Circuit c = gen_random_circuit(10, 10, "line", 40 + K);
        ApproxSetup s = broken_setup(c, K, std::uint64_t{1} << K, 1);
        TensorNetwork exact_net = circuit_to_network(c, iota_qubits(10));
        ContractionPlan exact_plan = find_contraction_path(exact_net, kBig, SearchEffort::Low);
        std::vector<cplx> full = contract(exact_net, exact_plan, nullptr).amplitudes;
        std::vector<cplx> summed = contract(s.net, s.plan, &s.config).amplitudes;
        REQUIRE(summed.size() == full.size());
        for (std::size_t i = 0; i < full.size(); ++i)
            CHECK(rel_err(summed[i], full[i]) < 1e-10);
    }
}

TEST_CASE("path sum is linear over disjoint configuration sets") {
    Circuit c = gen_random_circuit(10, 10, "line", 51);
    ApproxSetup s = broken_setup(c, 4, 8, 2);
    BrokenEdgeConfig lo = s.config, hi = s.config;
    lo.configurations.assign(s.config.configurations.begin(),
                             s.config.configurations.begin() + 4);
    hi.configurations.assign(s.config.configurations.begin() + 4,
                             s.config.configurations.end());
    std::vector<cplx> all = contract(s.net, s.plan, &s.config).amplitudes;
    std::vector<cplx> a = contract(s.net, s.plan, &lo).amplitudes;
    std::vector<cplx> b = contract(s.net, s.plan, &hi).amplitudes;
    for (std::size_t i = 0; i < all.size(); ++i)
        CHECK(std::abs((a[i] + b[i]) - all[i]) < 1e-12);
}

TEST_CASE("summed amplitudes are bit-identical for any worker count") {
    Circuit c = gen_random_circuit(10, 10, "ring", 62);
    ApproxSetup s = broken_setup(c, 5, 16, 3);
    std::vector<cplx> base = contract(s.net, s.plan, &s.config, {}, 1).amplitudes;
    for (int workers : {2, 4, 8}) {
        std::vector<cplx> other = contract(s.net, s.plan, &s.config, {}, workers).amplitudes;
        REQUIRE(other.size() == base.size());
        CHECK(std::memcmp(other.data(), base.data(), base.size() * sizeof(cplx)) == 0);
    }
}

TEST_CASE("Gray-code configurations are distinct and bounds are enforced") {
    std::vector<Label> labels = {3, 7, 9, 11, 13, 15};
    BrokenEdgeConfig config = make_broken_config(labels, 64, 5);
    CHECK(config.k() == 6);
    CHECK(config.m() == 64);
    std::set<std::uint64_t> seen(config.configurations.begin(), config.configurations.end());
    CHECK(seen.size() == 64);
    for (std::uint64_t bits : config.configurations) CHECK(bits < 64);
    CHECK(config.predicted_fidelity() == doctest::Approx(1.0));

    BrokenEdgeConfig partial = make_broken_config(labels, 6, 5);
    CHECK(partial.predicted_fidelity() == doctest::Approx(6.0 / 64.0));
    // consecutive Gray assignments differ in exactly one bit
    for (std::size_t i = 1; i < partial.configurations.size(); ++i) {
        std::uint64_t diff = partial.configurations[i] ^ partial.configurations[i - 1];
        CHECK((diff & (diff - 1)) == 0);
        CHECK(diff != 0);
    }

    CHECK_THROWS_AS(make_broken_config(labels, 0, 1), ConfigError);
    CHECK_THROWS_AS(make_broken_config(labels, 65, 1), ConfigError);
}

TEST_CASE("state_fidelity basics") {
    std::vector<cplx> e = {cplx(1, 0), cplx(0, 0)};
    std::vector<cplx> same = e;
    std::vector<cplx> ortho = {cplx(0, 0), cplx(0, 1)};
    std::vector<cplx> scaled = {cplx(0, 2), cplx(0, 0)};  // phase and scale invariant
    CHECK(state_fidelity(same, e).value == doctest::Approx(1.0));
    CHECK(state_fidelity(ortho, e).value == doctest::Approx(0.0));
    CHECK(state_fidelity(scaled, e).value == doctest::Approx(1.0));

    std::vector<cplx> zero = {cplx(0, 0), cplx(0, 0)};
    FidelityResult r = state_fidelity(zero, e);
    CHECK(r.value == 0.0);
    CHECK(r.zero_norm_warning);
    CHECK_THROWS_AS(state_fidelity(e, zero), ConfigError);
    std::vector<cplx> shorter = {cplx(1, 0)};
    CHECK_THROWS_AS(state_fidelity(shorter, e), ConfigError);
}

TEST_CASE("single-configuration fidelity tracks 2^-K; correlation decays with K") {
    const int n = 12, n_seeds = 20;
    std::vector<double> fid1, fid8, r1, r8;
    for (int seed = 1; seed <= n_seeds; ++seed) {
        Circuit c = gen_random_circuit(n, n, "line", 300 + seed);
        StateVector oracle = simulate_exact(c);
        TensorNetwork net = circuit_to_network(c, iota_qubits(n));
        std::vector<Label> eight = select_broken_edges(net, 8, seed);
        for (int K : {1, 8}) {
            std::vector<Label> broken(eight.begin(), eight.begin() + K);
            ContractionPlan plan =
                find_contraction_path(net, kBig, SearchEffort::Low, seed, broken);
            BrokenEdgeConfig config = make_broken_config(broken, 1, seed);
            std::vector<cplx> approx = contract(net, plan, &config).amplitudes;
            const double fid = state_fidelity(approx, oracle.amps).value;
            std::vector<double> re_a(approx.size()), re_e(approx.size());
            for (std::size_t i = 0; i < approx.size(); ++i) {
                re_a[i] = approx[i].real();
                re_e[i] = oracle.amps[i].real();
            }
            const double r = pearson_r(re_e, re_a);
            (K == 1 ? fid1 : fid8).push_back(fid);
            (K == 1 ? r1 : r8).push_back(r);
        }
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return s / v.size();
    };
    CHECK(std::abs(mean(fid1) - 0.5) < 0.1);
    CHECK(mean(fid8) > 0.5 / 256.0);
    CHECK(mean(fid8) < 2.0 / 256.0);
    CHECK(mean(r1) > 0.0);
    CHECK(mean(r8) > 0.0);
    CHECK(mean(r8) < mean(r1));
}

TEST_CASE("contract_group pins the non-open outputs correctly") {
    const int n = 8;
    Circuit c = gen_random_circuit(n, n, "line", 73);
    const std::vector<int> open = {1, 3};
    TensorNetwork net = circuit_to_network(c, open);
    ContractionPlan plan = find_contraction_path(net, kBig, SearchEffort::Low);
    StateVector oracle = simulate_exact(c);
    const std::vector<int> fixed_qubits = {0, 2, 4, 5, 6, 7};

    for (std::uint64_t bits : {std::uint64_t{0}, std::uint64_t{0b001011},
                               std::uint64_t{0b111111}}) {
        AmplitudeBatch batch = contract_group(net, plan, nullptr, 9, bits);
        CHECK(batch.group_id == 9);
        CHECK(batch.n_open == 2);
        REQUIRE(batch.amplitudes.size() == 4);
        for (std::uint64_t i = 0; i < 4; ++i) {
            std::uint64_t full = 0;
            if (i & 1) full |= 1 << 1;
            if (i & 2) full |= 1 << 3;
            for (std::size_t b = 0; b < fixed_qubits.size(); ++b)
                if ((bits >> b) & 1) full |= std::uint64_t{1} << fixed_qubits[b];
            CHECK(rel_err(batch.amplitudes[i], oracle.amps[full]) < 1e-8);
        }
    }
}

TEST_CASE("non-finite intermediates raise a numeric fault with the step index") {
    TensorNetwork net;
    net.n_qubits = 1;
    net.label_names = {"i", "j"};
    Tensor A, B;
    A.labels = {0, 1};
    A.data = {cplx(std::numeric_limits<double>::infinity(), 0), cplx(0, 0), cplx(0, 0),
              cplx(1, 0)};
    B.labels = {1};
    B.data = {cplx(1, 0), cplx(1, 0)};
    net.tensors = {A, B};
    net.output_labels = {0};
    net.open_labels = {0};
    net.open_qubits = {0};
    ContractionPlan plan = find_contraction_path(net, kBig);

    try {
        contract(net, plan, nullptr);
        FAIL("expected a NumericFault");
    } catch (const NumericFault& e) {
        CHECK(e.step_index == 0);
        CHECK(e.exit_code == 3);
    }
}

TEST_CASE("assignment and configuration validation") {
    Circuit c = gen_random_circuit(6, 6, "line", 9);
    TensorNetwork net = circuit_to_network(c, iota_qubits(6));
    ContractionPlan plan = find_contraction_path(net, kBig, SearchEffort::Low);

    CHECK_THROWS_AS(execute_assignment(net, plan, {{9999, 0}}), ConfigError);
    CHECK_THROWS_AS(execute_assignment(net, plan, {{0, 2}}), ConfigError);
    CHECK_THROWS_AS(contract(net, plan, nullptr, {}, 0), ConfigError);

    // config labels must match the plan's broken set
    BrokenEdgeConfig config = make_broken_config({net.wire_edges[0].label}, 1, 0);
    CHECK_THROWS_AS(contract(net, plan, &config), ConfigError);
    std::vector<Label> broken = select_broken_edges(net, 2);
    ContractionPlan broken_plan =
        find_contraction_path(net, kBig, SearchEffort::Low, 0, broken);
    CHECK_THROWS_AS(contract(net, broken_plan, nullptr), ConfigError);
}

TEST_CASE("timing log format") {
    Circuit c = gen_random_circuit(8, 8, "line", 9);
    ApproxSetup s = broken_setup(c, 3, 4, 7);
    ContractResult r = contract(s.net, s.plan, &s.config);
    REQUIRE(r.timings.size() == 4);
    std::string csv = timings_to_csv(r.timings);
    CHECK(csv.rfind("subtask_id,config_bits,wall_ms,flops\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    for (std::size_t t = 0; t < r.timings.size(); ++t) {
        CHECK(r.timings[t].subtask_id == t);
        CHECK(r.timings[t].config_bits == s.config.configurations[t]);
        CHECK(r.timings[t].flops > 0);
    }
}
