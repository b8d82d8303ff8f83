#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "rcs/circuit.hpp"
#include "rcs/errors.hpp"

using namespace rcs;

namespace {

// row-major product of two d x d complex matrices
std::vector<cplx> matmul(const std::vector<cplx>& a, const std::vector<cplx>& b, int d) {
    std::vector<cplx> out(d * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            for (int j = 0; j < d; ++j) out[i * d + j] += a[i * d + k] * b[k * d + j];
    return out;
}

std::vector<cplx> dagger(const std::vector<cplx>& a, int d) {
    std::vector<cplx> out(d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out[j * d + i] = std::conj(a[i * d + j]);
    return out;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

std::vector<cplx> identity(int d) {
    std::vector<cplx> out(d * d, 0.0);
    for (int i = 0; i < d; ++i) out[i * d + i] = 1.0;
    return out;
}

}  // namespace

TEST_CASE("sqrt gates square to their Pauli targets") {
    const cplx i(0.0, 1.0);
    const double s2 = std::sqrt(2.0);
    const std::vector<cplx> X = {0, 1, 1, 0};
    const std::vector<cplx> Y = {0, -i, i, 0};
    const std::vector<cplx> W = {0, (1.0 - i) / s2, (1.0 + i) / s2, 0};  // (X+Y)/sqrt(2)

    auto sx = gate_unitary(GateKind::SqrtX);
    auto sy = gate_unitary(GateKind::SqrtY);
    auto sw = gate_unitary(GateKind::SqrtW);
    CHECK(max_abs_diff(matmul(sx, sx, 2), X) < 1e-12);
    CHECK(max_abs_diff(matmul(sy, sy, 2), Y) < 1e-12);
    CHECK(max_abs_diff(matmul(sw, sw, 2), W) < 1e-12);
}

TEST_CASE("every gate kind is unitary to 1e-12") {
    for (GateKind kind :
         {GateKind::SqrtX, GateKind::SqrtY, GateKind::SqrtW, GateKind::TwoQubit}) {
        auto u = gate_unitary(kind);
        const int d = kind == GateKind::TwoQubit ? 4 : 2;
        CHECK(max_abs_diff(matmul(dagger(u, d), u, d), identity(d)) < 1e-12);
    }
}

TEST_CASE("generation is deterministic under a fixed seed") {
    Circuit a = gen_random_circuit(4, 2, "line", 7);
    Circuit b = gen_random_circuit(4, 2, "line", 7);
    CHECK(circuit_to_json(a) == circuit_to_json(b));
    Circuit c = gen_random_circuit(4, 2, "line", 8);
    CHECK(circuit_to_json(a) != circuit_to_json(c));
}

TEST_CASE("structural scan: n=6, 3 cycles, seed=1") {
    Circuit c = gen_random_circuit(6, 3, "line", 1);
    REQUIRE(c.n_cycles() == 3);
    std::vector<int> count(6, 0);
    std::vector<std::vector<GateKind>> history(6);
    for (const Layer& layer : c.layers) {
        for (const Gate& g : layer.gates) {
            if (g.kind == GateKind::TwoQubit) continue;
            count[g.targets[0]] += 1;
            history[g.targets[0]].push_back(g.kind);
        }
    }
    for (int q = 0; q < 6; ++q) {
        CHECK(count[q] == 3);
        for (std::size_t t = 1; t < history[q].size(); ++t)
            CHECK(history[q][t] != history[q][t - 1]);
    }
}

TEST_CASE("per-layer qubit-disjointness over seeds and topologies") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        for (const char* topo : {"line", "ring", "grid(3,4)"}) {
            Circuit c = gen_random_circuit(12, 6, topo, seed);
            for (const Layer& layer : c.layers) {
                std::set<int> used;
                for (const Gate& g : layer.gates)
                    for (int q : g.targets) CHECK(used.insert(q).second);
            }
        }
    }
}

TEST_CASE("cycle structure alternates single- and two-qubit layers") {
    Circuit c = gen_random_circuit(8, 4, "ring", 5);
    REQUIRE(c.layers.size() == 8);
    for (std::size_t t = 0; t < c.layers.size(); ++t) {
        for (const Gate& g : c.layers[t].gates) {
            if (t % 2 == 0) CHECK(g.targets.size() == 1);
            else CHECK(g.targets.size() == 2);
        }
    }
}

TEST_CASE("target-scale shapes: 53 qubits, 20 cycles") {
    Circuit line53 = gen_random_circuit(53, 20, "line", 3);
    CHECK(line53.n_qubits == 53);
    CHECK(line53.n_cycles() == 20);
    CHECK(line53.exceeds_exact_cap);

    Circuit grid54 = gen_random_circuit(54, 20, "grid(6,9)", 3);
    CHECK(grid54.n_cycles() == 20);
    CHECK(grid54.exceeds_exact_cap);
    // grid cycles through four coupler patterns; each must show up
    std::set<std::pair<int, int>> seen_pairs;
    for (const Layer& layer : grid54.layers)
        for (const Gate& g : layer.gates)
            if (g.kind == GateKind::TwoQubit)
                seen_pairs.insert({g.targets[0], g.targets[1]});
    CHECK(seen_pairs.size() == 6 * 8 + 5 * 9);  // every grid edge used at least once

    Circuit small = gen_random_circuit(12, 2, "line", 9);
    CHECK_FALSE(small.exceeds_exact_cap);
}

TEST_CASE("JSON serialization round trip is the identity") {
    for (const char* topo : {"line", "grid(2,5)"}) {
        Circuit a = gen_random_circuit(10, 5, topo, 11);
        Circuit b = circuit_from_json(circuit_to_json(a));
        CHECK(a.n_qubits == b.n_qubits);
        CHECK(a.seed == b.seed);
        CHECK(a.topology == b.topology);
        REQUIRE(a.layers.size() == b.layers.size());
        for (std::size_t t = 0; t < a.layers.size(); ++t) {
            REQUIRE(a.layers[t].gates.size() == b.layers[t].gates.size());
            for (std::size_t g = 0; g < a.layers[t].gates.size(); ++g) {
                const Gate& x = a.layers[t].gates[g];
                const Gate& y = b.layers[t].gates[g];
                CHECK(x.kind == y.kind);
                CHECK(x.targets == y.targets);
                CHECK(max_abs_diff(x.unitary, y.unitary) == 0.0);
            }
        }
        CHECK(circuit_to_json(a) == circuit_to_json(b));
    }
}

TEST_CASE("configuration errors") {
    CHECK_THROWS_AS(gen_random_circuit(1, 2, "line", 0), ConfigError);
    CHECK_THROWS_AS(gen_random_circuit(4, 0, "line", 0), ConfigError);
    CHECK_THROWS_AS(gen_random_circuit(4, 2, "hexagon", 0), ConfigError);
    CHECK_THROWS_AS(gen_random_circuit(5, 2, "grid(2,3)", 0), ConfigError);
    CHECK_THROWS_AS(make_topology("grid(0,4)", 0), ConfigError);
    CHECK_THROWS_AS(gate_kind_from_name("hadamard"), ConfigError);
}
