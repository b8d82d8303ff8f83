#include "rcs/circuit.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "rcs/errors.hpp"
#include "rcs/rng.hpp"

namespace rcs {

using json = nlohmann::json;

const char* gate_kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::SqrtX: return "sqrt_x";
        case GateKind::SqrtY: return "sqrt_y";
        case GateKind::SqrtW: return "sqrt_w";
        case GateKind::TwoQubit: return "fsim";
    }
    return "?";
}

GateKind gate_kind_from_name(const std::string& name) {
    if (name == "sqrt_x") return GateKind::SqrtX;
    if (name == "sqrt_y") return GateKind::SqrtY;
    if (name == "sqrt_w") return GateKind::SqrtW;
    if (name == "fsim") return GateKind::TwoQubit;
    throw ConfigError("unknown gate kind: " + name);
}

std::vector<cplx> gate_unitary(GateKind kind) {
    const cplx i(0.0, 1.0);
    const double s2 = std::sqrt(2.0);
    switch (kind) {
        case GateKind::SqrtX:
            return {0.5 * (1.0 + i), 0.5 * (1.0 - i),
                    0.5 * (1.0 - i), 0.5 * (1.0 + i)};
        case GateKind::SqrtY:
            return {0.5 * (1.0 + i), 0.5 * (-1.0 - i),
                    0.5 * (1.0 + i), 0.5 * (1.0 + i)};
        case GateKind::SqrtW:
            // W = (X + Y)/sqrt(2); sqrt via (1+i)/2 I + (1-i)/2 W
            return {0.5 * (1.0 + i), -i / s2,
                    1.0 / s2, 0.5 * (1.0 + i)};
        case GateKind::TwoQubit: {
            // fSim(theta = pi/2, phi = pi/6)
            const double theta = M_PI / 2.0;
            const double phi = M_PI / 6.0;
            const cplx c = std::cos(theta);
            const cplx ms = -i * std::sin(theta);
            const cplx ph = std::exp(-i * phi);
            return {1, 0, 0, 0,
                    0, c, ms, 0,
                    0, ms, c, 0,
                    0, 0, 0, ph};
        }
    }
    throw ConfigError("unsupported gate kind");
}

namespace {

std::vector<std::pair<int, int>> line_pattern(int n, int offset) {
    std::vector<std::pair<int, int>> pairs;
    for (int q = offset; q + 1 < n; q += 2) pairs.emplace_back(q, q + 1);
    return pairs;
}

}  // namespace

Topology make_topology(const std::string& name, int n_qubits) {
    Topology topo;
    topo.name = name;
    topo.n_qubits = n_qubits;
    if (name == "line") {
        topo.patterns = {line_pattern(n_qubits, 0), line_pattern(n_qubits, 1)};
        topo.sequence = {0, 1};
    } else if (name == "ring") {
        auto a = line_pattern(n_qubits, 0);
        auto b = line_pattern(n_qubits, 1);
        if (n_qubits >= 3 && n_qubits % 2 == 0) b.emplace_back(n_qubits - 1, 0);
        topo.patterns = {std::move(a), std::move(b)};
        topo.sequence = {0, 1};
    } else if (name.rfind("grid(", 0) == 0) {
        int rows = 0, cols = 0;
        if (std::sscanf(name.c_str(), "grid(%d,%d)", &rows, &cols) != 2 || rows < 1 || cols < 1)
            throw ConfigError("bad grid topology spec: " + name);
        if (rows * cols != n_qubits)
            throw ConfigError("grid dimensions do not match qubit count");
        auto idx = [cols](int r, int c) { return r * cols + c; };
        std::vector<std::vector<std::pair<int, int>>> p(4);
        for (int r = 0; r + 1 < rows; ++r)
            for (int c = 0; c < cols; ++c)
                p[r % 2].emplace_back(idx(r, c), idx(r + 1, c));   // vertical A/B
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c + 1 < cols; ++c)
                p[2 + c % 2].emplace_back(idx(r, c), idx(r, c + 1));  // horizontal C/D
        topo.patterns = std::move(p);
        topo.sequence = {0, 1, 2, 3, 2, 3, 0, 1};  // ABCDCDAB
    } else {
        throw ConfigError("unknown topology: " + name);
    }
    bool any_edge = false;
    for (const auto& p : topo.patterns) any_edge = any_edge || !p.empty();
    if (!any_edge) throw ConfigError("topology has no couplers for n_qubits=" +
                                     std::to_string(n_qubits));
    return topo;
}

Circuit gen_random_circuit(int n_qubits, int n_cycles, const std::string& topology,
                           std::uint64_t seed) {
    if (n_qubits < 2) throw ConfigError("n_qubits must be >= 2");
    if (n_cycles < 1) throw ConfigError("n_cycles must be >= 1");
    Topology topo = make_topology(topology, n_qubits);

    Circuit circuit;
    circuit.n_qubits = n_qubits;
    circuit.seed = seed;
    circuit.topology = topology;
    circuit.exceeds_exact_cap = n_qubits > 24;

    Rng rng(seed);
    const GateKind singles[3] = {GateKind::SqrtX, GateKind::SqrtY, GateKind::SqrtW};
    std::vector<int> prev(n_qubits, -1);  // previous single-qubit kind per qubit

    for (int cycle = 0; cycle < n_cycles; ++cycle) {
        Layer single;
        for (int q = 0; q < n_qubits; ++q) {
            // one draw per slot; exclude the immediately preceding kind
            int n_choices = prev[q] < 0 ? 3 : 2;
            int pick = static_cast<int>(rng.next_below(n_choices));
            int kind_idx = 0, seen = 0;
            for (int c = 0; c < 3; ++c) {
                if (c == prev[q]) continue;
                if (seen++ == pick) { kind_idx = c; break; }
            }
            prev[q] = kind_idx;
            Gate g;
            g.kind = singles[kind_idx];
            g.targets = {q};
            g.unitary = gate_unitary(g.kind);
            single.gates.push_back(std::move(g));
        }
        circuit.layers.push_back(std::move(single));

        Layer two;
        const auto& pattern =
            topo.patterns[topo.sequence[cycle % topo.sequence.size()]];
        for (auto [a, b] : pattern) {
            Gate g;
            g.kind = GateKind::TwoQubit;
            g.targets = {a, b};
            g.unitary = gate_unitary(g.kind);
            two.gates.push_back(std::move(g));
        }
        circuit.layers.push_back(std::move(two));
    }
    return circuit;
}

std::string circuit_to_json(const Circuit& circuit) {
    json j;
    j["n_qubits"] = circuit.n_qubits;
    j["seed"] = circuit.seed;
    j["topology"] = circuit.topology;
    j["layers"] = json::array();
    for (const auto& layer : circuit.layers) {
        json jl;
        jl["gates"] = json::array();
        for (const auto& g : layer.gates) {
            json jg;
            jg["kind"] = gate_kind_name(g.kind);
            jg["targets"] = g.targets;
            json m = json::array();
            for (const cplx& v : g.unitary) m.push_back({v.real(), v.imag()});
            jg["matrix"] = std::move(m);
            jl["gates"].push_back(std::move(jg));
        }
        j["layers"].push_back(std::move(jl));
    }
    return j.dump(2);
}

Circuit circuit_from_json(const std::string& text) {
    json j = json::parse(text);
    Circuit circuit;
    circuit.n_qubits = j.at("n_qubits").get<int>();
    circuit.seed = j.at("seed").get<std::uint64_t>();
    circuit.topology = j.at("topology").get<std::string>();
    circuit.exceeds_exact_cap = circuit.n_qubits > 24;
    for (const auto& jl : j.at("layers")) {
        Layer layer;
        for (const auto& jg : jl.at("gates")) {
            Gate g;
            g.kind = gate_kind_from_name(jg.at("kind").get<std::string>());
            g.targets = jg.at("targets").get<std::vector<int>>();
            for (const auto& pair : jg.at("matrix"))
                g.unitary.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
            std::size_t want = g.targets.size() == 1 ? 4 : 16;
            if (g.unitary.size() != want)
                throw ConfigError("gate matrix size does not match target count");
            layer.gates.push_back(std::move(g));
        }
        circuit.layers.push_back(std::move(layer));
    }
    return circuit;
}

}  // namespace rcs
