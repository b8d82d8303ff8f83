#include "rcs/contraction_engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "rcs/errors.hpp"
#include "rcs/rng.hpp"

namespace rcs {

namespace {

constexpr std::uint64_t kBytesPerAmp = sizeof(cplx);

struct Buffer {
    std::vector<Label> labels;
    std::vector<cplx> data;
    std::uint64_t bytes() const { return data.size() * kBytesPerAmp; }
};

// Gather `tensor` into a buffer with assigned labels pinned and dropped.
Buffer project_leaf(const Tensor& tensor, const std::map<Label, int>& assignment) {
    Buffer out;
    std::vector<int> kept_pos;
    std::uint64_t fixed_index = 0;
    const int rank = tensor.rank();
    for (int p = 0; p < rank; ++p) {
        const Label l = tensor.labels[p];
        auto it = assignment.find(l);
        if (it == assignment.end()) {
            out.labels.push_back(l);
            kept_pos.push_back(p);
        } else if (it->second) {
            fixed_index |= std::uint64_t{1} << (rank - 1 - p);
        }
    }
    const int out_rank = static_cast<int>(kept_pos.size());
    out.data.resize(std::uint64_t{1} << out_rank);
    for (std::uint64_t i = 0; i < out.data.size(); ++i) {
        std::uint64_t src = fixed_index;
        for (int p = 0; p < out_rank; ++p)
            if (i & (std::uint64_t{1} << (out_rank - 1 - p)))
                src |= std::uint64_t{1} << (rank - 1 - kept_pos[p]);
        out.data[i] = tensor.data[src];
    }
    return out;
}

// Reorder data into `target` label order (a permutation of buf.labels).
Buffer permute(const Buffer& buf, const std::vector<Label>& target) {
    Buffer out;
    out.labels = target;
    out.data.resize(buf.data.size());
    const int rank = static_cast<int>(target.size());
    std::vector<int> src_pos(rank);
    for (int p = 0; p < rank; ++p) {
        auto it = std::find(buf.labels.begin(), buf.labels.end(), target[p]);
        src_pos[p] = static_cast<int>(it - buf.labels.begin());
    }
    for (std::uint64_t i = 0; i < out.data.size(); ++i) {
        std::uint64_t src = 0;
        for (int p = 0; p < rank; ++p)
            if (i & (std::uint64_t{1} << (rank - 1 - p)))
                src |= std::uint64_t{1} << (rank - 1 - src_pos[p]);
        out.data[i] = buf.data[src];
    }
    return out;
}

struct AliveTracker {
    std::uint64_t alive = 0;
    std::uint64_t peak = 0;
    void add(std::uint64_t b) {
        alive += b;
        peak = std::max(peak, alive);
    }
    void remove(std::uint64_t b) { alive -= b; }
};

// TTGT pairwise contraction; the multiply-add count feeds the instrumented
// FLOP counter checked against the plan estimate.
Buffer contract_pair(const Buffer& a, const Buffer& b, ExecutionStats* stats,
                     AliveTracker& tracker) {
    std::vector<Label> shared, keep_a, keep_b;
    for (Label l : a.labels)
        (std::find(b.labels.begin(), b.labels.end(), l) != b.labels.end() ? shared : keep_a)
            .push_back(l);
    for (Label l : b.labels)
        if (std::find(shared.begin(), shared.end(), l) == shared.end()) keep_b.push_back(l);

    std::vector<Label> order_a = keep_a, order_b = shared;
    order_a.insert(order_a.end(), shared.begin(), shared.end());
    order_b.insert(order_b.end(), keep_b.begin(), keep_b.end());

    Buffer pa = permute(a, order_a);
    tracker.add(pa.bytes());
    Buffer pb = permute(b, order_b);
    tracker.add(pb.bytes());

    const std::uint64_t rows = std::uint64_t{1} << keep_a.size();
    const std::uint64_t inner = std::uint64_t{1} << shared.size();
    const std::uint64_t cols = std::uint64_t{1} << keep_b.size();

    Buffer out;
    out.labels = keep_a;
    out.labels.insert(out.labels.end(), keep_b.begin(), keep_b.end());
    out.data.assign(rows * cols, cplx(0.0, 0.0));
    tracker.add(out.bytes());

    for (std::uint64_t i = 0; i < rows; ++i) {
        cplx* out_row = out.data.data() + i * cols;
        const cplx* a_row = pa.data.data() + i * inner;
        for (std::uint64_t k = 0; k < inner; ++k) {
            const cplx av = a_row[k];
            const cplx* b_row = pb.data.data() + k * cols;
            for (std::uint64_t j = 0; j < cols; ++j) out_row[j] += av * b_row[j];
        }
    }
    if (stats) stats->flops += 8 * rows * inner * cols;
    tracker.remove(pa.bytes());
    tracker.remove(pb.bytes());
    return out;
}

}  // namespace

double BrokenEdgeConfig::predicted_fidelity() const {
    return static_cast<double>(m()) * std::pow(2.0, -k());
}

BrokenEdgeConfig make_broken_config(std::vector<Label> broken_labels, std::uint64_t m,
                                    std::uint64_t seed) {
    const int k = static_cast<int>(broken_labels.size());
    if (k > 62) throw ConfigError("too many broken edges");
    const std::uint64_t full = std::uint64_t{1} << k;
    if (m < 1 || m > full)
        throw ConfigError("configuration count m=" + std::to_string(m) +
                          " outside [1, 2^" + std::to_string(k) + "]");
    BrokenEdgeConfig config;
    config.broken_labels = std::move(broken_labels);
    const std::uint64_t start = Rng(seed ^ 0xb20ced6eULL).next_below(full);
    config.configurations.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i)
        config.configurations.push_back(start ^ (i ^ (i >> 1)));
    return config;
}

std::vector<cplx> execute_assignment(const TensorNetwork& network,
                                     const ContractionPlan& plan,
                                     const std::map<Label, int>& assignment,
                                     ExecutionStats* stats) {
    const int n_labels = static_cast<int>(network.label_names.size());
    for (const auto& [label, value] : assignment) {
        if (label < 0 || label >= n_labels)
            throw ConfigError("assignment label " + std::to_string(label) +
                              " not in network");
        if (value != 0 && value != 1) throw ConfigError("assignment values must be 0/1");
    }

    const std::size_t n_leaves = network.tensors.size();
    std::vector<Buffer> buffers(n_leaves + plan.steps.size());
    AliveTracker tracker;
    for (std::size_t i = 0; i < n_leaves; ++i) {
        buffers[i] = project_leaf(network.tensors[i], assignment);
        tracker.add(buffers[i].bytes());
    }

    int root = n_leaves == 1 ? 0 : -1;
    for (std::size_t s = 0; s < plan.steps.size(); ++s) {
        const PlanStep& step = plan.steps[s];
        Buffer& lhs = buffers[step.lhs];
        Buffer& rhs = buffers[step.rhs];
        buffers[step.result] = contract_pair(lhs, rhs, stats, tracker);
        tracker.remove(lhs.bytes());
        tracker.remove(rhs.bytes());
        lhs = Buffer{};
        rhs = Buffer{};
        for (const cplx& v : buffers[step.result].data) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NumericFault("non-finite intermediate at contraction step " +
                                       std::to_string(s),
                                   static_cast<int>(s));
        }
        root = step.result;
    }
    if (stats) stats->peak_bytes = std::max(stats->peak_bytes, tracker.peak);

    // canonical order: bit j of the result index = j-th smallest free qubit
    Buffer& result = buffers[root];
    std::vector<std::pair<int, Label>> free_qubits;
    for (Label l : result.labels) {
        auto it = std::find(network.open_labels.begin(), network.open_labels.end(), l);
        if (it == network.open_labels.end())
            throw ConfigError("free label " + network.label_name(l) +
                              " is not an open output; assignment incomplete");
        free_qubits.emplace_back(network.open_qubits[it - network.open_labels.begin()], l);
    }
    std::sort(free_qubits.begin(), free_qubits.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });
    std::vector<Label> target;
    for (const auto& [q, l] : free_qubits) target.push_back(l);
    return permute(result, target).data;
}

ContractResult contract(const TensorNetwork& network, const ContractionPlan& plan,
                        const BrokenEdgeConfig* config,
                        const std::map<Label, int>& fixed_outputs, int workers) {
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (config) {
        if (config->broken_labels != plan.broken)
            throw ConfigError("broken-edge labels do not match the plan");
        if (config->configurations.empty())
            throw ConfigError("broken-edge configuration list is empty");
    } else if (!plan.broken.empty()) {
        throw ConfigError("plan has broken edges; exact contraction needs a plan without them");
    }

    const std::vector<std::uint64_t> no_broken{0};
    const std::vector<std::uint64_t>& configs =
        config ? config->configurations : no_broken;
    const std::uint64_t n_slices = plan.n_slices();
    const std::size_t n_subtasks = configs.size();

    std::vector<std::vector<cplx>> partials(n_subtasks);
    std::vector<SubtaskTiming> timings(n_subtasks);
    std::vector<std::uint64_t> subtask_peaks(n_subtasks, 0);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto run_subtask = [&](std::size_t t) {
        auto start = std::chrono::steady_clock::now();
        ExecutionStats stats;
        std::vector<cplx> acc;
        for (std::uint64_t s = 0; s < n_slices; ++s) {
            std::map<Label, int> assignment = fixed_outputs;
            if (config)
                for (int b = 0; b < config->k(); ++b)
                    assignment[config->broken_labels[b]] =
                        static_cast<int>((configs[t] >> b) & 1);
            for (std::size_t b = 0; b < plan.sliced.size(); ++b)
                assignment[plan.sliced[b]] = static_cast<int>((s >> b) & 1);
            std::vector<cplx> part = execute_assignment(network, plan, assignment, &stats);
            if (acc.empty()) {
                acc = std::move(part);
            } else {
                for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += part[i];
            }
        }
        partials[t] = std::move(acc);
        subtask_peaks[t] = stats.peak_bytes;
        auto end = std::chrono::steady_clock::now();
        timings[t] = {t, configs[t],
                      std::chrono::duration<double, std::milli>(end - start).count(),
                      stats.flops};
    };

    auto worker_loop = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= n_subtasks || failed.load()) break;
            try {
                run_subtask(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        }
    };

    const int n_threads = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(workers), n_subtasks));
    if (n_threads <= 1) {
        worker_loop();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker_loop);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    // compensated reduction in ascending configuration order
    ContractResult result;
    result.amplitudes.assign(partials[0].size(), cplx(0.0, 0.0));
    std::vector<cplx> comp(partials[0].size(), cplx(0.0, 0.0));
    for (std::size_t t = 0; t < n_subtasks; ++t) {
        for (std::size_t i = 0; i < result.amplitudes.size(); ++i) {
            const cplx y = partials[t][i] - comp[i];
            const cplx s = result.amplitudes[i] + y;
            comp[i] = (s - result.amplitudes[i]) - y;
            result.amplitudes[i] = s;
        }
        result.stats.flops += timings[t].flops;
        result.stats.peak_bytes = std::max(result.stats.peak_bytes, subtask_peaks[t]);
    }
    result.timings = std::move(timings);
    return result;
}

AmplitudeBatch contract_group(const TensorNetwork& network, const ContractionPlan& plan,
                              const BrokenEdgeConfig* config, std::uint64_t group_id,
                              std::uint64_t fixed_bits) {
    std::map<Label, int> fixed;
    int bit = 0;
    for (int q = 0; q < network.n_qubits; ++q) {
        if (std::find(network.open_qubits.begin(), network.open_qubits.end(), q) !=
            network.open_qubits.end())
            continue;
        fixed[network.output_labels[q]] = static_cast<int>((fixed_bits >> bit) & 1);
        ++bit;
    }
    AmplitudeBatch batch;
    batch.group_id = group_id;
    batch.n_open = static_cast<int>(network.open_qubits.size());
    batch.fixed_bits = fixed_bits;
    batch.amplitudes = contract(network, plan, config, fixed, 1).amplitudes;
    return batch;
}

FidelityResult state_fidelity(std::span<const cplx> approx, std::span<const cplx> exact) {
    if (approx.size() != exact.size())
        throw ConfigError("fidelity requires identical index sets");
    cplx overlap(0.0, 0.0);
    double na = 0.0, ne = 0.0;
    for (std::size_t i = 0; i < approx.size(); ++i) {
        overlap += std::conj(exact[i]) * approx[i];
        na += std::norm(approx[i]);
        ne += std::norm(exact[i]);
    }
    if (ne == 0.0) throw ConfigError("exact collection has zero norm");
    FidelityResult r;
    if (na == 0.0) {
        r.zero_norm_warning = true;
        return r;
    }
    r.value = std::norm(overlap) / (na * ne);
    return r;
}

std::string timings_to_csv(const std::vector<SubtaskTiming>& timings) {
    std::ostringstream out;
    out << "subtask_id,config_bits,wall_ms,flops\n";
    for (const SubtaskTiming& t : timings)
        out << t.subtask_id << ',' << t.config_bits << ',' << t.wall_ms << ',' << t.flops
            << '\n';
    return out.str();
}

}  // namespace rcs
