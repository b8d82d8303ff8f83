#include "rcs/contraction_plan.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <tuple>

#include <nlohmann/json.hpp>

#include "rcs/errors.hpp"
#include "rcs/rng.hpp"

namespace rcs {

namespace {

constexpr std::uint64_t kBytesPerAmp = sizeof(cplx);

// Small dynamic bitset over label ids.
class LabelSet {
  public:
    LabelSet() = default;
    explicit LabelSet(int n_labels) : words_((n_labels + 63) / 64, 0) {}

    void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(int i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    int count() const {
        int c = 0;
        for (std::uint64_t w : words_) c += std::popcount(w);
        return c;
    }
    bool intersects(const LabelSet& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }
    int shared_count(const LabelSet& o) const {
        int c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            c += std::popcount(words_[i] & o.words_[i]);
        return c;
    }
    LabelSet sym_diff(const LabelSet& o) const {
        LabelSet r = *this;
        for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] ^= o.words_[i];
        return r;
    }
    LabelSet minus(const LabelSet& o) const {
        LabelSet r = *this;
        for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= ~o.words_[i];
        return r;
    }
    template <typename F>
    void for_each(F f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                int b = std::countr_zero(bits);
                f(static_cast<int>(w * 64 + b));
                bits &= bits - 1;
            }
        }
    }

  private:
    std::vector<std::uint64_t> words_;
};

struct TreeNode {
    int left = -1, right = -1;  // -1 for leaves
    bool is_leaf() const { return left < 0; }
};

struct TreeEval {
    std::uint64_t flops = 0;
    std::uint64_t traffic = 0;
    std::uint64_t peak = 0;
    std::uint64_t max_leaf_bytes = 0;
    std::vector<PlanStep> steps;  // post-order
};

std::uint64_t bytes_of(int rank) { return kBytesPerAmp << rank; }

// Replays the tree in post-order with the executor's allocation pattern:
// all projected leaves live up front, per-step transposition copies of both
// operands plus the result, operands freed after the step.
TreeEval evaluate_tree(const std::vector<TreeNode>& nodes, int root,
                       const std::vector<LabelSet>& leaf_sets, int n_labels,
                       bool want_steps) {
    const int n_leaves = static_cast<int>(leaf_sets.size());
    TreeEval ev;
    std::vector<LabelSet> sets(nodes.size());
    std::vector<std::uint64_t> node_bytes(nodes.size(), 0);

    std::uint64_t alive = 0;
    for (int i = 0; i < n_leaves; ++i) {
        sets[i] = leaf_sets[i];
        node_bytes[i] = bytes_of(sets[i].count());
        alive += node_bytes[i];
        ev.max_leaf_bytes = std::max(ev.max_leaf_bytes, node_bytes[i]);
    }
    ev.peak = alive;

    // iterative post-order
    std::vector<std::pair<int, int>> stack{{root, 0}};
    std::vector<int> order;
    while (!stack.empty()) {
        auto& [node, phase] = stack.back();
        if (nodes[node].is_leaf()) {
            stack.pop_back();
            continue;
        }
        if (phase == 0) {
            phase = 1;
            stack.push_back({nodes[node].left, 0});
        } else if (phase == 1) {
            phase = 2;
            stack.push_back({nodes[node].right, 0});
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    for (int node : order) {
        const int a = nodes[node].left, b = nodes[node].right;
        const int shared = sets[a].shared_count(sets[b]);
        sets[node] = sets[a].sym_diff(sets[b]);
        const int result_rank = sets[node].count();
        node_bytes[node] = bytes_of(result_rank);
        const std::uint64_t step_flops = std::uint64_t{8} << (result_rank + shared);
        const std::uint64_t step_peak =
            alive + node_bytes[a] + node_bytes[b] + node_bytes[node];
        ev.peak = std::max(ev.peak, step_peak);
        ev.flops += step_flops;
        ev.traffic += node_bytes[a] + node_bytes[b] + node_bytes[node];
        alive += node_bytes[node];
        alive -= node_bytes[a] + node_bytes[b];
        if (want_steps) {
            PlanStep step;
            step.lhs = a;
            step.rhs = b;
            step.result = node;
            step.summed = shared;
            step.flops = step_flops;
            step.result_bytes = node_bytes[node];
            sets[node].for_each([&step](int l) { step.result_labels.push_back(l); });
            ev.steps.push_back(std::move(step));
        }
    }
    (void)n_labels;
    return ev;
}

std::vector<LabelSet> make_leaf_sets(const TensorNetwork& net, const LabelSet& removed,
                                     int n_labels) {
    std::vector<LabelSet> sets;
    sets.reserve(net.tensors.size());
    for (const Tensor& t : net.tensors) {
        LabelSet s(n_labels);
        for (Label l : t.labels)
            if (!removed.test(l)) s.set(l);
        sets.push_back(std::move(s));
    }
    return sets;
}

// Greedy pairing: repeatedly merge the adjacent pair with the smallest
// (result bytes, flops); disconnected remainders merged by ascending id.
std::vector<TreeNode> greedy_tree(const std::vector<LabelSet>& leaf_sets, int n_labels) {
    const int n_leaves = static_cast<int>(leaf_sets.size());
    std::vector<TreeNode> nodes(n_leaves);
    std::vector<LabelSet> sets = leaf_sets;
    std::vector<bool> alive(n_leaves, true);
    std::vector<std::vector<int>> owners(n_labels);
    for (int i = 0; i < n_leaves; ++i)
        sets[i].for_each([&](int l) { owners[l].push_back(i); });

    using Entry = std::tuple<std::uint64_t, std::uint64_t, int, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;

    auto push_pair = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        const int shared = sets[a].shared_count(sets[b]);
        const int result_rank = sets[a].count() + sets[b].count() - 2 * shared;
        heap.push({bytes_of(result_rank), std::uint64_t{8} << (result_rank + shared), a, b});
    };

    for (int l = 0; l < n_labels; ++l)
        if (owners[l].size() == 2 && owners[l][0] != owners[l][1])
            push_pair(owners[l][0], owners[l][1]);

    int alive_count = n_leaves;
    while (alive_count > 1) {
        int a = -1, b = -1;
        while (!heap.empty()) {
            auto [bytes, flops, i, j] = heap.top();
            heap.pop();
            if (alive[i] && alive[j]) {
                a = i;
                b = j;
                break;
            }
        }
        if (a < 0) {
            // disconnected components: outer-product lowest alive ids
            for (int i = 0; i < static_cast<int>(nodes.size()) && b < 0; ++i) {
                if (!alive[i]) continue;
                if (a < 0) a = i;
                else b = i;
            }
        }
        const int r = static_cast<int>(nodes.size());
        nodes.push_back({a, b});
        sets.push_back(sets[a].sym_diff(sets[b]));
        alive[a] = alive[b] = false;
        alive.push_back(true);
        --alive_count;

        std::vector<int> neighbors;
        sets[r].for_each([&](int l) {
            for (int& owner : owners[l]) {
                if (owner == a || owner == b) owner = r;
                else if (alive[owner]) neighbors.push_back(owner);
            }
        });
        std::sort(neighbors.begin(), neighbors.end());
        neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());
        for (int nb : neighbors) push_pair(nb, r);
    }
    return nodes;
}

double tree_cost(const TreeEval& ev) {
    return std::log2(static_cast<double>(ev.flops) + 1.0) +
           0.25 * std::log2(static_cast<double>(ev.peak) + 1.0);
}

int sa_steps(SearchEffort effort) {
    switch (effort) {
        case SearchEffort::Low: return 300;
        case SearchEffort::Medium: return 3000;
        case SearchEffort::High: return 30000;
    }
    return 3000;
}

// Subtree rotations under Metropolis acceptance with a geometric cooldown.
void anneal_tree(std::vector<TreeNode>& nodes, int root,
                 const std::vector<LabelSet>& leaf_sets, int n_labels,
                 SearchEffort effort, std::uint64_t seed) {
    Rng rng(seed ^ 0x5eedc0dedULL);
    TreeEval current = evaluate_tree(nodes, root, leaf_sets, n_labels, false);
    double cost = tree_cost(current);
    const int steps = sa_steps(effort);
    double temp = 2.0;
    const double cool = std::pow(0.01 / temp, 1.0 / std::max(steps, 1));

    std::vector<int> internals;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
        if (!nodes[i].is_leaf()) internals.push_back(i);
    if (internals.empty()) return;

    for (int it = 0; it < steps; ++it, temp *= cool) {
        const int v = internals[rng.next_below(internals.size())];
        TreeNode& nv = nodes[v];
        int* child = nullptr;
        int other = -1;
        const bool left_internal = !nodes[nv.left].is_leaf();
        const bool right_internal = !nodes[nv.right].is_leaf();
        if (!left_internal && !right_internal) continue;
        if (left_internal && (!right_internal || rng.next_bool())) {
            child = &nv.left;
            other = nv.right;
        } else {
            child = &nv.right;
            other = nv.left;
        }
        // (A op B) op C  ->  (A op C) op B   or   (B op C) op A
        TreeNode& nc = nodes[*child];
        const bool rotate_left = rng.next_bool();
        int& moved = rotate_left ? nc.left : nc.right;
        const int saved_moved = moved, saved_other = other;
        int save_left = nv.left, save_right = nv.right;
        // swap `moved` with `other`
        if (child == &nv.left) nv.right = saved_moved;
        else nv.left = saved_moved;
        moved = saved_other;

        TreeEval cand = evaluate_tree(nodes, root, leaf_sets, n_labels, false);
        const double cand_cost = tree_cost(cand);
        const double delta = cand_cost - cost;
        if (delta <= 0 || rng.next_double() < std::exp(-delta / temp)) {
            cost = cand_cost;
        } else {
            nv.left = save_left;
            nv.right = save_right;
            moved = saved_moved;
        }
    }
}

}  // namespace

ContractionPlan find_contraction_path(const TensorNetwork& network,
                                      std::uint64_t memory_budget_bytes,
                                      SearchEffort effort, std::uint64_t seed,
                                      const std::vector<Label>& broken) {
    const int n_labels = static_cast<int>(network.label_names.size());

    LabelSet removed(n_labels);
    ContractionPlan plan;
    plan.broken = broken;
    plan.memory_budget_bytes = memory_budget_bytes;
    for (Label l : broken) removed.set(l);
    for (std::size_t q = 0; q < network.output_labels.size(); ++q) {
        Label l = network.output_labels[q];
        if (!network.is_open(l)) {
            removed.set(l);
            plan.fixed_outputs.push_back(l);
        }
    }

    auto leaf_sets = make_leaf_sets(network, removed, n_labels);
    std::uint64_t max_leaf = kBytesPerAmp;
    for (const auto& s : leaf_sets) max_leaf = std::max(max_leaf, kBytesPerAmp << s.count());
    if (memory_budget_bytes < max_leaf)
        throw ConfigError("memory budget " + std::to_string(memory_budget_bytes) +
                          " B is infeasible: smaller than a single tensor (" +
                          std::to_string(max_leaf) + " B)");

    std::vector<TreeNode> nodes = greedy_tree(leaf_sets, n_labels);
    const int root = static_cast<int>(nodes.size()) - 1;
    anneal_tree(nodes, root, leaf_sets, n_labels, effort, seed);

    // slice until the peak fits the budget
    LabelSet open(n_labels);
    for (Label l : network.open_labels) open.set(l);
    TreeEval ev = evaluate_tree(nodes, root, leaf_sets, n_labels, false);
    while (ev.peak > memory_budget_bytes) {
        LabelSet present(n_labels);
        for (const auto& s : leaf_sets)
            s.for_each([&present](int l) { present.set(l); });
        Label best = -1;
        std::uint64_t best_peak = ev.peak;
        present.minus(open).for_each([&](int l) {
            LabelSet trial = removed;
            trial.set(l);
            auto trial_sets = make_leaf_sets(network, trial, n_labels);
            TreeEval tev = evaluate_tree(nodes, root, trial_sets, n_labels, false);
            if (tev.peak < best_peak ||
                (tev.peak == best_peak && best >= 0 &&
                 network.label_name(l) < network.label_name(best))) {
                best_peak = tev.peak;
                best = l;
            }
        });
        if (best < 0)
            throw ConfigError("cannot slice below memory budget of " +
                              std::to_string(memory_budget_bytes) + " B (peak " +
                              std::to_string(ev.peak) + " B)");
        plan.sliced.push_back(best);
        removed.set(best);
        leaf_sets = make_leaf_sets(network, removed, n_labels);
        ev = evaluate_tree(nodes, root, leaf_sets, n_labels, false);
    }

    TreeEval final_ev = evaluate_tree(nodes, root, leaf_sets, n_labels, true);
    plan.steps = std::move(final_ev.steps);
    plan.flops_per_slice = final_ev.flops;
    plan.traffic_bytes_per_slice = final_ev.traffic;
    plan.peak_bytes = final_ev.peak;
    return plan;
}

std::vector<Label> select_broken_edges(const TensorNetwork& network, int k_edges,
                                       std::uint64_t seed) {
    if (k_edges <= 0) return {};
    const int n_labels = static_cast<int>(network.label_names.size());

    std::vector<WireEdge> candidates;
    const int lo = network.n_layers / 3, hi = 2 * network.n_layers / 3;
    for (const WireEdge& e : network.wire_edges)
        if (e.layer >= lo && e.layer < hi) candidates.push_back(e);
    if (candidates.empty()) candidates = network.wire_edges;
    if (static_cast<int>(candidates.size()) < k_edges)
        throw ConfigError("network has too few bulk edges to break " +
                          std::to_string(k_edges));

    LabelSet removed(n_labels);
    for (std::size_t q = 0; q < network.output_labels.size(); ++q)
        if (!network.is_open(network.output_labels[q])) removed.set(network.output_labels[q]);

    auto greedy_cost = [&](const LabelSet& rm) {
        auto sets = make_leaf_sets(network, rm, n_labels);
        auto nodes = greedy_tree(sets, n_labels);
        TreeEval ev =
            evaluate_tree(nodes, static_cast<int>(nodes.size()) - 1, sets, n_labels, false);
        return ev.flops;
    };

    std::vector<Label> chosen;
    (void)seed;
    for (int pick = 0; pick < k_edges; ++pick) {
        Label best = -1;
        std::uint64_t best_cost = 0;
        for (const WireEdge& e : candidates) {
            if (removed.test(e.label)) continue;
            LabelSet trial = removed;
            trial.set(e.label);
            const std::uint64_t cost = greedy_cost(trial);
            if (best < 0 || cost < best_cost ||
                (cost == best_cost &&
                 network.label_name(e.label) < network.label_name(best))) {
                best = e.label;
                best_cost = cost;
            }
        }
        chosen.push_back(best);
        removed.set(best);
    }
    return chosen;
}

ComplexityReport estimate_complexity(const ContractionPlan& plan, std::uint64_t n_subtasks) {
    ComplexityReport report;
    report.n_subtasks = n_subtasks;
    report.per_subtask_flops = static_cast<double>(plan.subtask_flops());
    report.total_flops = report.per_subtask_flops * static_cast<double>(n_subtasks);
    report.peak_bytes = plan.peak_bytes;
    report.total_traffic_bytes =
        static_cast<double>(plan.subtask_traffic_bytes()) * static_cast<double>(n_subtasks);
    return report;
}

ComplexityReport published_scale_reference() {
    // 53-qubit target task: 1.0859e13 FLOPs per subtask over 344277
    // effective subtasks.
    ComplexityReport report;
    report.n_subtasks = 344277;
    report.per_subtask_flops = 1.0859e13;
    report.total_flops = report.per_subtask_flops * static_cast<double>(report.n_subtasks);
    report.peak_bytes = std::uint64_t{80} * 1000 * 1000 * 1000;
    report.total_traffic_bytes = 2.4361e11 * static_cast<double>(report.n_subtasks);
    return report;
}

std::string plan_to_json(const ContractionPlan& plan, const TensorNetwork& network) {
    using json = nlohmann::json;

    // nested-pair rendering of the contraction tree
    const int n_leaves = static_cast<int>(network.tensors.size());
    std::vector<json> rendered(n_leaves + plan.steps.size());
    for (int i = 0; i < n_leaves; ++i) rendered[i] = i;
    json order = json::array();
    for (const PlanStep& s : plan.steps) {
        rendered[s.result] = json::array({rendered[s.lhs], rendered[s.rhs]});
        order = rendered[s.result];
    }

    auto names = [&network](const std::vector<Label>& labels) {
        json arr = json::array();
        for (Label l : labels) arr.push_back(network.label_name(l));
        return arr;
    };

    json j;
    j["order"] = order;
    j["sliced"] = names(plan.sliced);
    j["broken"] = names(plan.broken);
    j["per_step"] = json::array();
    for (const PlanStep& s : plan.steps) {
        json step;
        step["operands"] = {s.lhs, s.rhs};
        step["result_labels"] = names(s.result_labels);
        step["summed_indices"] = s.summed;
        step["flops"] = s.flops;
        step["result_bytes"] = s.result_bytes;
        j["per_step"].push_back(std::move(step));
    }
    j["totals"] = {{"flops_per_slice", plan.flops_per_slice},
                   {"subtask_flops", plan.subtask_flops()},
                   {"peak_bytes", plan.peak_bytes},
                   {"traffic_bytes_per_slice", plan.traffic_bytes_per_slice},
                   {"n_slices", plan.n_slices()},
                   {"memory_budget_bytes", plan.memory_budget_bytes}};
    return j.dump(2);
}

}  // namespace rcs
