#include "rcs/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rcs/contraction_plan.hpp"
#include "rcs/errors.hpp"
#include "rcs/rng.hpp"
#include "rcs/stats.hpp"
#include "rcs/tensor_network.hpp"

namespace rcs {

using json = nlohmann::json;

std::vector<int> ExperimentConfig::resolved_open_qubits() const {
    if (!open_qubits.empty()) return open_qubits;
    std::vector<int> qs(l_open);
    std::iota(qs.begin(), qs.end(), 0);
    return qs;
}

void ExperimentConfig::validate() const {
    if (n_qubits < 2) throw ConfigError("n_qubits must be >= 2");
    if (n_cycles < 1) throw ConfigError("n_cycles must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (broken_edges < 0) throw ConfigError("broken_edges must be >= 0");
    if (broken_edges > 0 && m_configs > (std::uint64_t{1} << broken_edges))
        throw ConfigError("m_configs exceeds 2^K");
    if (m_configs < 1) throw ConfigError("m_configs must be >= 1");
    if (precision != "f64" && precision != "f32")
        throw ConfigError("precision must be f64 or f32");
    if (effort != "low" && effort != "medium" && effort != "high")
        throw ConfigError("effort must be low, medium or high");
    const auto open = resolved_open_qubits();
    if (open.empty()) throw ConfigError("need at least one open qubit");
    for (int q : open)
        if (q < 0 || q >= n_qubits) throw ConfigError("open qubit out of range");
    const int l = static_cast<int>(open.size());
    if (l == n_qubits && n_groups > 1)
        throw ConfigError("all qubits open requires n_groups == 1");
    const std::uint64_t candidate_size = n_groups << l;
    if (sample_mode == SampleMode::TopK && (k < 1 || k > candidate_size))
        throw ConfigError("k=" + std::to_string(k) + " violates 1 <= k <= |S|=" +
                          std::to_string(candidate_size));
}

namespace {

SearchEffort effort_from_string(const std::string& s) {
    if (s == "low") return SearchEffort::Low;
    if (s == "high") return SearchEffort::High;
    return SearchEffort::Medium;
}

std::vector<int> all_qubits(int n) {
    std::vector<int> qs(n);
    std::iota(qs.begin(), qs.end(), 0);
    return qs;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig c;
    auto get = [&j](const char* key, auto& out) {
        if (j.contains(key)) out = j.at(key).template get<std::decay_t<decltype(out)>>();
    };
    get("n_qubits", c.n_qubits);
    get("n_cycles", c.n_cycles);
    get("topology", c.topology);
    get("seed", c.seed);
    get("broken_edges", c.broken_edges);
    get("m_configs", c.m_configs);
    get("open_qubits", c.open_qubits);
    get("l_open", c.l_open);
    get("n_groups", c.n_groups);
    get("k", c.k);
    get("workers", c.workers);
    get("memory_budget_bytes", c.memory_budget_bytes);
    get("precision", c.precision);
    get("oracle_cap", c.oracle_cap);
    get("effort", c.effort);
    get("out_dir", c.out_dir);
    if (j.contains("sample_mode")) {
        const std::string mode = j.at("sample_mode").get<std::string>();
        if (mode == "direct") c.sample_mode = SampleMode::Direct;
        else if (mode == "top_k") c.sample_mode = SampleMode::TopK;
        else throw ConfigError("sample_mode must be direct or top_k");
    }
    return c;
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["n_qubits"] = c.n_qubits;
    j["n_cycles"] = c.n_cycles;
    j["topology"] = c.topology;
    j["seed"] = c.seed;
    j["broken_edges"] = c.broken_edges;
    j["m_configs"] = c.m_configs;
    j["open_qubits"] = c.open_qubits;
    j["l_open"] = c.l_open;
    j["n_groups"] = c.n_groups;
    j["sample_mode"] = c.sample_mode == SampleMode::Direct ? "direct" : "top_k";
    j["k"] = c.k;
    j["workers"] = c.workers;
    j["memory_budget_bytes"] = c.memory_budget_bytes;
    j["precision"] = c.precision;
    j["oracle_cap"] = c.oracle_cap;
    j["effort"] = c.effort;
    j["out_dir"] = c.out_dir;
    return j.dump(2);
}

PipelineResult run_approx_state(const ExperimentConfig& config) {
    config.validate();
    PipelineResult r;
    r.circuit = gen_random_circuit(config.n_qubits, config.n_cycles, config.topology,
                                   config.seed);
    r.network = circuit_to_network(r.circuit, all_qubits(config.n_qubits));
    std::vector<Label> broken;
    if (config.broken_edges > 0)
        broken = select_broken_edges(r.network, config.broken_edges, config.seed);
    r.plan = find_contraction_path(r.network, config.memory_budget_bytes,
                                   effort_from_string(config.effort), config.seed, broken);
    r.broken_config = make_broken_config(broken, config.m_configs, config.seed);
    ContractResult cr = contract(r.network, r.plan,
                                 broken.empty() ? nullptr : &r.broken_config, {},
                                 config.workers);
    r.approx_state = std::move(cr.amplitudes);
    r.timings = std::move(cr.timings);
    r.stats = cr.stats;
    if (config.n_qubits <= config.oracle_cap)
        r.exact = simulate_exact(r.circuit, config.oracle_cap);
    return r;
}

std::string metrics_to_json(const MetricsReport& m, const ExperimentConfig& c) {
    json j;
    j["schema"] = "rcs-metrics-v1";
    j["xeb"] = m.xeb;
    j["fidelity"] = m.fidelity;
    j["predicted_xeb"] = m.predicted_xeb;
    j["pearson_r"] = m.pearson_r;
    j["pt_ks_statistic"] = m.pt_ks_statistic;
    j["pt_p_value"] = m.pt_p_value;
    j["xeb_over_fidelity"] = m.xeb_over_fidelity;
    j["inputs"] = {{"n_qubits", c.n_qubits},
                   {"n_cycles", c.n_cycles},
                   {"topology", c.topology},
                   {"seed", c.seed},
                   {"l", c.resolved_open_qubits().size()},
                   {"M", c.n_groups},
                   {"K", c.broken_edges},
                   {"m", c.m_configs},
                   {"k", c.k},
                   {"sample_mode", c.sample_mode == SampleMode::Direct ? "direct" : "top_k"}};
    return j.dump(2);
}

RunArtifacts cmd_run(const ExperimentConfig& config) {
    config.validate();
    if (config.precision == "f32")
        throw ConfigError("f32 precision is benchmark-only; runs with oracle metrics use f64");
    if (config.n_qubits > config.oracle_cap)
        throw CapacityError("cmd_run computes oracle-backed metrics; n_qubits " +
                            std::to_string(config.n_qubits) + " exceeds the cap of " +
                            std::to_string(config.oracle_cap));

    PipelineResult pipe = run_approx_state(config);
    const StateVector& exact = *pipe.exact;

    CandidateSet candidates =
        build_candidate_set(config.n_qubits, config.resolved_open_qubits(), config.n_groups,
                            Rng(config.seed).split(0xca11d).next_u64());
    const auto& approx = pipe.approx_state;
    ProbFn p_approx = [&approx](std::uint64_t i) { return std::norm(approx[i]); };
    ProbFn q_exact = [&exact](std::uint64_t i) { return std::norm(exact.amps[i]); };

    RunArtifacts out;
    if (config.sample_mode == SampleMode::TopK) {
        out.samples = top_k_select(candidates, p_approx, config.k);
    } else {
        out.samples = direct_sample(candidates, p_approx,
                                    Rng(config.seed).split(0xd1ec7).next_u64());
    }

    MetricsReport m;
    m.fidelity = state_fidelity(approx, exact.amps).value;
    m.xeb = xeb(out.samples, q_exact);
    m.predicted_xeb = config.sample_mode == SampleMode::TopK
                          ? predicted_topk_xeb(m.fidelity, candidates.size(), config.k)
                          : m.fidelity;
    std::vector<double> re_a(approx.size()), re_e(approx.size());
    for (std::size_t i = 0; i < approx.size(); ++i) {
        re_a[i] = approx[i].real();
        re_e[i] = exact.amps[i].real();
    }
    m.pearson_r = pearson_r(re_e, re_a);
    if (exact.amps.size() >= 1000) {
        std::vector<double> probs(exact.amps.size());
        for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(exact.amps[i]);
        PorterThomasFit fit = porter_thomas_check(probs, config.n_qubits);
        m.pt_ks_statistic = fit.ks_statistic;
        m.pt_p_value = fit.p_value;
    }
    m.xeb_over_fidelity = m.fidelity != 0.0 ? m.xeb / m.fidelity : 0.0;

    out.metrics = m;
    out.metrics_json = metrics_to_json(m, config);
    out.samples_text = samples_to_text(out.samples);

    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream f(fs::path(config.out_dir) / name, std::ios::binary);
        f << content;
    };
    write("circuit.json", circuit_to_json(pipe.circuit));
    write("plan.json", plan_to_json(pipe.plan, pipe.network));
    write("samples.txt", out.samples_text);
    write("metrics.json", out.metrics_json);
    write("timings.csv", timings_to_csv(pipe.timings));
    return out;
}

ScalingReport fit_scaling(const std::vector<int>& workers, const std::vector<double>& times_s,
                          int extrapolate_at) {
    if (workers.size() != times_s.size())
        throw ConfigError("worker counts and timings must have equal length");
    std::vector<int> distinct = workers;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2)
        throw ConfigError("scaling regression needs at least 2 distinct worker counts");

    std::vector<double> inv_w(workers.size());
    for (std::size_t i = 0; i < workers.size(); ++i) inv_w[i] = 1.0 / workers[i];
    LinearFit fit = linear_fit(inv_w, times_s);

    ScalingReport report;
    report.a = fit.slope;
    report.b = fit.intercept;
    report.r_squared = fit.r_squared;
    report.worker_counts = workers;
    report.times_s = times_s;
    report.extrapolated_workers = extrapolate_at;
    if (extrapolate_at > 0)
        report.extrapolated_time = fit.slope / extrapolate_at + fit.intercept;
    return report;
}

ScalingReport cmd_scaling(const ExperimentConfig& config, const std::vector<int>& worker_counts,
                          int extrapolate_at) {
    if (worker_counts.empty()) throw ConfigError("worker_counts must be nonempty");
    for (int w : worker_counts)
        if (w < 1) throw ConfigError("worker counts must be >= 1");
    config.validate();

    Circuit circuit =
        gen_random_circuit(config.n_qubits, config.n_cycles, config.topology, config.seed);
    TensorNetwork network = circuit_to_network(circuit, all_qubits(config.n_qubits));
    std::vector<Label> broken;
    if (config.broken_edges > 0)
        broken = select_broken_edges(network, config.broken_edges, config.seed);
    ContractionPlan plan =
        find_contraction_path(network, config.memory_budget_bytes,
                              effort_from_string(config.effort), config.seed, broken);
    BrokenEdgeConfig bc = make_broken_config(broken, config.m_configs, config.seed);

    std::vector<double> times;
    for (int w : worker_counts) {
        auto start = std::chrono::steady_clock::now();
        contract(network, plan, broken.empty() ? nullptr : &bc, {}, w);
        auto end = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(end - start).count());
    }
    return fit_scaling(worker_counts, times, extrapolate_at);
}

std::string cmd_energy(const EnergyModel& model) {
    if (model.device_power_watts < 0 || model.device_count < 0 || model.wall_seconds < 0)
        throw ConfigError("energy model requires nonnegative power, count and duration");
    json j;
    j["kind"] = "model";  // declared power, not a measurement
    j["device_power_watts"] = model.device_power_watts;
    j["device_count"] = model.device_count;
    j["wall_seconds"] = model.wall_seconds;
    j["energy_kwh"] = model.energy_kwh();
    j["references"] = json::array();
    struct Ref {
        const char* name;
        double kwh;
        const char* basis;
    };
    const Ref refs[] = {
        {"sycamore_quantum", 4.3, "26 kW chilled-water power over 600 s"},
        {"gpu_cluster_model", 409.6, "409.6 kW total over a one-hour basis"},
        {"pan_et_al_512gpu", 2688.0, "512 GPUs over 15 hours"},
        {"sunway_supercomputer", 2955.0, "35 MW over 304 s"},
    };
    for (const Ref& r : refs) {
        json e;
        e["name"] = r.name;
        e["energy_kwh"] = r.kwh;
        e["basis"] = r.basis;
        e["ratio"] = r.kwh > 0 ? model.energy_kwh() / r.kwh : 0.0;
        j["references"].push_back(std::move(e));
    }
    return j.dump(2);
}

Figure figure_from_name(const std::string& name) {
    if (name == "fidelity_vs_K") return Figure::FidelityVsK;
    if (name == "amplification_vs_k") return Figure::AmplificationVsK;
    if (name == "scaling") return Figure::Scaling;
    if (name == "pt_histogram") return Figure::PtHistogram;
    throw ConfigError("unknown figure: " + name);
}

namespace {

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    f << content;
}

std::string csv_curve(const std::vector<std::array<double, 4>>& rows,
                      const std::string& x_name) {
    std::ostringstream out;
    out << x_name << ",y,y_predicted,y_err\n";
    for (const auto& r : rows)
        out << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << '\n';
    return out.str();
}

double stderr_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0;
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (xs.size() - 1);
    return std::sqrt(var / xs.size());
}

double mean_of(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

}  // namespace

std::vector<std::string> cmd_reproduce(Figure figure, const std::string& out_dir) {
    std::vector<std::string> files;
    switch (figure) {
        case Figure::FidelityVsK: {
            // predicted 2^-K vs measured fidelity vs direct-sampling XEB
            const int n = 12, cycles = 12, n_seeds = 8;
            std::vector<std::array<double, 4>> fid_rows, xeb_rows;
            for (int K = 1; K <= 6; ++K) {
                std::vector<double> fids, xebs;
                for (int s = 1; s <= n_seeds; ++s) {
                    ExperimentConfig c;
                    c.n_qubits = n;
                    c.n_cycles = cycles;
                    c.seed = 1000 + s;
                    c.broken_edges = K;
                    c.l_open = 4;
                    c.n_groups = 1 << 12;
                    c.sample_mode = SampleMode::Direct;
                    c.effort = "low";
                    PipelineResult pipe = run_approx_state(c);
                    fids.push_back(
                        state_fidelity(pipe.approx_state, pipe.exact->amps).value);
                    CandidateSet cs = build_candidate_set(
                        n, c.resolved_open_qubits(), c.n_groups,
                        Rng(c.seed).split(0xca11d).next_u64());
                    const auto& approx = pipe.approx_state;
                    const auto& exact = pipe.exact->amps;
                    SampleSet samples = direct_sample(
                        cs, [&approx](std::uint64_t i) { return std::norm(approx[i]); },
                        Rng(c.seed).split(0xd1ec7).next_u64());
                    xebs.push_back(
                        xeb(samples, [&exact](std::uint64_t i) { return std::norm(exact[i]); }));
                }
                const double pred = std::pow(2.0, -K);
                fid_rows.push_back({double(K), mean_of(fids), pred, stderr_of(fids)});
                xeb_rows.push_back({double(K), mean_of(xebs), pred, stderr_of(xebs)});
            }
            write_file(out_dir, "fidelity_vs_K_fidelity.csv", csv_curve(fid_rows, "K"));
            write_file(out_dir, "fidelity_vs_K_xeb.csv", csv_curve(xeb_rows, "K"));
            files = {"fidelity_vs_K_fidelity.csv", "fidelity_vs_K_xeb.csv"};
            break;
        }
        case Figure::AmplificationVsK: {
            // top-k XEB against k for 1..5 broken edges, exhaustive candidates
            const int n = 14, cycles = 14, n_seeds = 3;
            CandidateSet cs = build_candidate_set(n, all_qubits(n), 1, 0);
            for (int D = 1; D <= 5; ++D) {
                // one contraction per (D, seed), shared across the k sweep
                std::vector<std::vector<cplx>> approx_states;
                std::vector<std::vector<cplx>> exact_states;
                std::vector<double> fids;
                for (int s = 1; s <= n_seeds; ++s) {
                    ExperimentConfig c;
                    c.n_qubits = n;
                    c.n_cycles = cycles;
                    c.seed = 2000 + s;
                    c.broken_edges = D;
                    c.open_qubits = all_qubits(n);
                    c.n_groups = 1;
                    c.effort = "low";
                    PipelineResult pipe = run_approx_state(c);
                    fids.push_back(state_fidelity(pipe.approx_state, pipe.exact->amps).value);
                    approx_states.push_back(std::move(pipe.approx_state));
                    exact_states.push_back(std::move(pipe.exact->amps));
                }
                std::vector<std::array<double, 4>> rows;
                for (int logk = 2; logk <= 12; ++logk) {
                    const std::uint64_t k = std::uint64_t{1} << logk;
                    std::vector<double> vals, preds;
                    for (int s = 0; s < n_seeds; ++s) {
                        const auto& approx = approx_states[s];
                        const auto& exact = exact_states[s];
                        SampleSet top = top_k_select(
                            cs, [&approx](std::uint64_t i) { return std::norm(approx[i]); },
                            k);
                        vals.push_back(xeb(
                            top, [&exact](std::uint64_t i) { return std::norm(exact[i]); }));
                        preds.push_back(predicted_topk_xeb(fids[s], cs.size(), k));
                    }
                    rows.push_back({double(k), mean_of(vals), mean_of(preds), stderr_of(vals)});
                }
                const std::string name = "amplification_vs_k_D" + std::to_string(D) + ".csv";
                write_file(out_dir, name, csv_curve(rows, "k"));
                files.push_back(name);
            }
            break;
        }
        case Figure::Scaling: {
            ExperimentConfig c;
            c.n_qubits = 14;
            c.n_cycles = 14;
            c.seed = 7;
            c.broken_edges = 6;
            c.m_configs = 64;
            c.open_qubits = all_qubits(14);
            c.n_groups = 1;
            c.effort = "low";
            std::vector<int> counts = {1, 2, 4, 8};
            ScalingReport rep = cmd_scaling(c, counts, 0);
            std::vector<std::array<double, 4>> rows;
            for (std::size_t i = 0; i < counts.size(); ++i)
                rows.push_back({double(counts[i]), rep.times_s[i],
                                rep.a / counts[i] + rep.b, 0.0});
            write_file(out_dir, "scaling.csv", csv_curve(rows, "workers"));
            files = {"scaling.csv"};
            break;
        }
        case Figure::PtHistogram: {
            const int n = 12;
            Circuit circuit = gen_random_circuit(n, n, "line", 42);
            StateVector state = simulate_exact(circuit);
            const double scale = std::pow(2.0, n);
            const int n_bins = 50;
            const double x_max = 10.0;
            std::vector<double> freq(n_bins, 0);
            for (const cplx& a : state.amps) {
                const double x = scale * std::norm(a);
                const int bin = std::min(n_bins - 1, static_cast<int>(x / x_max * n_bins));
                freq[bin] += 1.0;
            }
            const double width = x_max / n_bins;
            std::vector<std::array<double, 4>> rows;
            for (int b = 0; b < n_bins; ++b) {
                const double x = (b + 0.5) * width;
                const double density = freq[b] / state.amps.size() / width;
                rows.push_back({x, density, std::exp(-x),
                                std::sqrt(freq[b]) / state.amps.size() / width});
            }
            write_file(out_dir, "pt_histogram.csv", csv_curve(rows, "scaled_prob"));
            files = {"pt_histogram.csv"};
            break;
        }
    }
    return files;
}

}  // namespace rcs
