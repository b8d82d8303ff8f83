#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "rcs/contraction_plan.hpp"
#include "rcs/errors.hpp"
#include "rcs/harness.hpp"
#include "rcs/tensor_network.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw rcs::ConfigError("cannot read file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct CommonFlags {
    std::string config_path;
    std::int64_t seed = -1;
    int workers = 0;
    std::string out_dir;
    std::string precision;
};

rcs::ExperimentConfig load_config(const CommonFlags& flags) {
    rcs::ExperimentConfig config;
    if (!flags.config_path.empty()) config = rcs::config_from_json(slurp(flags.config_path));
    // flags win over the config file
    if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.workers > 0) config.workers = flags.workers;
    if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
    if (!flags.precision.empty()) config.precision = flags.precision;
    return config;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment config JSON");
    cmd->add_option("--seed", flags.seed, "circuit seed override");
    cmd->add_option("--workers", flags.workers, "worker thread count override");
    cmd->add_option("--out", flags.out_dir, "output directory override");
    cmd->add_option("--precision", flags.precision, "f64 or f32")
        ->check(CLI::IsMember({"f64", "f32"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"approximate random-circuit sampling engine"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* run = app.add_subcommand("run", "full pipeline: circuit, plan, contract, sample");
    add_common(run, flags);

    auto* plan = app.add_subcommand("plan", "contraction plan for the configured circuit");
    add_common(plan, flags);

    auto* scaling = app.add_subcommand("scaling", "wall time against worker count");
    add_common(scaling, flags);
    std::vector<int> worker_counts{1, 2, 4, 8};
    int extrapolate_at = 0;
    scaling->add_option("--counts", worker_counts, "worker counts to measure");
    scaling->add_option("--extrapolate", extrapolate_at, "extrapolate to this worker count");

    auto* energy = app.add_subcommand("energy", "declared-power energy model");
    double power_watts = 400.0, wall_seconds = 3600.0;
    int device_count = 1024;
    energy->add_option("--power-watts", power_watts, "per-device power draw");
    energy->add_option("--devices", device_count, "device count");
    energy->add_option("--seconds", wall_seconds, "wall time");

    auto* reproduce = app.add_subcommand("reproduce", "emit figure-analogue CSV datasets");
    add_common(reproduce, flags);
    std::string figure = "fidelity_vs_K";
    reproduce->add_option("figure", figure,
                          "fidelity_vs_K | amplification_vs_k | scaling | pt_histogram");

    auto* oracle = app.add_subcommand("oracle-check",
                                      "compare exact contraction against the statevector");
    add_common(oracle, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            rcs::ExperimentConfig config = load_config(flags);
            rcs::RunArtifacts artifacts = rcs::cmd_run(config);
            std::cout << artifacts.metrics_json << "\n";
        } else if (plan->parsed()) {
            rcs::ExperimentConfig config = load_config(flags);
            config.validate();
            rcs::PipelineResult pipe = rcs::run_approx_state(config);
            std::cout << rcs::plan_to_json(pipe.plan, pipe.network) << "\n";
        } else if (scaling->parsed()) {
            rcs::ExperimentConfig config = load_config(flags);
            rcs::ScalingReport rep = rcs::cmd_scaling(config, worker_counts, extrapolate_at);
            std::cout << "a=" << rep.a << " b=" << rep.b << " r_squared=" << rep.r_squared;
            if (extrapolate_at > 0)
                std::cout << " extrapolated_time_s=" << rep.extrapolated_time;
            std::cout << "\n";
        } else if (energy->parsed()) {
            rcs::EnergyModel model{power_watts, device_count, wall_seconds};
            std::cout << rcs::cmd_energy(model) << "\n";
        } else if (reproduce->parsed()) {
            rcs::ExperimentConfig config = load_config(flags);
            const std::string dir = config.out_dir;
            for (const std::string& f :
                 rcs::cmd_reproduce(rcs::figure_from_name(figure), dir))
                std::cout << dir << "/" << f << "\n";
        } else if (oracle->parsed()) {
            rcs::ExperimentConfig config = load_config(flags);
            config.broken_edges = 0;
            config.m_configs = 1;
            rcs::PipelineResult pipe = rcs::run_approx_state(config);
            if (!pipe.exact)
                throw rcs::CapacityError("oracle-check needs n_qubits within the oracle cap");
            double worst = 0;
            for (std::size_t i = 0; i < pipe.approx_state.size(); ++i) {
                const double mag = std::abs(pipe.exact->amps[i]);
                const double err = std::abs(pipe.approx_state[i] - pipe.exact->amps[i]);
                worst = std::max(worst, mag > 1e-14 ? err / mag : err);
            }
            std::cout << "max_relative_amplitude_error=" << worst << "\n";
            if (worst > 1e-8) {
                std::cerr << "oracle-check FAILED (tolerance 1e-8)\n";
                return 3;
            }
        }
    } catch (const rcs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
