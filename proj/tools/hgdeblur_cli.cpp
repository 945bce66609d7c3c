#include "hgdeblur/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CliFlags {
    std::string config_path;
    std::string n, eps, alpha, q, s, sigma, lambda, kappa, signal, seed, max_iter, delta, out;
    std::string count, full_solves;
};

void add_common(CLI::App* cmd, CliFlags& f) {
    cmd->add_option("--config", f.config_path, "plain key = value configuration file");
    cmd->add_option("--n", f.n, "refinement level(s), comma separated");
    cmd->add_option("--eps", f.eps, "sharpness value(s), comma separated");
    cmd->add_option("--alpha", f.alpha, "prior/noise scaling exponent");
    cmd->add_option("--q", f.q, "perturbation exponent (default 2)");
    cmd->add_option("--s", f.s, "forward smoothing order (default 0.35)");
    cmd->add_option("--sigma", f.sigma, "noise magnitude (default 5e-3)");
    cmd->add_option("--lambda", f.lambda, "residual weight (default 1/sigma^2)");
    cmd->add_option("--kappa", f.kappa, "noise scaling exponent (default alpha)");
    cmd->add_option("--signal", f.signal, "step | piecewise-smooth | custom-file");
    cmd->add_option("--seed", f.seed, "rng seed");
    cmd->add_option("--max-iter", f.max_iter, "outer iteration cap (default 50)");
    cmd->add_option("--delta", f.delta, "outer decrease threshold");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--count", f.count, "prior sample draws (sample-prior)");
    cmd->add_option("--full-solves", f.full_solves, "1 to run full alpha=0 solves (diverge)");
}

int build_config(const CliFlags& f, const std::string& command,
                 hgdeblur::ExperimentConfig& cfg) {
    try {
        if (!f.config_path.empty()) cfg = hgdeblur::parse_config_file(f.config_path);
        cfg.command = command;
        auto set = [&](const char* key, const std::string& value) {
            if (!value.empty()) cfg.apply_key(key, value);
        };
        set("n", f.n);
        set("eps", f.eps);
        set("alpha", f.alpha);
        set("q", f.q);
        set("s", f.s);
        set("sigma", f.sigma);
        set("lambda", f.lambda);
        set("kappa", f.kappa);
        set("signal", f.signal);
        set("seed", f.seed);
        set("max_iter", f.max_iter);
        set("delta", f.delta);
        set("out", f.out);
        set("count", f.count);
        set("full_solves", f.full_solves);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical-Gaussian MAP deblurring on the circle"};
    app.require_subcommand(1);

    CliFlags flags;
    CLI::App* reconstruct = app.add_subcommand("reconstruct", "synthesize data and run the solver");
    CLI::App* sweep = app.add_subcommand("sweep", "reconstruct over lists of n or eps");
    CLI::App* diverge = app.add_subcommand("diverge", "alpha = 0 divergence experiment");
    CLI::App* sample = app.add_subcommand("sample-prior", "draw and summarize prior samples");
    CLI::App* verify = app.add_subcommand("verify", "run every module property check");
    for (CLI::App* cmd : {reconstruct, sweep, diverge, sample, verify}) add_common(cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    hgdeblur::ExperimentConfig cfg;
    if (int rc = build_config(flags, command, cfg); rc != 0) return rc;

    try {
        if (command == "reconstruct") return hgdeblur::cmd_reconstruct(cfg);
        if (command == "sweep") return hgdeblur::cmd_sweep(cfg);
        if (command == "diverge") return hgdeblur::cmd_diverge(cfg);
        if (command == "sample-prior") return hgdeblur::cmd_sample_prior(cfg);
        if (command == "verify") return hgdeblur::cmd_verify(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
