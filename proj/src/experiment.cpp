#include "hgdeblur/experiment.hpp"

#include "hgdeblur/csv.hpp"
#include "hgdeblur/svg.hpp"
#include "hgdeblur/verify.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace hgdeblur {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t a = item.find_first_not_of(" \t");
        size_t b = item.find_last_not_of(" \t");
        if (a == std::string::npos) continue;
        out.push_back(item.substr(a, b - a + 1));
    }
    return out;
}

NodalSignal resample(const NodalSignal& u, const Mesh& fine) {
    Eigen::VectorXd values(fine.cells);
    for (int j = 0; j < fine.cells; ++j) values[j] = u.at(fine.node(j));
    return NodalSignal(fine, values);
}

double relative_l2(const NodalSignal& a, const NodalSignal& b) {
    // both resampled onto the finer grid; PL(coarse) is a subspace of PL(fine)
    const Mesh& fine = a.mesh.cells >= b.mesh.cells ? a.mesh : b.mesh;
    NodalSignal fa = resample(a, fine), fb = resample(b, fine);
    NodalSignal diff(fine, fa.values - fb.values);
    double den = std::sqrt(mass_quadratic_form(fb));
    return std::sqrt(mass_quadratic_form(diff)) / (den > 0.0 ? den : 1.0);
}

NodalSignal load_custom_signal(const std::string& path, const Mesh& mesh) {
    CsvTable t = read_csv(path);
    if (t.header.size() != 2) throw std::invalid_argument("custom signal csv must have 2 columns");
    if (static_cast<int>(t.rows.size()) != mesh.cells)
        throw std::invalid_argument("custom signal row count must equal the cell count");
    Eigen::VectorXd values(mesh.cells);
    for (int j = 0; j < mesh.cells; ++j) values[j] = t.rows[j][1];
    return NodalSignal(mesh, values);
}

NodalSignal truth_for(const ExperimentConfig& cfg, const Mesh& mesh) {
    if (cfg.signal == "custom-file") return load_custom_signal(cfg.signal_file, mesh);
    return signal_by_name(cfg.signal).sample(mesh);
}

CsvTable signal_table(const NodalSignal& u) {
    CsvTable t;
    t.header = {"t", "value"};
    for (int j = 0; j < u.mesh.cells; ++j)
        t.rows.push_back({u.mesh.node(j), u.values[j]});
    return t;
}

NodalSignal back_projection(const SpectralVector& m, const Mesh& mesh) {
    Eigen::VectorXd values(mesh.cells);
    for (int j = 0; j < mesh.cells; ++j) values[j] = m.eval(mesh.node(j)).real();
    return NodalSignal(mesh, values);
}

void write_kv(const std::string& path, const std::map<std::string, std::string>& kv) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
}

std::vector<double> nodal_xs(const Mesh& mesh) {
    std::vector<double> xs(mesh.cells);
    for (int j = 0; j < mesh.cells; ++j) xs[j] = mesh.node(j);
    return xs;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

int config_error(const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
}

}  // namespace

void ExperimentConfig::apply_key(const std::string& key, const std::string& value) {
    auto as_double = [&] { return std::stod(value); };
    auto as_int = [&] { return std::stoi(value); };
    if (key == "n") {
        levels.clear();
        for (const auto& item : split_list(value)) levels.push_back(std::stoi(item));
    } else if (key == "eps") {
        eps_list.clear();
        for (const auto& item : split_list(value)) eps_list.push_back(std::stod(item));
    } else if (key == "alpha") {
        params.alpha = as_double();
    } else if (key == "q") {
        params.q = as_double();
    } else if (key == "s") {
        params.s = as_double();
    } else if (key == "sigma") {
        params.sigma = as_double();
    } else if (key == "lambda") {
        params.lambda = as_double();
    } else if (key == "kappa") {
        params.kappa = as_double();
    } else if (key == "delta") {
        params.delta = as_double();
    } else if (key == "max_iter") {
        params.max_iter = as_int();
    } else if (key == "alt_log_weight") {
        params.alt_log_weight = (value == "1" || value == "true");
    } else if (key == "posthoc_fold") {
        params.posthoc_fold = (value == "1" || value == "true");
    } else if (key == "armijo_c") {
        params.armijo_c = as_double();
    } else if (key == "backtrack") {
        params.backtrack = as_double();
    } else if (key == "initial_step") {
        params.initial_step = as_double();
    } else if (key == "max_backtracks") {
        params.max_backtracks = as_int();
    } else if (key == "inner_max_steps") {
        params.inner_max_steps = as_int();
    } else if (key == "inner_rel_tol") {
        params.inner_rel_tol = as_double();
    } else if (key == "signal") {
        signal = value;
    } else if (key == "signal_file") {
        signal_file = value;
    } else if (key == "seed") {
        seed = std::stoull(value);
    } else if (key == "out") {
        out_dir = value;
    } else if (key == "count") {
        sample_count = as_int();
    } else if (key == "full_solves") {
        full_solves = (value == "1" || value == "true");
    } else if (key == "command") {
        command = value;
    } else if (key == "run_n") {
        // snapshot keys: written after n/eps so reloading a record's
        // config.cfg reproduces that exact run
        levels = {as_int()};
    } else if (key == "run_eps") {
        eps_list = {as_double()};
    } else if (key == "csv_schema") {
        if (value != "1") throw std::invalid_argument("unsupported csv schema: " + value);
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

void ExperimentConfig::validate_common() const {
    if (levels.empty()) throw std::invalid_argument("need at least one level n");
    for (int n : levels) {
        if (n < 1 || n > 12)
            throw std::invalid_argument("level n must lie in 1..12 for dense solves");
    }
    if (eps_list.empty()) throw std::invalid_argument("need at least one eps");
    ModelParams p = params;
    p.eps = eps_list.front();
    p.validate();
    if (signal != "step" && signal != "piecewise-smooth" && signal != "custom-file")
        throw std::invalid_argument("unknown signal: " + signal);
    if (signal == "custom-file" && signal_file.empty())
        throw std::invalid_argument("signal_file required for custom-file signal");
}

std::map<std::string, std::string> ExperimentConfig::snapshot() const {
    std::map<std::string, std::string> kv;
    kv["command"] = command;
    std::string ns, es;
    for (size_t i = 0; i < levels.size(); ++i) ns += (i ? "," : "") + std::to_string(levels[i]);
    for (size_t i = 0; i < eps_list.size(); ++i)
        es += (i ? "," : "") + format_double(eps_list[i]);
    kv["n"] = ns;
    kv["eps"] = es;
    kv["alpha"] = format_double(params.alpha);
    kv["q"] = format_double(params.q);
    kv["s"] = format_double(params.s);
    kv["sigma"] = format_double(params.sigma);
    kv["lambda"] = format_double(params.residual_weight());
    kv["kappa"] = format_double(params.noise_exponent());
    kv["delta"] = format_double(params.delta);
    kv["max_iter"] = std::to_string(params.max_iter);
    kv["alt_log_weight"] = params.alt_log_weight ? "1" : "0";
    kv["posthoc_fold"] = params.posthoc_fold ? "1" : "0";
    kv["armijo_c"] = format_double(params.armijo_c);
    kv["backtrack"] = format_double(params.backtrack);
    kv["initial_step"] = format_double(params.initial_step);
    kv["max_backtracks"] = std::to_string(params.max_backtracks);
    kv["inner_max_steps"] = std::to_string(params.inner_max_steps);
    kv["inner_rel_tol"] = format_double(params.inner_rel_tol);
    kv["signal"] = signal;
    if (!signal_file.empty()) kv["signal_file"] = signal_file;
    kv["seed"] = std::to_string(seed);
    kv["out"] = out_dir;
    kv["csv_schema"] = "1";
    return kv;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                            ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            size_t b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("empty key in " + path);
        cfg.apply_key(key, value);
    }
    return cfg;
}

RunRecord run_reconstruct(const ExperimentConfig& cfg, int level, double eps) {
    RunRecord rec;
    rec.mesh = Mesh(level);
    rec.config = cfg.snapshot();
    rec.config["run_n"] = std::to_string(level);
    rec.config["run_eps"] = format_double(eps);

    ModelParams p = cfg.params;
    p.eps = eps;
    p.validate();

    rec.truth = truth_for(cfg, rec.mesh);
    Rng rng(cfg.seed);
    rec.measurement = synthesize_measurement(rec.truth, p, rng);

    auto t0 = std::chrono::steady_clock::now();
    rec.estimate = alternate_minimize(rec.measurement, p);
    auto t1 = std::chrono::steady_clock::now();
    rec.runtime_seconds = std::chrono::duration<double>(t1 - t0).count();

    rec.wells = detect_wells(rec.estimate.v, 0.5);
    rec.l2_error_vs_truth = relative_l2(rec.estimate.u, rec.truth);
    NodalSignal one_minus_v(rec.mesh,
                            Eigen::VectorXd::Ones(rec.mesh.cells) - rec.estimate.v.values);
    rec.fidelity_integral = mass_quadratic_form(one_minus_v);
    return rec;
}

std::map<std::string, double> record_metrics(const RunRecord& record) {
    std::map<std::string, double> m;
    m["well_count"] = static_cast<double>(record.wells.size());
    for (size_t i = 0; i < record.wells.size(); ++i) {
        m["well_" + std::to_string(i) + "_position"] = record.wells[i].position;
        m["well_" + std::to_string(i) + "_depth"] = record.wells[i].depth;
    }
    m["l2_error_vs_truth"] = record.l2_error_vs_truth;
    m["fidelity_integral"] = record.fidelity_integral;
    m["final_objective"] = record.estimate.trace.iterates.back().second.total;
    m["iterations"] = static_cast<double>(record.estimate.trace.iterates.size() - 1);
    return m;
}

void write_record(const RunRecord& record, const std::string& dir) {
    fs::create_directories(dir);
    write_kv(dir + "/config.cfg", record.config);

    write_csv(dir + "/u.csv", signal_table(record.estimate.u));
    write_csv(dir + "/v.csv", signal_table(record.estimate.v));
    write_csv(dir + "/truth.csv", signal_table(record.truth));
    NodalSignal back = back_projection(record.measurement, record.mesh);
    write_csv(dir + "/m_backprojection.csv", signal_table(back));

    CsvTable meas;
    meas.header = {"j", "re", "im"};
    for (int j = -record.measurement.order; j <= record.measurement.order; ++j)
        meas.rows.push_back({static_cast<double>(j), record.measurement.at(j).real(),
                             record.measurement.at(j).imag()});
    write_csv(dir + "/measurement.csv", meas);

    CsvTable trace;
    trace.header = {"iter", "log_term", "grad_term", "v_smooth", "v_fidelity", "residual",
                    "total"};
    for (const auto& [iter, b] : record.estimate.trace.iterates)
        trace.rows.push_back({static_cast<double>(iter), b.log_term, b.grad_term, b.v_smooth,
                              b.v_fidelity, b.residual, b.total});
    write_csv(dir + "/trace.csv", trace);

    std::map<std::string, std::string> metrics;
    for (const auto& [k, v] : record_metrics(record)) metrics[k] = format_double(v);
    metrics["stop_reason"] = to_string(record.estimate.trace.stop_reason);
    metrics["runtime_seconds"] = format_double(record.runtime_seconds);
    metrics["threads"] = std::to_string(record.threads);
    write_kv(dir + "/metrics.txt", metrics);

    SvgPlot plot("reconstruction (n=" + record.config.at("run_n") +
                 ", eps=" + record.config.at("run_eps") + ")");
    std::vector<double> xs = nodal_xs(record.mesh);
    plot.add_series("truth", xs, to_std(record.truth.values), "#888888");
    plot.add_series("data (back-projected)", xs, to_std(back.values), "#bbbb44");
    plot.add_series("u_map", xs, to_std(record.estimate.u.values), "#cc3333");
    plot.add_series("v_map", xs, to_std(record.estimate.v.values), "#3366cc");
    plot.write(dir + "/plot.svg");
}

int cmd_reconstruct(const ExperimentConfig& cfg) {
    RunRecord rec;
    try {
        cfg.validate_common();
        rec = run_reconstruct(cfg, cfg.levels.front(), cfg.eps_list.front());
    } catch (const std::invalid_argument& e) {
        return config_error(e);
    }
    write_record(rec, cfg.out_dir);
    std::cout << "n=" << cfg.levels.front() << " eps=" << cfg.eps_list.front()
              << " wells=" << rec.wells.size() << " l2_error=" << rec.l2_error_vs_truth
              << " stop=" << to_string(rec.estimate.trace.stop_reason)
              << " time=" << rec.runtime_seconds << "s -> " << cfg.out_dir << "\n";
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
    std::vector<RunRecord> records;
    try {
        cfg.validate_common();
        if (cfg.levels.size() < 2 && cfg.eps_list.size() < 2)
            throw std::invalid_argument("sweep needs >= 2 points in n or eps");
        std::vector<std::pair<int, double>> points;
        for (int n : cfg.levels)
            for (double e : cfg.eps_list) points.emplace_back(n, e);
        for (auto [n, e] : points) {
            RunRecord rec = run_reconstruct(cfg, n, e);
            std::ostringstream sub;
            sub << cfg.out_dir << "/n" << n << "_eps" << e;
            write_record(rec, sub.str());
            std::cout << "n=" << n << " eps=" << e << " wells=" << rec.wells.size()
                      << " fidelity/eps=" << rec.fidelity_integral / e << "\n";
            records.push_back(std::move(rec));
        }
    } catch (const std::invalid_argument& e) {
        return config_error(e);
    }

    CsvTable sweep;
    sweep.header = {"n", "eps", "well_count", "min_v", "fidelity_integral",
                    "fidelity_over_eps", "l2_error_vs_truth", "rel_dist_to_finest"};
    const RunRecord& finest = records.back();
    for (const RunRecord& rec : records) {
        double min_v = rec.estimate.v.values.minCoeff();
        double dist = relative_l2(rec.estimate.u, finest.estimate.u);
        sweep.rows.push_back({static_cast<double>(rec.mesh.level),
                              std::stod(rec.config.at("run_eps")),
                              static_cast<double>(rec.wells.size()), min_v,
                              rec.fidelity_integral,
                              rec.fidelity_integral / std::stod(rec.config.at("run_eps")),
                              rec.l2_error_vs_truth, dist});
    }
    fs::create_directories(cfg.out_dir);
    write_csv(cfg.out_dir + "/sweep.csv", sweep);
    return 0;
}

int cmd_diverge(const ExperimentConfig& cfg) {
    try {
        if (cfg.params.alpha != 0.0)
            throw std::invalid_argument("diverge requires alpha = 0");
        if (cfg.eps_list.empty()) throw std::invalid_argument("need eps");
    } catch (const std::exception& e) {
        return config_error(e);
    }
    const double eps = cfg.eps_list.front();
    int n_lo = cfg.levels.front(), n_hi = cfg.levels.back();
    if (cfg.levels.size() == 1) {
        n_lo = 6;
        n_hi = 12;
    }

    fs::create_directories(cfg.out_dir);
    CsvTable table;
    table.header = {"N", "s_star", "value", "N_over_value"};
    for (const DivergenceRow& row : diverge_alpha0(n_lo, n_hi, eps)) {
        table.rows.push_back({static_cast<double>(row.cells), row.s_star, row.value,
                              row.cells / row.value});
        std::cout << "N=" << row.cells << " s*=" << row.s_star << " min g_N=" << row.value
                  << "\n";
    }
    write_csv(cfg.out_dir + "/diverge.csv", table);

    if (cfg.full_solves) {
        CsvTable solves;
        solves.header = {"N", "v_inf_norm", "objective"};
        for (int n = std::max(2, n_lo); n <= std::min(n_hi, 9); ++n) {
            ExperimentConfig sub = cfg;
            sub.command = "reconstruct";
            RunRecord rec = run_reconstruct(sub, n, eps);
            double vinf = rec.estimate.v.values.cwiseAbs().maxCoeff();
            solves.rows.push_back(
                {static_cast<double>(rec.mesh.cells), vinf,
                 rec.estimate.trace.iterates.back().second.total});
            std::cout << "full solve N=" << rec.mesh.cells << " |v|_inf=" << vinf << "\n";
        }
        write_csv(cfg.out_dir + "/diverge_solves.csv", solves);
    }
    return 0;
}

int cmd_sample_prior(const ExperimentConfig& cfg) {
    try {
        cfg.validate_common();
        if (cfg.sample_count < 2) throw std::invalid_argument("count must be >= 2");
    } catch (const std::exception& e) {
        return config_error(e);
    }
    const Mesh mesh(cfg.levels.front());
    ModelParams p = cfg.params;
    p.eps = cfg.eps_list.front();
    Rng rng(cfg.seed);

    // analytic E||V-1||^2 = trace(B P^-1)
    Eigen::MatrixXd precision = prior_v_precision(mesh, p);
    Eigen::MatrixXd cov = precision.llt().solve(Eigen::MatrixXd::Identity(mesh.cells, mesh.cells));
    double analytic = (mass_matrix(mesh) * cov).trace();

    const int written = std::min(cfg.sample_count, 16);
    CsvTable table;
    table.header = {"t"};
    for (int k = 0; k < written; ++k) {
        table.header.push_back("v" + std::to_string(k));
        table.header.push_back("u" + std::to_string(k));
    }
    std::vector<PriorSample> kept;
    double empirical = 0.0;
    for (int k = 0; k < cfg.sample_count; ++k) {
        PriorSample s = sample_prior(mesh, p, rng);
        NodalSignal vm1(mesh, s.v.values - Eigen::VectorXd::Ones(mesh.cells));
        empirical += mass_quadratic_form(vm1);
        if (k < written) kept.push_back(std::move(s));
    }
    empirical /= cfg.sample_count;

    for (int j = 0; j < mesh.cells; ++j) {
        std::vector<double> row{mesh.node(j)};
        for (const PriorSample& s : kept) {
            row.push_back(s.v.values[j]);
            row.push_back(s.u.values[j]);
        }
        table.rows.push_back(std::move(row));
    }
    fs::create_directories(cfg.out_dir);
    write_csv(cfg.out_dir + "/prior_samples.csv", table);

    SvgPlot plot("prior samples (n=" + std::to_string(mesh.level) + ")");
    std::vector<double> xs = nodal_xs(mesh);
    for (size_t k = 0; k < kept.size(); ++k) {
        plot.add_series(k == 0 ? "v draws" : "", xs, to_std(kept[k].v.values), "#3366cc");
        plot.add_series(k == 0 ? "u draws" : "", xs, to_std(kept[k].u.values), "#cc3333");
    }
    plot.write(cfg.out_dir + "/prior_samples.svg");

    std::cout << "E||V-1||^2 analytic=" << analytic << " empirical=" << empirical << " ("
              << cfg.sample_count << " draws)\n";
    return 0;
}

int cmd_verify(const ExperimentConfig& cfg) {
    verify::Options opt;
    opt.seed = cfg.seed;
    std::vector<verify::PropertyResult> results = verify::run_all(opt);
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.name << ": " << r.detail << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "verification passed" : "verification FAILED") << " ("
              << results.size() << " properties)\n";
    return all_pass ? 0 : 1;
}

}  // namespace hgdeblur
