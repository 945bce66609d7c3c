#ifndef HGDEBLUR_EXPERIMENT_HPP
#define HGDEBLUR_EXPERIMENT_HPP

#include "hgdeblur/signals.hpp"
#include "hgdeblur/solver.hpp"
#include "hgdeblur/stochastic.hpp"

#include <map>
#include <string>

namespace hgdeblur {

/// Resolved configuration of one experiment invocation. Parsed from a plain
/// key = value file (one per line, lists comma-separated, # comments) with
/// CLI flags overriding; no environment variables.
struct ExperimentConfig {
    std::string command;                 // reconstruct | sweep | diverge | sample-prior | verify
    std::vector<int> levels = {9};       // refinement levels n
    std::vector<double> eps_list = {0.01};
    ModelParams params;                  // params.eps tracks eps_list[0]
    std::string signal = "step";         // step | piecewise-smooth | custom-file
    std::string signal_file;             // nodal values for signal = custom-file
    std::uint64_t seed = 1;
    std::string out_dir = "runs";
    int sample_count = 2000;             // draws for sample-prior statistics
    bool full_solves = false;            // diverge: also run full alpha = 0 solves

    void apply_key(const std::string& key, const std::string& value);
    void validate_common() const;
    std::map<std::string, std::string> snapshot() const;
};

ExperimentConfig parse_config_file(const std::string& path);

/// Everything one reconstruction produced; re-running the same config and
/// seed reproduces the record bit for bit (single-threaded solves).
struct RunRecord {
    std::map<std::string, std::string> config;
    Mesh mesh;
    NodalSignal truth;
    SpectralVector measurement;
    MapEstimate estimate;
    std::vector<Well> wells;             // wells of v below 0.5
    double l2_error_vs_truth = 0.0;      // relative L2 distance, mass norm
    double fidelity_integral = 0.0;      // int (1 - v)^2 dt
    double runtime_seconds = 0.0;
    int threads = 1;
};

/// Synthesize the measurement for (signal, level, params, seed) and run the
/// alternating solver. No files are written.
RunRecord run_reconstruct(const ExperimentConfig& cfg, int level, double eps);

/// Write u/v/truth/back-projection CSVs, the spectral measurement, the
/// objective trace, metrics and an overview SVG into dir (created).
void write_record(const RunRecord& record, const std::string& dir);

/// Derived metrics recomputed from a record (used by the round-trip check).
std::map<std::string, double> record_metrics(const RunRecord& record);

// CLI entry points; return process exit codes (0 ok, 1 verification failure,
// 2 config error).
int cmd_reconstruct(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);
int cmd_diverge(const ExperimentConfig& cfg);
int cmd_sample_prior(const ExperimentConfig& cfg);
int cmd_verify(const ExperimentConfig& cfg);

}  // namespace hgdeblur

#endif
