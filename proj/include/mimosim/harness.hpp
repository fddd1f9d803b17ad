#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mimosim/detector.hpp"
#include "mimosim/evolution.hpp"

namespace mimosim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Experiment { BerSim, BerApprox, FerSim, Complexity, Correlation };

Experiment experiment_from_name(const std::string& name);
const char* experiment_name(Experiment e);

struct SimConfig {
    Experiment experiment = Experiment::BerSim;
    int n_rx = 32;
    int n_tx = 8;
    int mod_order = 4;
    std::vector<DetectorVariant> detectors = {DetectorVariant::BPicDsc};
    std::string decoder = "seq"; // fer-sim: sc | scs | seq
    int t_max = 10;
    double zeta = 1e-4;
    double psi = 0.0;
    double rician_phi = 0.0;
    double gamma = 0.0;
    std::vector<double> snr_db = {10.0};
    std::uint64_t trials = 1000000;   // hard cap per point
    std::uint64_t stop_errors = 200;  // early-stop error-event target (0: disabled)
    std::uint64_t seed = 1;
    std::string code_spec_path;
    int list_size = 16;
    std::string out_path;
    int threads = 0; // 0: hardware concurrency
    bool exact_sigma = false;
    std::vector<double> alphas;      // ber-approx: optional K/N grid
    bool overlay_sim = false;        // ber-approx: co-run Monte-Carlo
    int dep_clusters = 4;            // complexity: D-EP cluster count
};

/// Throws ConfigError with a human-readable message.
void validate_config(const SimConfig& cfg);
SimConfig config_from_json_file(const std::string& path);

struct PointStats {
    double snr_db = 0.0;
    std::string label;
    std::uint64_t trials = 0;
    std::uint64_t total_bits = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t frame_errors = 0;
    std::uint64_t iteration_sum = 0;
    std::uint64_t add_sum = 0, cmp_sum = 0, mul_sum = 0;

    double ber() const { return total_bits ? double(bit_errors) / double(total_bits) : 0.0; }
    double fer() const { return trials ? double(frame_errors) / double(trials) : 0.0; }
    double avg_iterations() const { return trials ? double(iteration_sum) / double(trials) : 0.0; }
    double avg_add() const { return trials ? double(add_sum) / double(trials) : 0.0; }
    double avg_cmp() const { return trials ? double(cmp_sum) / double(trials) : 0.0; }
    double avg_mul() const { return trials ? double(mul_sum) / double(trials) : 0.0; }
    /// 95% binomial halfwidth of the bit (ber) or frame (fer) statistic.
    double ci95_halfwidth(bool frame_stat) const;
};

struct SweepResult {
    std::string schema;
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<PointStats> points; // sorted by SNR, then label
};

struct ApproxPoint {
    double snr_db = 0.0;
    double alpha = 0.0;
    int n_rx = 0, n_tx = 0;
    double v = 0.0;
    int evolution_iterations = 0;
    bool converged = false;
    double ber_ap = 0.0;
    std::optional<double> ber_sim; // overlay
    std::uint64_t sim_trials = 0;
};

struct ApproxResult {
    std::string schema;
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<ApproxPoint> points;
};

struct CorrelationRow {
    int iteration = 0; // correlates estimates at t and t-1
    std::uint64_t samples = 0;
    std::optional<double> correlation; // empty when variance degenerates
};

struct CorrelationResult {
    std::string schema;
    std::vector<std::pair<std::string, std::string>> meta;
    double snr_db = 0.0;
    std::string label;
    std::vector<CorrelationRow> rows;
};

struct ComplexityRow {
    std::string detector;
    std::int64_t n, k, m, t;
    std::int64_t multiplications;
};

struct ComplexityResult {
    std::string schema;
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<ComplexityRow> rows;
};

SweepResult run_ber_sim(const SimConfig& cfg);
SweepResult run_fer_sim(const SimConfig& cfg);
ApproxResult run_ber_approx(const SimConfig& cfg);
CorrelationResult run_correlation(const SimConfig& cfg);
ComplexityResult run_complexity(const SimConfig& cfg);

std::string to_csv(const SweepResult& r);
std::string to_csv(const ApproxResult& r);
std::string to_csv(const CorrelationResult& r);
std::string to_csv(const ComplexityResult& r);

void write_file(const std::string& path, const std::string& contents);

/// Runs the configured experiment and writes CSV to cfg.out_path (or returns
/// it) — the CLI entry point. Returns the CSV text.
std::string run_experiment(const SimConfig& cfg);

} // namespace mimosim
