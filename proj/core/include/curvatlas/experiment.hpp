#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvatlas/generators.hpp"

namespace curvatlas {

// Invalid configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Failed-trial budget exceeded or unrecoverable run failure (CLI exit code 3).
struct ExperimentAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { lambda_scan, rho_scan, sparsity, dimension, capacity, distance };

ExperimentKind experiment_kind_from_string(const std::string& s);
std::string to_string(ExperimentKind k);

// Flat key=value configuration with [experiment] and [generator] sections.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::dimension;
    GeneratorSpec generator;
    std::vector<double> ratios;  // lambda_scan shell ratios r/R
    std::vector<int> k_values;   // lambda_scan crossing multiplicities
    long trials = 1;
    std::uint64_t seed = 0;
    std::string output_path;
    int threads = 1;
    std::map<std::string, double> params;  // kind-specific knobs (gamma, k0, ...)

    double param(const std::string& key, double fallback) const;
    void validate() const;  // throws ConfigError with a field diagnostic
};

ExperimentConfig parse_experiment_config(std::istream& is);
ExperimentConfig load_experiment_config(const std::string& path);

struct ResultRecord {
    std::string experiment_id;
    std::vector<std::string> parameters;            // key=value echo, sorted
    std::vector<std::string> metrics;               // deterministic record lines
    std::map<std::string, std::string> tables;      // name -> CSV text
    double wall_time_sec = 0.0;
    std::string code_version;
    long failed_trials = 0;

    // The byte-comparison target for replays: parameters + metrics, no
    // timing.
    std::string metrics_text() const;
    // Full record including wall time and version.
    std::string records_text() const;
};

ResultRecord run_experiment(const ExperimentConfig& cfg);

// format "csv" writes each table as <path>.<name>.csv (header-only when the
// table is empty); "records" writes the record lines to <path>.records.
void emit_table(const ResultRecord& rec, const std::string& format, const std::string& path);

}  // namespace curvatlas
