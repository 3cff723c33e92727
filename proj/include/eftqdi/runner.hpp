// Seeded Monte Carlo execution: runs R independent repetitions of the
// network recursion (optionally plus the non-cooperative baseline on the same
// sample paths), aggregates the squared-error traces in repetition order, and
// fits the log-log convergence rates.
//
// Repetitions are the unit of parallel work. Aggregation folds results
// strictly by repetition index, so the output is byte-identical for any
// worker count; EFTQDI_THREADS caps the pool (speed only, never output).

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eftqdi/analysis.hpp"
#include "eftqdi/config.hpp"

namespace eftqdi {

struct ExperimentResult {
    Vec mse_fe;   // V_k: mean over reps of the stacked fusion squared error
    Vec mse_ene;  // U_k: mean over reps of the stacked neighbor-estimate squared error
    std::optional<Vec> mse_fe_baseline;
    RateFit fit_fe;
    RateFit fit_ene;
    std::optional<RateFit> fit_baseline;
    ValidationReport validation;
    double realized_phi_max = 0.0;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> rep_seeds;  // informational per-rep stream tags
    nlohmann::json config_echo;
};

// Number of workers the runner will use for the given repetition count:
// hardware concurrency capped by EFTQDI_THREADS and by the rep count.
int worker_count(int reps);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// CSV: header `k,mse_fe,mse_ene[,mse_fe_baseline]`, one row per tick, shortest
// round-trip decimals, '\n' newlines, no trailing blank line.
void emit_csv(const ExperimentResult& result, const std::filesystem::path& path);
std::string csv_bytes(const ExperimentResult& result);

struct CsvContent {
    std::vector<std::int64_t> k;
    Vec mse_fe;
    Vec mse_ene;
    std::optional<Vec> mse_fe_baseline;
};
CsvContent parse_csv(const std::filesystem::path& path);

// `key = value` report: validation verdicts, constants, certificate, fits.
std::string result_report(const ExperimentResult& result);

}  // namespace eftqdi
