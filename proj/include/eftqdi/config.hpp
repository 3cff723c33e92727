// Experiment configuration: the JSON-backed description of one simulation
// (model, ensemble, gains, horizon, seeding) plus validation against the
// prerequisites the recursion relies on. The field-by-field schema is
// documented in the README.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eftqdi/analysis.hpp"
#include "eftqdi/estimator.hpp"
#include "eftqdi/graph.hpp"
#include "eftqdi/signal.hpp"

namespace eftqdi {

struct StateSpaceSpec {
    Vec a_diag;
    Vec b;
    Vec c_diag;
};

struct EncoderSpec {
    std::string schedule = "cyclic-basis";  // or "explicit"
    std::vector<Vec> vectors;               // explicit schedules only
    int h_psi = 0;                          // 0 -> defaults to the dimension
};

struct ExperimentConfig {
    int dimension = 0;
    int node_count = 0;
    Vec theta;
    Vec box_lower, box_upper;
    TopologyEnsemble ensemble;
    Vec sensor_thresholds;  // broadcast from a scalar when the file gives one
    double measurement_noise_std = 1.0;
    double channel_threshold = 0.0;
    double channel_noise_std = 1.0;
    double innovation_halfwidth = 0.0;
    Vec regressor_initial_state;
    std::vector<StateSpaceSpec> regressor_nodes;
    double phi_bar = 0.0;        // declared envelope, powers the constants report
    bool enforce_phi_bar = false;  // hard bound (BoundViolation) when true
    EncoderSpec encoder;
    double beta = 1.0;
    double gamma = 1.0;
    double step_exponent = 1.0;
    int excitation_window = 1;
    std::int64_t horizon = 0;
    int reps = 1;
    std::uint64_t seed = 0;
    bool baseline = false;
    std::int64_t rate_window_lo = 0;  // 0 -> default min(1000, horizon/2)
    std::int64_t rate_window_hi = 0;  // 0 -> horizon
    Vec initial_theta;               // empty -> box center
    Vec initial_neighbor_estimate;   // empty -> box center

    ProjectionBox make_box() const;
    LinearEncoder make_encoder() const;
    StepSchedule make_schedule() const;
    std::vector<RegressorGenerator> make_regressors() const;
    NetworkInit make_network_init() const;

    std::int64_t effective_rate_lo() const;
    std::int64_t effective_rate_hi() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Throws IoError on unreadable files and ConfigInvalid on parse errors.
ExperimentConfig load_config(const std::filesystem::path& path);

struct ValidationReport {
    EnsembleReport ensemble;
    ExcitationReport excitation;
    double delta_psi_sq = 0.0;
    bool theta_in_box = false;
    std::optional<TheoryConstants> constants;     // absent when underived
    std::optional<GainCertificate> certificate;   // absent when constants degenerate
    std::optional<double> gamma_threshold;
    std::string constants_note;  // why constants/certificate are absent, if so

    bool accepted() const {
        return ensemble.assumption1() && theta_in_box && delta_psi_sq > 0.0;
    }
};

// Structural checks (throws ConfigInvalid naming the offending field or
// assumption for hard errors) followed by the property report.
ValidationReport validate_config(const ExperimentConfig& cfg);

// Hard precondition check used by the runner: structural validity plus the
// gating assumptions. Throws ConfigInvalid naming the failed prerequisite.
ValidationReport require_valid(const ExperimentConfig& cfg);

// Sample-path excitation surrogate: regressor streams generated from the
// noise-averaged model (innovations set to zero), scanned over the documented
// default of 1000 windows (clipped to the horizon).
ExcitationReport config_excitation_report(const ExperimentConfig& cfg);

// Constants assembled from the validated config; throws NonPositiveInput when
// a bound degenerates (e.g. an underflowed density lower bound).
TheoryConstants derive_theory_constants(const ExperimentConfig& cfg,
                                        const EnsembleReport& report,
                                        const ExcitationReport& excitation,
                                        double delta_psi_sq);

}  // namespace eftqdi
