// Signal-side machinery: regressor generators, noise models with exact
// CDF/PDF evaluation, the binary measurement sensor, the one-bit channel,
// and the cooperative excitation validator.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "eftqdi/linalg.hpp"
#include "eftqdi/rng.hpp"

namespace eftqdi {

// Zero-mean noise with known distribution. stddev == 0 is the degenerate
// (noise-free) model whose CDF is the unit step; useful as a scripted test
// double since samples are identically zero.
struct NoiseModel {
    double stddev = 1.0;

    static NoiseModel gaussian(double stddev);
    static NoiseModel degenerate() { return NoiseModel{0.0}; }

    double cdf(double x) const;
    double pdf(double x) const;  // requires stddev > 0
    double sample(Rng& rng) const;
};

// Density envelope of the noise over {v : |threshold - v| <= radius}; for a
// zero-mean Gaussian the upper bound sits at the interval point nearest the
// mean and the lower bound at the farthest point. Throws DegenerateInterval
// when radius <= 0, NonPositiveInput when the model has no density.
struct DensityBounds {
    double lower = 0.0;
    double upper = 0.0;
};
DensityBounds density_bounds(const NoiseModel& model, double threshold, double radius);

// Produces the regressor sequence of one node. Two variants:
//  - state space: x <- A x + B eta with eta uniform on [-hw, hw], emits C x
//    (A and C diagonal, B a column vector);
//  - scripted: cycles through an explicit list of vectors.
// The realized max norm is tracked; when a hard bound is set, exceeding it
// throws BoundViolation (declared-bound monitoring without enforcement is the
// harness default, see ExperimentConfig::phi_bar).
class RegressorGenerator {
public:
    static RegressorGenerator state_space(Vec a_diag, Vec b, Vec c_diag, Vec x0,
                                          double innovation_halfwidth,
                                          std::optional<double> hard_bound = std::nullopt);
    static RegressorGenerator scripted(std::vector<Vec> sequence,
                                       std::optional<double> hard_bound = std::nullopt);

    // Advances the internal state and returns the next regressor.
    Vec next(Rng& rng);
    void next_into(Rng& rng, std::span<double> out);

    int dimension() const { return dimension_; }
    double realized_max() const { return realized_max_; }
    std::optional<double> hard_bound() const { return hard_bound_; }

private:
    RegressorGenerator() = default;

    bool is_scripted_ = false;
    int dimension_ = 0;
    Vec a_diag_, b_, c_diag_, x_;
    double halfwidth_ = 0.0;
    std::vector<Vec> script_;
    std::size_t script_pos_ = 0;
    std::optional<double> hard_bound_;
    double realized_max_ = 0.0;
};

// One-bit measurement: emits 1 iff phi' theta + d <= threshold (equality
// counts as 1).
struct BinarySensor {
    double threshold = 0.0;
    NoiseModel noise;

    int sense(std::span<const double> phi, std::span<const double> theta, Rng& rng) const;
};

// One-bit channel: the caller supplies the encoded scalar; emits 1 iff
// encoded + omega <= threshold.
struct QuantizedChannel {
    double threshold = 0.0;
    NoiseModel noise;

    int transmit(double encoded, Rng& rng) const;
};

struct ExcitationReport {
    int window = 0;
    double delta_phi_sq = 0.0;
    bool satisfied = false;
};

// Sample-path surrogate of the cooperative excitation condition: minimum over
// window starts k <= horizon - h + 1 of lambda_min of
// (1/(m h)) sum_i sum_{l=k..k+h-1} phi_{l,i} phi_{l,i}^T. The report is
// satisfied when the minimum exceeds 1e-9.
ExcitationReport excitation_report(const std::vector<std::vector<Vec>>& streams, int window,
                                   int horizon);

}  // namespace eftqdi
