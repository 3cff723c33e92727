#include "eftqdi/signal.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "eftqdi/errors.hpp"
#include "eftqdi/gaussian.hpp"

namespace eftqdi {

NoiseModel NoiseModel::gaussian(double stddev) {
    if (stddev < 0.0) throw NonPositiveInput("NoiseModel: stddev must be >= 0");
    return NoiseModel{stddev};
}

double NoiseModel::cdf(double x) const {
    if (stddev == 0.0) return x >= 0.0 ? 1.0 : 0.0;
    return normal_cdf(x / stddev);
}

double NoiseModel::pdf(double x) const {
    if (stddev <= 0.0) throw NonPositiveInput("NoiseModel::pdf: degenerate model has no density");
    return normal_pdf(x / stddev) / stddev;
}

double NoiseModel::sample(Rng& rng) const {
    if (stddev == 0.0) return 0.0;
    return stddev * rng.normal();
}

DensityBounds density_bounds(const NoiseModel& model, double threshold, double radius) {
    if (!(radius > 0.0)) throw DegenerateInterval("density_bounds: radius must be positive");
    const double lo = threshold - radius;
    const double hi = threshold + radius;
    // Nearest / farthest points of [lo, hi] from the mean (zero).
    const double nearest = (lo <= 0.0 && 0.0 <= hi) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
    const double farthest = std::max(std::abs(lo), std::abs(hi));
    return DensityBounds{model.pdf(farthest), model.pdf(nearest)};
}

RegressorGenerator RegressorGenerator::state_space(Vec a_diag, Vec b, Vec c_diag, Vec x0,
                                                   double innovation_halfwidth,
                                                   std::optional<double> hard_bound) {
    const std::size_t n = a_diag.size();
    if (b.size() != n || c_diag.size() != n || x0.size() != n)
        throw DimensionMismatch("RegressorGenerator: model vectors must share dimension");
    if (innovation_halfwidth < 0.0)
        throw NonPositiveInput("RegressorGenerator: innovation halfwidth must be >= 0");
    RegressorGenerator g;
    g.dimension_ = static_cast<int>(n);
    g.a_diag_ = std::move(a_diag);
    g.b_ = std::move(b);
    g.c_diag_ = std::move(c_diag);
    g.x_ = std::move(x0);
    g.halfwidth_ = innovation_halfwidth;
    g.hard_bound_ = hard_bound;
    return g;
}

RegressorGenerator RegressorGenerator::scripted(std::vector<Vec> sequence,
                                                std::optional<double> hard_bound) {
    if (sequence.empty()) throw EmptyInput("RegressorGenerator: scripted sequence is empty");
    const std::size_t n = sequence.front().size();
    for (const auto& v : sequence)
        if (v.size() != n)
            throw DimensionMismatch("RegressorGenerator: scripted vectors must share dimension");
    RegressorGenerator g;
    g.is_scripted_ = true;
    g.dimension_ = static_cast<int>(n);
    g.script_ = std::move(sequence);
    g.hard_bound_ = hard_bound;
    return g;
}

void RegressorGenerator::next_into(Rng& rng, std::span<double> out) {
    if (out.size() != static_cast<std::size_t>(dimension_))
        throw DimensionMismatch("RegressorGenerator::next_into: output size mismatch");
    if (is_scripted_) {
        const Vec& v = script_[script_pos_];
        script_pos_ = (script_pos_ + 1) % script_.size();
        std::copy(v.begin(), v.end(), out.begin());
    } else {
        const double eta =
            halfwidth_ > 0.0 ? halfwidth_ * (2.0 * rng.uniform01() - 1.0) : 0.0;
        for (int c = 0; c < dimension_; ++c) {
            const auto ci = static_cast<std::size_t>(c);
            x_[ci] = a_diag_[ci] * x_[ci] + b_[ci] * eta;
            out[ci] = c_diag_[ci] * x_[ci];
        }
    }
    const double n = norm(out);
    realized_max_ = std::max(realized_max_, n);
    if (hard_bound_ && n > *hard_bound_)
        throw BoundViolation("regressor norm exceeds the configured bound");
}

Vec RegressorGenerator::next(Rng& rng) {
    Vec out(static_cast<std::size_t>(dimension_), 0.0);
    next_into(rng, out);
    return out;
}

int BinarySensor::sense(std::span<const double> phi, std::span<const double> theta,
                        Rng& rng) const {
    const double y = dot(phi, theta) + noise.sample(rng);
    return y <= threshold ? 1 : 0;
}

int QuantizedChannel::transmit(double encoded, Rng& rng) const {
    return encoded + noise.sample(rng) <= threshold ? 1 : 0;
}

ExcitationReport excitation_report(const std::vector<std::vector<Vec>>& streams, int window,
                                   int horizon) {
    if (streams.empty()) throw EmptyInput("excitation_report: no streams");
    if (window < 1) throw NonPositiveInput("excitation_report: window must be >= 1");
    if (horizon < window) throw DimensionMismatch("excitation_report: horizon < window");
    const std::size_t n = streams.front().empty() ? 0 : streams.front().front().size();
    for (const auto& stream : streams) {
        if (stream.size() < static_cast<std::size_t>(horizon))
            throw DimensionMismatch("excitation_report: stream shorter than horizon");
        for (const auto& v : stream)
            if (v.size() != n)
                throw DimensionMismatch("excitation_report: streams must share dimension");
    }

    const std::size_t m = streams.size();
    const double scale = 1.0 / (static_cast<double>(m) * static_cast<double>(window));

    // Sliding windowed Gram: add the incoming tick, drop the outgoing one.
    Matrix gram(n, n);
    const auto accumulate = [&](std::size_t tick, double sign) {
        for (const auto& stream : streams) {
            const Vec& phi = stream[tick];
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c) gram(r, c) += sign * phi[r] * phi[c];
        }
    };

    for (int l = 0; l < window; ++l) accumulate(static_cast<std::size_t>(l), 1.0);

    double min_eig = 0.0;
    bool first = true;
    for (int k = 0;; ++k) {
        const auto eig = symmetric_eigenvalues(scale * gram);
        const double lambda_min = eig.empty() ? 0.0 : eig.front();
        min_eig = first ? lambda_min : std::min(min_eig, lambda_min);
        first = false;
        if (k + window >= horizon) break;
        accumulate(static_cast<std::size_t>(k + window), 1.0);
        accumulate(static_cast<std::size_t>(k), -1.0);
    }

    ExcitationReport report;
    report.window = window;
    report.delta_phi_sq = std::max(0.0, min_eig);
    report.satisfied = min_eig > 1e-9;
    return report;
}

}  // namespace eftqdi
