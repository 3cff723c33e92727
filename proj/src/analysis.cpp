#include "eftqdi/analysis.hpp"

#include <cmath>

#include "eftqdi/errors.hpp"

namespace eftqdi {

double sigma_constant(int h, double f_lower, double lambda2_mirror, double delta_phi_sq,
                      double phi_bar) {
    if (h < 1 || !(f_lower > 0.0) || !(lambda2_mirror > 0.0) || !(delta_phi_sq > 0.0) ||
        !(phi_bar > 0.0))
        throw NonPositiveInput("sigma_constant: all inputs must be strictly positive");
    const double hd = static_cast<double>(h);
    return hd * f_lower * lambda2_mirror * delta_phi_sq /
           (2.0 * f_lower * phi_bar * phi_bar + hd * lambda2_mirror);
}

double TheoryConstants::sigma() const {
    return sigma_constant(h, f_lower, lambda2_mirror, delta_phi_sq, phi_bar);
}

double c_h_constant(const StepSchedule& schedule) {
    // For b_k = k^-p the ratio b_p/b_q over |p-q| < h peaks at indices (1, h).
    return std::pow(static_cast<double>(schedule.window()), schedule.exponent());
}

double gamma_threshold_thm1(double beta, const TheoryConstants& tc) {
    if (!(beta > 0.0)) throw NonPositiveInput("gamma_threshold_thm1: beta must be positive");
    if (!(tc.g_lower > 0.0) || !(tc.pi_min > 0.0) || !(tc.delta_psi_sq > 0.0) ||
        !(tc.c_h > 0.0) || tc.n_bar < 1 || !(tc.f_upper > 0.0) || !(tc.phi_bar > 0.0) ||
        !(tc.lambda_m > 0.0))
        throw NonPositiveInput("gamma_threshold_thm1: constants must be strictly positive");
    const double sigma = tc.sigma();
    const double n_bar = static_cast<double>(tc.n_bar);
    const double phi4 = tc.phi_bar * tc.phi_bar * tc.phi_bar * tc.phi_bar;
    const double c_h4 = tc.c_h * tc.c_h * tc.c_h * tc.c_h;
    const double bracket = 2.0 * tc.c_h * n_bar +
                           sigma * (tc.f_upper * tc.f_upper * phi4 + tc.lambda_m * tc.lambda_m) +
                           8.0 * c_h4 * n_bar * n_bar / (3.0 * sigma * sigma * sigma);
    return beta / (2.0 * tc.g_lower * tc.pi_min * tc.delta_psi_sq) * bracket;
}

double lambda_min_2x2(double w1, double w2, double w3) {
    const double trace = w1 + w3;
    const double det = w1 * w3 - w2 * w2;
    // Discriminant equals (w1 - w3)^2 + 4 w2^2 >= 0 always.
    const double disc = std::max(0.0, trace * trace - 4.0 * det);
    return 0.5 * (trace - std::sqrt(disc));
}

GainCertificate gain_certificate_thm2(double beta, double gamma, const TheoryConstants& tc) {
    if (!(beta > 0.0) || !(gamma > 0.0))
        throw NonPositiveInput("gain_certificate_thm2: gains must be positive");
    const double sigma = tc.sigma();
    if (!(tc.g_lower > 0.0) || !(tc.pi_min > 0.0) || !(tc.delta_psi_sq > 0.0) ||
        !(tc.c_h > 0.0) || tc.n_bar < 1 || !(tc.f_upper > 0.0) || !(tc.lambda_m > 0.0))
        throw NonPositiveInput("gain_certificate_thm2: constants must be strictly positive");

    const double n_bar = static_cast<double>(tc.n_bar);
    const double phi4 = tc.phi_bar * tc.phi_bar * tc.phi_bar * tc.phi_bar;
    GainCertificate cert;
    cert.w1 = 2.0 * gamma * tc.g_lower * tc.pi_min * tc.delta_psi_sq / tc.c_h -
              beta * (tc.f_upper * tc.f_upper * phi4 * sigma / tc.c_h + 2.0 * n_bar +
                      sigma * tc.lambda_m * tc.lambda_m / tc.c_h);
    cert.w2 = -2.0 * beta * tc.c_h * n_bar / sigma;
    cert.w3 = 3.0 * beta * sigma / (2.0 * tc.c_h);
    cert.lambda_min_w = lambda_min_2x2(cert.w1, cert.w2, cert.w3);
    cert.satisfies_thm1 = cert.lambda_min_w > 0.0;
    cert.satisfies_thm2_rate =
        cert.lambda_min_w > 1.0 && beta > 2.0 * tc.c_h / (3.0 * sigma);
    return cert;
}

Vec stack_error_vector(const Network& net) {
    const auto n = static_cast<std::size_t>(net.dimension());
    Vec out;
    out.reserve(net.union_edges().size() * n);
    for (const auto& e : net.union_edges()) {
        const auto& node = net.node(e.receiver);
        const Vec& est = node.neighbor_est[static_cast<std::size_t>(e.local)];
        const Vec& sender_theta = net.node(e.sender).theta;
        for (std::size_t c = 0; c < n; ++c) out.push_back(est[c] - sender_theta[c]);
    }
    return out;
}

LyapunovTrace lyapunov_traces(const std::vector<RepTrace>& runs) {
    if (runs.empty()) throw EmptyInput("lyapunov_traces: no repetitions");
    const std::size_t horizon = runs.front().fe.size();
    for (const auto& rep : runs)
        if (rep.fe.size() != horizon || rep.ene.size() != horizon)
            throw DimensionMismatch("lyapunov_traces: repetitions must share the horizon");

    LyapunovTrace trace;
    trace.rep_count = static_cast<int>(runs.size());
    trace.u.assign(horizon, 0.0);
    trace.v.assign(horizon, 0.0);
    for (const auto& rep : runs) {
        for (std::size_t k = 0; k < horizon; ++k) {
            trace.v[k] += rep.fe[k];
            trace.u[k] += rep.ene[k];
        }
    }
    const double inv = 1.0 / static_cast<double>(runs.size());
    for (std::size_t k = 0; k < horizon; ++k) {
        trace.v[k] *= inv;
        trace.u[k] *= inv;
    }
    return trace;
}

RateFit rate_fit(const Vec& trace, std::int64_t k_lo, std::int64_t k_hi) {
    if (k_lo < 1 || k_hi > static_cast<std::int64_t>(trace.size()) || k_lo >= k_hi)
        throw DimensionMismatch("rate_fit: window must satisfy 1 <= k_lo < k_hi <= horizon");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::int64_t count = 0;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double y_val = trace[static_cast<std::size_t>(k - 1)];
        if (!(y_val > 0.0)) continue;
        const double x = std::log(static_cast<double>(k));
        const double y = std::log(y_val);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) throw NonPositiveTrace("rate_fit: fewer than two positive samples in window");

    const double nd = static_cast<double>(count);
    const double denom = nd * sxx - sx * sx;
    RateFit fit;
    fit.k_lo = k_lo;
    fit.k_hi = k_hi;
    fit.slope = (nd * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / nd;

    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / nd;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double y_val = trace[static_cast<std::size_t>(k - 1)];
        if (!(y_val > 0.0)) continue;
        const double x = std::log(static_cast<double>(k));
        const double y = std::log(y_val);
        const double r = y - (fit.intercept + fit.slope * x);
        ss_res += r * r;
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

}  // namespace eftqdi
