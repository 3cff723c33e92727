// Theory-side constants and empirical diagnostics: the sigma and c_h
// constants, the gain threshold and the 2x2 W-matrix certificate deciding
// which convergence regime a (beta, gamma) pair is guaranteed to reach, the
// stacked neighbor-estimate error vector, Monte Carlo trace aggregation, and
// log-log convergence-rate fits.

#pragma once

#include <cstdint>
#include <vector>

#include "eftqdi/estimator.hpp"
#include "eftqdi/linalg.hpp"

namespace eftqdi {

struct TheoryConstants {
    int h = 1;              // regressor excitation window
    double c_h = 1.0;       // sup step-size ratio over the window
    double f_lower = 0.0;   // measurement noise density bounds over the
    double f_upper = 0.0;   //   reachable threshold interval
    double g_lower = 0.0;   // channel noise density lower bound
    double phi_bar = 0.0;   // declared regressor norm bound
    double psi_bar = 0.0;   // encoding vector norm bound
    double theta_bar = 0.0; // sup norm over the prior box
    double delta_phi_sq = 0.0;  // cooperative excitation level
    double delta_psi_sq = 0.0;  // encoder excitation level
    double pi_min = 0.0;
    double lambda2_mirror = 0.0;
    double lambda_m = 0.0;
    int n_bar = 0;

    // Recomputed from the fields on every call.
    double sigma() const;
};

// sigma = h f_lower lambda2 delta_phi^2 / (2 f_lower phi_bar^2 + h lambda2).
// Throws NonPositiveInput when any argument is not strictly positive.
double sigma_constant(int h, double f_lower, double lambda2_mirror, double delta_phi_sq,
                      double phi_bar);

// sup_{|p-q| < h} b_p / b_q for the polynomial family: h^exponent.
double c_h_constant(const StepSchedule& schedule);

// Mean-square convergence gain threshold: the fusion/estimation coefficient
// pair certifies convergence whenever gamma exceeds this value.
double gamma_threshold_thm1(double beta, const TheoryConstants& tc);

struct GainCertificate {
    double w1 = 0.0;
    double w2 = 0.0;
    double w3 = 0.0;
    double lambda_min_w = 0.0;
    bool satisfies_thm1 = false;       // lambda_min(W) > 0: mean-square convergence
    bool satisfies_thm2_rate = false;  // lambda_min(W) > 1 and beta > 2 c_h / (3 sigma):
                                       // O(b_k) rate for the 1/k schedule
};

// Closed-form smallest eigenvalue of the symmetric 2x2 [[w1, w2], [w2, w3]].
double lambda_min_2x2(double w1, double w2, double w3);

GainCertificate gain_certificate_thm2(double beta, double gamma, const TheoryConstants& tc);

// Concatenates est_ij - theta_j over every union edge, node-major with
// ascending sender order; length (sum_i N_i) * n.
Vec stack_error_vector(const Network& net);

struct LyapunovTrace {
    Vec u;  // mean over reps of the stacked neighbor-estimate squared error
    Vec v;  // mean over reps of the stacked fusion squared error
    int rep_count = 0;
};

struct RepTrace {
    Vec fe;   // per-tick total fusion squared error
    Vec ene;  // per-tick total neighbor-estimate squared error
};

// Arithmetic mean across repetitions at each tick; reps are folded in index
// order so the result is independent of execution schedule.
LyapunovTrace lyapunov_traces(const std::vector<RepTrace>& runs);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::int64_t k_lo = 0;
    std::int64_t k_hi = 0;
};

// Ordinary least squares of log(trace_k) on log(k) over [k_lo, k_hi]
// (1-based k, trace[0] is k = 1). Entries <= 0 are skipped; fewer than two
// positive entries throws NonPositiveTrace.
RateFit rate_fit(const Vec& trace, std::int64_t k_lo, std::int64_t k_hi);

}  // namespace eftqdi
