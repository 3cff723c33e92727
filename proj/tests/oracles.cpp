#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracles {

namespace {
constexpr double kTwoOverSqrtPi = 1.1283791670955125739;
constexpr double kInvSqrtPi = 0.56418958354775628695;
constexpr double kInvSqrt2 = 0.70710678118654752440;
// Series below, continued fraction above. At the split both expansions carry
// 30 terms and agree below 1e-12 (checked by the oracle-integrity test).
constexpr double kSplit = 2.0;
}  // namespace

double series_erf(double x) {
    // erf(x) = 2/sqrt(pi) * sum_{n>=0} (-1)^n x^(2n+1) / (n! (2n+1))
    const double xsq = x * x;
    double term = x;  // x^(2n+1)/n! for n = 0
    double acc = x;   // term / (2n+1) accumulated
    for (int n = 1; n < 30; ++n) {
        term *= -xsq / static_cast<double>(n);
        acc += term / static_cast<double>(2 * n + 1);
    }
    return kTwoOverSqrtPi * acc;
}

double cf_erfc(double x) {
    // erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    double tail = 0.0;
    for (int n = 30; n >= 1; --n) tail = (0.5 * n) / (x + tail);
    return std::exp(-x * x) * kInvSqrtPi / (x + tail);
}

double normal_cdf(double x) {
    const double t = x * kInvSqrt2;
    if (t >= 0.0) {
        if (t <= kSplit) return 0.5 * (1.0 + series_erf(t));
        return 1.0 - 0.5 * cf_erfc(t);
    }
    if (-t <= kSplit) return 0.5 * (1.0 - series_erf(-t));
    return 0.5 * cf_erfc(-t);
}

std::array<double, 3> symmetric3_eigenvalues(const eftqdi::Matrix& a) {
    // Characteristic polynomial lambda^3 - c2 lambda^2 + c1 lambda - c0.
    const double c2 = a(0, 0) + a(1, 1) + a(2, 2);
    const double c1 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) -
                      a(0, 2) * a(2, 0) + a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    const double c0 = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                      a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                      a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));

    // Depressed cubic t^3 + p t + q with lambda = t + c2/3.
    const double shift = c2 / 3.0;
    const double p = c1 - c2 * c2 / 3.0;
    const double q = -c0 + c1 * shift - 2.0 * c2 * c2 * c2 / 27.0;

    std::array<double, 3> roots{};
    if (p >= -1e-300) {
        // Triple (or nearly triple) root.
        roots = {shift, shift, shift};
        return roots;
    }
    const double r = std::sqrt(-p / 3.0);
    double cos_arg = 3.0 * q / (2.0 * p * r);
    cos_arg = std::clamp(cos_arg, -1.0, 1.0);
    const double angle = std::acos(cos_arg) / 3.0;
    for (int k = 0; k < 3; ++k)
        roots[static_cast<std::size_t>(k)] =
            shift + 2.0 * r * std::cos(angle - 2.0 * M_PI * k / 3.0);
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace oracles
