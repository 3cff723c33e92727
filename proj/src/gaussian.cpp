#include "eftqdi/gaussian.hpp"

#include <cmath>

namespace eftqdi {

namespace {

// Rational Chebyshev coefficients for erf/erfc (W. J. Cody's scheme, as used
// in SPECFUN's CALERF). Three regions: |x| <= 0.46875, 0.46875 < |x| <= 4,
// and |x| > 4.
constexpr double kA[5] = {3.16112374387056560e0, 1.13864154151050156e2,
                          3.77485237685302021e2, 3.20937758913846947e3,
                          1.85777706184603153e-1};
constexpr double kB[4] = {2.36012909523441209e1, 2.44024637934444173e2,
                          1.28261652607737228e3, 2.84423683343917062e3};
constexpr double kC[9] = {5.64188496988670089e-1, 8.88314979438837594e0,
                          6.61191906371416295e1,  2.98635138197400131e2,
                          8.81952221241769090e2,  1.71204761263407058e3,
                          2.05107837782607147e3,  1.23033935479799725e3,
                          2.15311535474403846e-8};
constexpr double kD[8] = {1.57449261107098347e1, 1.17693950891312499e2,
                          5.37181101862009858e2, 1.62138957456669019e3,
                          3.29079923573345963e3, 4.36261909014324716e3,
                          3.43936767414372164e3, 1.23033935480374942e3};
constexpr double kP[6] = {3.05326634961232344e-1, 3.60344899949804439e-1,
                          1.25781726111229246e-1, 1.60837851487422766e-2,
                          6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr double kQ[5] = {2.56852019228982242e0,  1.87295284992346047e0,
                          5.27905102951428412e-1, 6.05183413124413191e-2,
                          2.33520497626869185e-3};

constexpr double kInvSqrtPi = 5.6418958354775628695e-1;
constexpr double kThreshold = 0.46875;

// exp(-y*y) split so the argument reduction loses no accuracy for large y.
double exp_neg_sq(double y) {
    const double ysq = std::trunc(y * 16.0) / 16.0;
    const double del = (y - ysq) * (y + ysq);
    return std::exp(-ysq * ysq) * std::exp(-del);
}

// erfc(y) for y > threshold (positive argument only).
double erfc_positive(double y) {
    if (y <= 4.0) {
        double num = kC[8] * y;
        double den = y;
        for (int i = 0; i < 7; ++i) {
            num = (num + kC[i]) * y;
            den = (den + kD[i]) * y;
        }
        return exp_neg_sq(y) * (num + kC[7]) / (den + kD[7]);
    }
    if (y >= 26.64) return 0.0;  // underflows double precision
    const double ysq = 1.0 / (y * y);
    double num = kP[5] * ysq;
    double den = ysq;
    for (int i = 0; i < 4; ++i) {
        num = (num + kP[i]) * ysq;
        den = (den + kQ[i]) * ysq;
    }
    const double r = ysq * (num + kP[4]) / (den + kQ[4]);
    return exp_neg_sq(y) * (kInvSqrtPi - r) / y;
}

// erf(x) for |x| <= threshold.
double erf_small(double x) {
    const double ysq = x * x;
    double num = kA[4] * ysq;
    double den = ysq;
    for (int i = 0; i < 3; ++i) {
        num = (num + kA[i]) * ysq;
        den = (den + kB[i]) * ysq;
    }
    return x * (num + kA[3]) / (den + kB[3]);
}

}  // namespace

double erf_approx(double x) {
    const double y = std::abs(x);
    if (y <= kThreshold) return erf_small(x);
    const double e = 1.0 - erfc_positive(y);
    return x < 0.0 ? -e : e;
}

double erfc_approx(double x) {
    const double y = std::abs(x);
    if (y <= kThreshold) return 1.0 - erf_small(x);
    const double e = erfc_positive(y);
    return x < 0.0 ? 2.0 - e : e;
}

double normal_cdf(double x) {
    constexpr double kInvSqrt2 = 0.70710678118654752440;
    return 0.5 * erfc_approx(-x * kInvSqrt2);
}

double normal_pdf(double x) {
    constexpr double kInvSqrt2Pi = 0.39894228040143267794;
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

}  // namespace eftqdi
