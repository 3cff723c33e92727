// Gaussian error-function machinery. The CDF is evaluated through a rational
// Chebyshev approximation of erf/erfc (Cody's three-region scheme), with
// maximum absolute error well below 1e-10; the test suite pins it against an
// independent series / continued-fraction oracle.

#pragma once

namespace eftqdi {

double erf_approx(double x);
double erfc_approx(double x);

// Standard normal CDF and PDF (mean 0, standard deviation 1).
double normal_cdf(double x);
double normal_pdf(double x);

}  // namespace eftqdi
