// Independent numeric oracles for the test suite. These deliberately avoid
// the implementation paths they are used to check: the Gaussian CDF oracle is
// a 30-term Maclaurin series spliced with a 30-level continued fraction, and
// the symmetric 3x3 eigenvalue oracle solves the characteristic cubic in
// closed (trigonometric) form.

#pragma once

#include <array>

#include "eftqdi/linalg.hpp"

namespace oracles {

// erf via 30-term power series; accurate below ~1e-12 for |x| <= 2.4.
double series_erf(double x);

// erfc via the classic continued fraction with 30 levels; for x >= 2.4.
double cf_erfc(double x);

// Standard normal CDF combining the two expansions.
double normal_cdf(double x);

// Roots of the characteristic polynomial of a symmetric 3x3 matrix,
// ascending; all roots are real (trigonometric solution of the cubic).
std::array<double, 3> symmetric3_eigenvalues(const eftqdi::Matrix& a);

}  // namespace oracles
