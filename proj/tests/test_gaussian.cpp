#include <doctest.h>

#include <cmath>

#include "eftqdi/gaussian.hpp"
#include "eftqdi/rng.hpp"
#include "eftqdi/signal.hpp"
#include "oracles.hpp"

using namespace eftqdi;

TEST_CASE("oracle splice is self-consistent at the crossover") {
    // Series and continued fraction must agree where the oracle switches.
    for (double t = 1.8; t <= 2.2; t += 0.01) {
        const double series = 1.0 - oracles::series_erf(t);
        const double cf = oracles::cf_erfc(t);
        CHECK(std::abs(series - cf) < 1e-11);
    }
}

TEST_CASE("normal cdf matches the series/continued-fraction oracle to 1e-10") {
    const NoiseModel model = NoiseModel::gaussian(8.0);
    double max_err = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = -64.0 + 128.0 * static_cast<double>(i) / 9999.0;
        max_err = std::max(max_err, std::abs(model.cdf(x) - oracles::normal_cdf(x / 8.0)));
    }
    CHECK(max_err <= 1e-10);

    const NoiseModel unit = NoiseModel::gaussian(1.0);
    max_err = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = -6.0 + 12.0 * static_cast<double>(i) / 9999.0;
        max_err = std::max(max_err, std::abs(unit.cdf(x) - oracles::normal_cdf(x)));
    }
    CHECK(max_err <= 1e-10);
}

TEST_CASE("cdf point values") {
    const NoiseModel model = NoiseModel::gaussian(8.0);
    CHECK(model.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(model.cdf(8.0) == doctest::Approx(0.841344746068543).epsilon(1e-10));
    CHECK(model.cdf(-8.0) == doctest::Approx(0.158655253931457).epsilon(1e-10));
    CHECK(std::abs(model.cdf(8.0) - oracles::normal_cdf(1.0)) < 1e-12);
}

TEST_CASE("cdf monotonicity and symmetry") {
    const NoiseModel model = NoiseModel::gaussian(3.0);
    Rng rng(171);
    for (int trial = 0; trial < 1000; ++trial) {
        const double a = rng.uniform(-30.0, 30.0);
        const double b = rng.uniform(-30.0, 30.0);
        const double lo = std::min(a, b);
        const double hi = std::max(a, b);
        CHECK(model.cdf(lo) <= model.cdf(hi));
        CHECK(std::abs(model.cdf(-a) + model.cdf(a) - 1.0) <= 1e-12);
    }
}

TEST_CASE("degenerate model is the unit step") {
    const NoiseModel step = NoiseModel::degenerate();
    CHECK(step.cdf(-1e-12) == 0.0);
    CHECK(step.cdf(0.0) == 1.0);
    CHECK(step.cdf(1.0) == 1.0);
    Rng rng(5);
    CHECK(step.sample(rng) == 0.0);
}
