#include <doctest.h>

#include <cmath>

#include "eftqdi/encoding.hpp"
#include "eftqdi/errors.hpp"
#include "eftqdi/rng.hpp"

using namespace eftqdi;

TEST_CASE("cyclic basis schedule") {
    const auto enc = LinearEncoder::cyclic_basis(3);
    CHECK(enc.psi_at(1) == Vec{1.0, 0.0, 0.0});
    CHECK(enc.psi_at(2) == Vec{0.0, 1.0, 0.0});
    CHECK(enc.psi_at(3) == Vec{0.0, 0.0, 1.0});
    CHECK(enc.psi_at(4) == Vec{1.0, 0.0, 0.0});
    CHECK(enc.psi_bar() == doctest::Approx(1.0));

    const auto scalar = LinearEncoder::cyclic_basis(1);
    CHECK(scalar.psi_at(1) == Vec{1.0});
    CHECK(scalar.psi_at(12345) == Vec{1.0});
}

TEST_CASE("encoding is linear") {
    const auto enc = LinearEncoder::cyclic_basis(3);
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        Vec a(3), b(3);
        for (auto& v : a) v = rng.uniform(-5.0, 5.0);
        for (auto& v : b) v = rng.uniform(-5.0, 5.0);
        const double c = rng.uniform(-3.0, 3.0);
        const std::int64_t k = 1 + static_cast<std::int64_t>(rng.next_u64() % 50);
        Vec sum(3), scaled(3);
        for (int i = 0; i < 3; ++i) {
            sum[static_cast<std::size_t>(i)] =
                a[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(i)];
            scaled[static_cast<std::size_t>(i)] = c * a[static_cast<std::size_t>(i)];
        }
        CHECK(enc.encode(k, sum) ==
              doctest::Approx(enc.encode(k, a) + enc.encode(k, b)).epsilon(1e-12));
        CHECK(enc.encode(k, scaled) == doctest::Approx(c * enc.encode(k, a)).epsilon(1e-12));
    }
}

TEST_CASE("persistent excitation certificate") {
    const auto enc3 = LinearEncoder::cyclic_basis(3);
    SUBCASE("full-period window averages to I/n") {
        CHECK(std::abs(verify_pe(enc3, 3, 100) - 1.0 / 3.0) <= 1e-12);
    }
    SUBCASE("short window is rank deficient") {
        CHECK(verify_pe(enc3, 2, 100) == 0.0);
    }
    SUBCASE("scalar constant schedule") {
        const auto enc1 = LinearEncoder::explicit_schedule({{1.0}});
        CHECK(verify_pe(enc1, 1, 10) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("certificate lower-bounds every window in the horizon") {
        const double cert = verify_pe(enc3, 3, 1000);
        Rng rng(8);
        for (int trial = 0; trial < 100; ++trial) {
            const std::int64_t k = 1 + static_cast<std::int64_t>(rng.next_u64() % 998);
            Matrix gram(3, 3);
            for (int l = 0; l < 3; ++l) {
                const Vec& psi = enc3.psi_at(k + l);
                for (std::size_t r = 0; r < 3; ++r)
                    for (std::size_t c = 0; c < 3; ++c) gram(r, c) += psi[r] * psi[c] / 3.0;
            }
            CHECK(symmetric_eigenvalues(gram).front() >= cert - 1e-12);
        }
    }
}

TEST_CASE("explicit schedules validate their shape") {
    CHECK_THROWS_AS(LinearEncoder::explicit_schedule({}), EmptyInput);
    CHECK_THROWS_AS(LinearEncoder::explicit_schedule({{1.0, 0.0}, {1.0}}), DimensionMismatch);
    const auto enc = LinearEncoder::explicit_schedule({{0.5, 0.5}, {2.0, 0.0}});
    CHECK(enc.period() == 2);
    CHECK(enc.psi_bar() == doctest::Approx(2.0));
    CHECK(enc.psi_at(3) == Vec{0.5, 0.5});
    CHECK_THROWS_AS(enc.psi_at(0), NonPositiveInput);
}
