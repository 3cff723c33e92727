#include <doctest.h>

#include <cmath>

#include "eftqdi/analysis.hpp"
#include "eftqdi/errors.hpp"
#include "eftqdi/presets.hpp"

using namespace eftqdi;

namespace {

// Constants engineered so that sigma() evaluates to exactly 1 and everything
// else is 1; the mean-square gain threshold then reduces to (2 + 2 + 8/3)/2.
TheoryConstants all_ones_constants() {
    TheoryConstants tc;
    tc.h = 1;
    tc.c_h = 1.0;
    tc.f_lower = 1.0;
    tc.f_upper = 1.0;
    tc.g_lower = 1.0;
    tc.phi_bar = 1.0;
    tc.psi_bar = 1.0;
    tc.theta_bar = 1.0;
    tc.delta_phi_sq = 2.0;
    tc.delta_psi_sq = 1.0;
    tc.pi_min = 1.0;
    tc.lambda2_mirror = 2.0;  // sigma = 1*1*2*2 / (2*1*1 + 1*2) = 1
    tc.lambda_m = 1.0;
    tc.n_bar = 1;
    return tc;
}

TheoryConstants random_constants(Rng& rng) {
    TheoryConstants tc;
    tc.h = 1 + static_cast<int>(rng.next_u64() % 4);
    tc.c_h = rng.uniform(1.0, 3.0);
    tc.f_lower = rng.uniform(0.01, 0.5);
    tc.f_upper = tc.f_lower + rng.uniform(0.01, 0.5);
    tc.g_lower = rng.uniform(0.01, 0.5);
    tc.phi_bar = rng.uniform(0.5, 3.0);
    tc.psi_bar = 1.0;
    tc.theta_bar = rng.uniform(0.5, 3.0);
    tc.delta_phi_sq = rng.uniform(0.05, 2.0);
    tc.delta_psi_sq = rng.uniform(0.05, 1.0);
    tc.pi_min = rng.uniform(0.05, 1.0);
    tc.lambda2_mirror = rng.uniform(0.05, 2.0);
    tc.lambda_m = rng.uniform(0.1, 2.0);
    tc.n_bar = 1 + static_cast<int>(rng.next_u64() % 5);
    return tc;
}

}  // namespace

TEST_CASE("sigma constant") {
    CHECK(sigma_constant(1, 1.0, 1.0, 1.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    SUBCASE("linear in the excitation level") {
        const double base = sigma_constant(2, 0.3, 0.7, 0.5, 1.2);
        CHECK(sigma_constant(2, 0.3, 0.7, 1.5, 1.2) == doctest::Approx(3.0 * base).epsilon(1e-12));
    }
    SUBCASE("large connectivity limit") {
        const double sigma = sigma_constant(2, 0.4, 1e9, 0.7, 1.5);
        CHECK(sigma == doctest::Approx(0.4 * 0.7).epsilon(1e-6));
    }
    SUBCASE("monotone in excitation and density floor") {
        Rng rng(55);
        for (int trial = 0; trial < 50; ++trial) {
            const double f = rng.uniform(0.01, 1.0);
            const double d = rng.uniform(0.01, 1.0);
            const double s0 = sigma_constant(2, f, 0.5, d, 1.0);
            CHECK(sigma_constant(2, f, 0.5, d + 0.1, 1.0) >= s0);
            CHECK(sigma_constant(2, f + 0.1, 0.5, d, 1.0) >= s0);
        }
    }
    CHECK_THROWS_AS(sigma_constant(1, 0.0, 1.0, 1.0, 1.0), NonPositiveInput);
}

TEST_CASE("c_h constant") {
    CHECK(c_h_constant(StepSchedule(1.0, 2)) == 2.0);
    CHECK(c_h_constant(StepSchedule(0.8, 1)) == 1.0);
    CHECK(c_h_constant(StepSchedule(0.8, 2)) == doctest::Approx(std::pow(2.0, 0.8)).epsilon(1e-15));
}

TEST_CASE("mean-square gain threshold") {
    const TheoryConstants tc = all_ones_constants();
    CHECK(tc.sigma() == 1.0);
    CHECK(gamma_threshold_thm1(1.0, tc) == doctest::Approx(10.0 / 3.0).epsilon(1e-15));
    SUBCASE("linear in beta") {
        Rng rng(66);
        for (int trial = 0; trial < 20; ++trial) {
            const TheoryConstants rc = random_constants(rng);
            const double beta = rng.uniform(0.5, 5.0);
            const double t1 = gamma_threshold_thm1(beta, rc);
            CHECK(t1 > 0.0);
            CHECK(gamma_threshold_thm1(2.0 * beta, rc) == doctest::Approx(2.0 * t1).epsilon(1e-12));
        }
    }
}

TEST_CASE("2x2 lambda_min") {
    CHECK(lambda_min_2x2(2.0, 0.0, 2.0) == doctest::Approx(2.0));
    CHECK(lambda_min_2x2(3.0, 1.0, 1.0) ==
          doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
    SUBCASE("bounded by min(w1, w3), positive iff w1 > 0 and det > 0") {
        Rng rng(77);
        for (int trial = 0; trial < 200; ++trial) {
            const double w1 = rng.uniform(-3.0, 3.0);
            const double w2 = rng.uniform(-3.0, 3.0);
            const double w3 = rng.uniform(-3.0, 3.0);
            const double lm = lambda_min_2x2(w1, w2, w3);
            CHECK(lm <= std::min(w1, w3) + 1e-12);
            const bool positive = w1 > 0.0 && w1 * w3 - w2 * w2 > 0.0;
            if (positive)
                CHECK(lm > 0.0);
            else
                CHECK(lm <= 1e-12);
        }
    }
}

TEST_CASE("gain certificate") {
    SUBCASE("gamma above the threshold certifies mean-square convergence") {
        Rng rng(88);
        for (int trial = 0; trial < 100; ++trial) {
            const TheoryConstants tc = random_constants(rng);
            const double beta = rng.uniform(0.5, 5.0);
            const double threshold = gamma_threshold_thm1(beta, tc);
            const auto cert = gain_certificate_thm2(beta, threshold * 1.01, tc);
            CHECK(cert.satisfies_thm1);
            const auto below = gain_certificate_thm2(beta, threshold * 0.5, tc);
            CHECK_FALSE(below.satisfies_thm1);
        }
    }
    SUBCASE("w entries follow the construction") {
        const TheoryConstants tc = all_ones_constants();
        const auto cert = gain_certificate_thm2(1.0, 10.0, tc);
        CHECK(cert.w1 == doctest::Approx(2.0 * 10.0 - (1.0 + 2.0 + 1.0)).epsilon(1e-12));
        CHECK(cert.w2 == doctest::Approx(-2.0).epsilon(1e-12));
        CHECK(cert.w3 == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(cert.lambda_min_w ==
              doctest::Approx(lambda_min_2x2(cert.w1, cert.w2, cert.w3)));
    }
}

TEST_CASE("stacked error vector") {
    auto cfg = six_sensor_example(1);
    cfg.horizon = 10;
    SUBCASE("two mutual scalar nodes in node-major order") {
        NetworkInit init{1,
                         2,
                         Vec{0.0},
                         ProjectionBox({-2.0}, {2.0}),
                         TopologyEnsemble{},
                         Vec{0.0, 0.0},
                         NoiseModel::gaussian(1.0),
                         0.0,
                         NoiseModel::gaussian(1.0),
                         {},
                         LinearEncoder::cyclic_basis(1),
                         GainConfig{1.0, 1.0, StepSchedule(1.0, 1)},
                         Vec{0.0},
                         Vec{0.0}};
        init.regressors.push_back(RegressorGenerator::scripted({{1.0}}));
        init.regressors.push_back(RegressorGenerator::scripted({{1.0}}));
        Digraph g(2);
        g.add_edge(0, 1, 0.4);
        g.add_edge(1, 0, 0.4);
        init.ensemble.graphs.push_back(g);
        init.ensemble.transition = Matrix(1, 1);
        init.ensemble.transition(0, 0) = 1.0;
        init.ensemble.initial_dist = {1.0};

        Network net(init, 1, 0, RunMode::cooperative);
        net.set_node_theta(0, Vec{0.5});
        net.set_node_theta(1, Vec{0.2});
        net.set_neighbor_estimate(0, 1, Vec{0.7});   // est - theta_1 = 0.5
        net.set_neighbor_estimate(1, 0, Vec{0.25});  // est - theta_0 = -0.25
        const Vec eps = stack_error_vector(net);
        REQUIRE(eps.size() == 2);
        CHECK(eps[0] == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(eps[1] == doctest::Approx(-0.25).epsilon(1e-14));
    }
    SUBCASE("agreement gives the zero vector") {
        NetworkInit init = cfg.make_network_init();
        init.initial_theta = cfg.theta;
        init.initial_estimate = cfg.theta;
        Network net(init, 3, 0, RunMode::cooperative);
        for (double v : stack_error_vector(net)) CHECK(v == 0.0);
    }
    SUBCASE("squared norm equals the edge telemetry total") {
        Network net(cfg.make_network_init(), cfg.seed, 0, RunMode::cooperative);
        for (int k = 0; k < 10; ++k) {
            const StepTelemetry& t = net.step();
            CHECK(norm_sq(stack_error_vector(net)) ==
                  doctest::Approx(t.ene_total()).epsilon(1e-12));
        }
    }
}

TEST_CASE("lyapunov trace aggregation") {
    SUBCASE("single rep is the identity") {
        RepTrace rep{{1.0, 0.5}, {2.0, 1.0}};
        const auto trace = lyapunov_traces({rep});
        CHECK(trace.v == rep.fe);
        CHECK(trace.u == rep.ene);
        CHECK(trace.rep_count == 1);
    }
    SUBCASE("two reps average") {
        RepTrace a{{1.0}, {3.0}};
        RepTrace b{{3.0}, {1.0}};
        const auto trace = lyapunov_traces({a, b});
        CHECK(trace.v[0] == doctest::Approx(2.0));
        CHECK(trace.u[0] == doctest::Approx(2.0));
    }
    CHECK_THROWS_AS(lyapunov_traces({}), EmptyInput);
}

TEST_CASE("rate fit") {
    SUBCASE("exact power laws") {
        Vec inv_k, pow45;
        for (int k = 1; k <= 2000; ++k) {
            inv_k.push_back(1.0 / k);
            pow45.push_back(7.0 * std::pow(static_cast<double>(k), -0.8));
        }
        const RateFit f1 = rate_fit(inv_k, 10, 2000);
        CHECK(std::abs(f1.slope + 1.0) <= 1e-10);
        CHECK(f1.r_squared >= 1.0 - 1e-12);
        const RateFit f2 = rate_fit(pow45, 1, 2000);
        CHECK(std::abs(f2.slope + 0.8) <= 1e-10);
        CHECK(std::abs(f2.intercept - std::log(7.0)) <= 1e-10);
    }
    SUBCASE("non-positive entries are skipped; all-zero windows throw") {
        Vec trace{1.0, 0.0, 1.0 / 9.0, 0.0625};  // k^-2 with a zero at k = 2
        const RateFit fit = rate_fit(trace, 1, 4);
        CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-10));
        CHECK_THROWS_AS(rate_fit(Vec{0.0, 0.0, 0.0}, 1, 3), NonPositiveTrace);
    }
    SUBCASE("window validation") {
        CHECK_THROWS_AS(rate_fit(Vec{1.0, 0.5}, 2, 2), DimensionMismatch);
        CHECK_THROWS_AS(rate_fit(Vec{1.0, 0.5}, 1, 3), DimensionMismatch);
    }
}
