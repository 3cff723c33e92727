#include <doctest.h>

#include <cmath>

#include "eftqdi/analysis.hpp"
#include "eftqdi/errors.hpp"
#include "eftqdi/estimator.hpp"
#include "eftqdi/gaussian.hpp"
#include "eftqdi/presets.hpp"

using namespace eftqdi;

namespace {

// Random small network with scripted (hence certified-bounded) regressors,
// random cycle-built ensemble, and in-box initial values.
struct RandomNet {
    NetworkInit init;
    double phi_bound = 0.0;
    std::uint64_t seed = 0;
};

RandomNet make_random_net(Rng& rng) {
    const int m = 2 + static_cast<int>(rng.next_u64() % 4);
    const int n = 1 + static_cast<int>(rng.next_u64() % 3);
    const auto nu = static_cast<std::size_t>(n);

    Vec lower(nu), upper(nu), theta(nu);
    for (std::size_t c = 0; c < nu; ++c) {
        lower[c] = rng.uniform(-2.0, -0.1);
        upper[c] = rng.uniform(0.1, 2.0);
        theta[c] = rng.uniform(lower[c], upper[c]);
    }
    ProjectionBox box(lower, upper);

    TopologyEnsemble ens;
    const int graphs = 1 + static_cast<int>(rng.next_u64() % 3);
    for (int g = 0; g < graphs; ++g) {
        Digraph d(m);
        const int offset = 1 + static_cast<int>(rng.next_u64() % std::max(1, m - 1));
        const double w = rng.uniform(0.1, 0.9);
        for (int i = 0; i < m; ++i)
            if (!d.has_edge(i, (i + offset) % m)) d.add_edge(i, (i + offset) % m, w);
        ens.graphs.push_back(std::move(d));
    }
    const auto s = static_cast<std::size_t>(graphs);
    ens.transition = Matrix(s, s, 1.0 / static_cast<double>(graphs));
    ens.initial_dist.assign(s, 1.0 / static_cast<double>(graphs));

    double phi_bound = 0.0;
    std::vector<RegressorGenerator> regressors;
    for (int i = 0; i < m; ++i) {
        std::vector<Vec> script;
        const int period = 1 + static_cast<int>(rng.next_u64() % 4);
        for (int p = 0; p < period; ++p) {
            Vec v(nu);
            for (auto& x : v) x = rng.uniform(-2.0, 2.0);
            phi_bound = std::max(phi_bound, norm(v));
            script.push_back(std::move(v));
        }
        regressors.push_back(RegressorGenerator::scripted(std::move(script)));
    }

    Vec thresholds(static_cast<std::size_t>(m));
    for (auto& t : thresholds) t = rng.uniform(-1.0, 1.0);

    Vec init_theta(nu), init_est(nu);
    for (std::size_t c = 0; c < nu; ++c) {
        init_theta[c] = rng.uniform(lower[c], upper[c]);
        init_est[c] = rng.uniform(lower[c], upper[c]);
    }

    RandomNet net{NetworkInit{n,
                              m,
                              theta,
                              box,
                              ens,
                              thresholds,
                              NoiseModel::gaussian(rng.uniform(0.5, 4.0)),
                              rng.uniform(-0.5, 0.5),
                              NoiseModel::gaussian(rng.uniform(0.5, 2.0)),
                              std::move(regressors),
                              LinearEncoder::cyclic_basis(n),
                              GainConfig{rng.uniform(0.5, 5.0), rng.uniform(0.5, 5.0),
                                         StepSchedule(rng.uniform01() < 0.5 ? 1.0 : 0.8, 2)},
                              init_theta,
                              init_est},
                  phi_bound, rng.next_u64()};
    return net;
}

}  // namespace

TEST_CASE("box projection") {
    const ProjectionBox box({0.0, 0.0, -2.0}, {2.0, 2.0, 0.0});
    SUBCASE("interior points are fixed") {
        const Vec x{1.0, 0.5, -1.0};
        CHECK(project_box(x, box) == x);
        CHECK(project_box(project_box(Vec{5.0, 5.0, 5.0}, box), box) ==
              project_box(Vec{5.0, 5.0, 5.0}, box));
    }
    SUBCASE("componentwise clamp") {
        CHECK(project_box(Vec{3.0, -3.0, 0.5}, box) == Vec{2.0, 0.0, 0.0});
    }
    SUBCASE("non-expansive toward box points") {
        Rng rng(31);
        for (int trial = 0; trial < 1000; ++trial) {
            Vec x(3), target(3);
            for (std::size_t c = 0; c < 3; ++c) {
                x[c] = rng.uniform(-6.0, 6.0);
                target[c] = rng.uniform(box.lower()[c], box.upper()[c]);
            }
            const Vec projected = project_box(x, box);
            Vec d1(3), d2(3);
            for (std::size_t c = 0; c < 3; ++c) {
                d1[c] = projected[c] - target[c];
                d2[c] = x[c] - target[c];
            }
            CHECK(norm(d1) <= norm(d2) + 1e-12);
        }
    }
    SUBCASE("theta_bar is the largest corner norm") {
        CHECK(box.theta_bar() == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-14));
    }
    SUBCASE("degenerate bounds are rejected") {
        CHECK_THROWS_AS(ProjectionBox({0.0}, {0.0}), ConfigInvalid);
    }
}

TEST_CASE("step schedule") {
    CHECK(StepSchedule(1.0, 2).at(10) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(StepSchedule(0.8, 2).at(1) == 1.0);
    CHECK(StepSchedule(0.8, 2).at(32) == doctest::Approx(0.0625).epsilon(1e-14));
    CHECK_THROWS_AS(StepSchedule(0.5, 2), InvalidExponent);
    CHECK_THROWS_AS(StepSchedule(1.1, 2), InvalidExponent);
    CHECK_THROWS_AS(StepSchedule(1.0, 2).at(0), NonPositiveInput);
}

TEST_CASE("estimation update") {
    const ProjectionBox box({0.0}, {2.0});
    const NoiseModel unit = NoiseModel::gaussian(1.0);
    SUBCASE("inactive edge holds bit-identically") {
        const Vec prev{1.2345678901234567};
        const Vec out = estimation_update(prev, Vec{1.0}, 1, unit, 0.0, 3.0, 0.5, false, box);
        CHECK(out[0] == prev[0]);
    }
    SUBCASE("zero innovation is a fixed point modulo projection") {
        // Degenerate channel: prediction equals the bit exactly.
        const NoiseModel step = NoiseModel::degenerate();
        const Vec prev{1.5};
        // encoded = 1.5 > 0 = threshold, so z = 0 and G(0 - 1.5) = 0.
        const Vec out = estimation_update(prev, Vec{1.0}, 0, step, 0.0, 3.0, 0.5, true, box);
        CHECK(out[0] == prev[0]);
    }
    SUBCASE("hand-evaluated Gaussian step") {
        // G = Phi(0 - 1) = 0.158655..., z = 1, gamma b = 0.1.
        const Vec out = estimation_update(Vec{1.0}, Vec{1.0}, 1, unit, 0.0, 1.0, 0.1, true, box);
        CHECK(out[0] == doctest::Approx(0.9158655254).epsilon(1e-6));
    }
}

TEST_CASE("fusion update") {
    const ProjectionBox box({0.0}, {2.0});
    SUBCASE("no neighbors, zero innovation") {
        const NoiseModel step = NoiseModel::degenerate();
        // phi'theta = 1.5 > 1 = threshold: s = 0 and F(1 - 1.5) = 0.
        const Vec out = fusion_update(Vec{1.5}, Vec{1.0}, 0, step, 1.0, {}, 2.0, 0.5, box);
        CHECK(out[0] == 1.5);
    }
    SUBCASE("pure consensus term") {
        const ProjectionBox box3({0.0, 0.0, 0.0}, {2.0, 2.0, 2.0});
        const NoiseModel step = NoiseModel::degenerate();
        const Vec prev{1.0, 1.0, 1.0};
        const Vec est{2.0, 1.0, 1.0};  // est - prev = e1
        const NeighborTerm term{0.4, est};
        // phi = 0 makes the innovation term vanish regardless of the bit.
        const Vec out = fusion_update(prev, Vec{0.0, 0.0, 0.0}, 1, step, 1.0, {&term, 1}, 1.0,
                                      0.1, box3);
        CHECK(out[0] == doctest::Approx(1.04).epsilon(1e-14));
        CHECK(out[1] == doctest::Approx(1.0));
        CHECK(out[2] == doctest::Approx(1.0));
    }
    SUBCASE("hand-evaluated Gaussian step") {
        const NoiseModel meas = NoiseModel::gaussian(8.0);
        // F = Phi((1 - 1)/8) = 0.5, s = 0, beta b = 0.2.
        const Vec out = fusion_update(Vec{1.0}, Vec{1.0}, 0, meas, 1.0, {}, 1.0, 0.2, box);
        CHECK(out[0] == doctest::Approx(1.1).epsilon(1e-12));
    }
}

TEST_CASE("network fixed point under noise-free agreement") {
    // All estimates start at the truth with degenerate noise: every innovation
    // and consensus difference vanishes, so the state never moves.
    auto cfg = six_sensor_example(1);
    NetworkInit init = cfg.make_network_init();
    init.measurement_noise = NoiseModel::degenerate();
    init.channel_noise = NoiseModel::degenerate();
    init.initial_theta = cfg.theta;
    init.initial_estimate = cfg.theta;
    Network net(init, 555, 0, RunMode::cooperative);
    for (int tick = 0; tick < 20; ++tick) {
        const StepTelemetry& t = net.step();
        CHECK(t.fe_total() == 0.0);
        CHECK(t.ene_total() == 0.0);
    }
    for (int i = 0; i < 6; ++i)
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(net.node(i).theta[c] == cfg.theta[c]);
}

TEST_CASE("per-tick invariants on random networks") {
    Rng rng(2026);
    int checked_holds = 0;
    for (int trial = 0; trial < 30; ++trial) {
        RandomNet spec = make_random_net(rng);
        Network net(spec.init, spec.seed, 0, RunMode::cooperative);
        const double beta = spec.init.gains.beta;
        const double gamma = spec.init.gains.gamma;
        const double theta_bar = spec.init.box.theta_bar();
        const double psi_bar = spec.init.encoder.psi_bar();

        std::vector<Vec> prev_theta;
        std::vector<std::vector<Vec>> prev_est;
        for (int i = 0; i < net.node_count(); ++i) {
            prev_theta.push_back(net.node(i).theta);
            prev_est.push_back(net.node(i).neighbor_est);
        }

        for (std::int64_t k = 1; k <= 40; ++k) {
            const StepTelemetry& t = net.step();
            const double b_k = spec.init.gains.schedule.at(k);
            const Digraph& active =
                spec.init.ensemble.graphs[static_cast<std::size_t>(t.active_graph)];

            for (int i = 0; i < net.node_count(); ++i) {
                const auto iu = static_cast<std::size_t>(i);
                const auto& node = net.node(i);
                // containment
                CHECK(spec.init.box.contains(node.theta, 1e-12));
                // fusion increment bound
                Vec diff(node.theta.size());
                for (std::size_t c = 0; c < diff.size(); ++c)
                    diff[c] = node.theta[c] - prev_theta[iu][c];
                const double n_i = static_cast<double>(node.neighbor_ids.size());
                CHECK(norm(diff) <=
                      beta * (spec.phi_bound + 2.0 * n_i * theta_bar) * b_k + 1e-12);
                prev_theta[iu] = node.theta;

                for (std::size_t local = 0; local < node.neighbor_ids.size(); ++local) {
                    const Vec& est = node.neighbor_est[local];
                    CHECK(spec.init.box.contains(est, 1e-12));
                    const bool active_edge =
                        active.weight(i, node.neighbor_ids[local]) > 0.0;
                    if (active_edge) {
                        Vec ediff(est.size());
                        for (std::size_t c = 0; c < est.size(); ++c)
                            ediff[c] = est[c] - prev_est[iu][local][c];
                        CHECK(norm(ediff) <= gamma * psi_bar * b_k + 1e-12);
                    } else {
                        // hold rule: bit-identical
                        ++checked_holds;
                        for (std::size_t c = 0; c < est.size(); ++c)
                            CHECK(est[c] == prev_est[iu][local][c]);
                    }
                    prev_est[iu][local] = est;
                }
            }
        }
    }
    CHECK(checked_holds > 0);
}

TEST_CASE("identical seeds give identical telemetry") {
    Rng rng(4096);
    RandomNet spec = make_random_net(rng);
    Network a(spec.init, spec.seed, 3, RunMode::cooperative);
    Network b(spec.init, spec.seed, 3, RunMode::cooperative);
    for (int k = 0; k < 50; ++k) {
        const StepTelemetry& ta = a.step();
        const StepTelemetry& tb = b.step();
        CHECK(ta.active_graph == tb.active_graph);
        CHECK(ta.fe_total() == tb.fe_total());
        CHECK(ta.ene_total() == tb.ene_total());
    }
}

TEST_CASE("noncooperative step is fusion with no neighbors") {
    auto cfg = six_sensor_example(1);
    cfg.horizon = 25;
    const NetworkInit init = cfg.make_network_init();
    Network base(init, cfg.seed, 7, RunMode::noncooperative);

    // Replicate by hand with the same streams and the public update op.
    std::vector<Rng> reg, meas;
    for (int i = 0; i < 6; ++i) {
        reg.push_back(make_stream(cfg.seed, 7, StreamRole::regressor,
                                  static_cast<std::uint64_t>(i)));
        meas.push_back(make_stream(cfg.seed, 7, StreamRole::measurement,
                                   static_cast<std::uint64_t>(i)));
    }
    auto gens = cfg.make_regressors();
    const ProjectionBox box = cfg.make_box();
    std::vector<Vec> theta(6, init.initial_theta);
    const NoiseModel noise = NoiseModel::gaussian(cfg.measurement_noise_std);

    for (std::int64_t k = 1; k <= 25; ++k) {
        base.step();
        const double b_k = init.gains.schedule.at(k);
        for (int i = 0; i < 6; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            const Vec phi = gens[iu].next(reg[iu]);
            const double d = noise.sample(meas[iu]);
            const int s = dot(phi, cfg.theta) + d <= cfg.sensor_thresholds[iu] ? 1 : 0;
            theta[iu] = fusion_update(theta[iu], phi, s, noise, cfg.sensor_thresholds[iu], {},
                                      cfg.beta, b_k, box);
        }
    }
    for (int i = 0; i < 6; ++i)
        for (std::size_t c = 0; c < 3; ++c) CHECK(base.node(i).theta[c] == theta[i][c]);
}

TEST_CASE("noncooperative scalar node with full excitation converges") {
    NetworkInit init{1,
                     1,
                     Vec{0.5},
                     ProjectionBox({0.0}, {1.0}),
                     TopologyEnsemble{},
                     Vec{0.0},
                     NoiseModel::gaussian(1.0),
                     0.0,
                     NoiseModel::gaussian(1.0),
                     {},
                     LinearEncoder::cyclic_basis(1),
                     GainConfig{4.0, 1.0, StepSchedule(1.0, 1)},
                     Vec{0.95},
                     Vec{0.95}};
    init.regressors.push_back(RegressorGenerator::scripted({{1.0}}));
    Digraph self(1);
    init.ensemble.graphs.push_back(self);
    init.ensemble.transition = Matrix(1, 1);
    init.ensemble.transition(0, 0) = 1.0;
    init.ensemble.initial_dist = {1.0};

    Network net(init, 21, 0, RunMode::noncooperative);
    double last = 0.0;
    for (int k = 0; k < 20000; ++k) last = net.step().fe_total();
    CHECK(last < 0.02);  // initial squared error is 0.2025
}
