#include "eftqdi/presets.hpp"

#include "eftqdi/errors.hpp"

namespace eftqdi {

namespace {

// Four balanced digraphs on six nodes, each built from directed cycles with
// weight 2/5 on every edge, whose union is strongly connected:
//   graph 1: forward ring      1->2->3->4->5->6->1
//   graph 2: two 3-cycles      1->3->5->1 and 2->4->6->2
//   graph 3: reverse ring      1->6->5->4->3->2->1
//   graph 4: three 2-cycles    1<->4, 2<->5, 3<->6
// Every node has exactly one in-neighbor per graph and four in the union.
TopologyEnsemble default_ensemble() {
    constexpr int m = 6;
    constexpr double w = 0.4;
    TopologyEnsemble ens;

    Digraph g1(m);
    for (int i = 0; i < m; ++i) g1.add_edge(i, (i + 1) % m, w);
    ens.graphs.push_back(g1);

    Digraph g2(m);
    g2.add_edge(0, 2, w);
    g2.add_edge(2, 4, w);
    g2.add_edge(4, 0, w);
    g2.add_edge(1, 3, w);
    g2.add_edge(3, 5, w);
    g2.add_edge(5, 1, w);
    ens.graphs.push_back(g2);

    Digraph g3(m);
    for (int i = 0; i < m; ++i) g3.add_edge((i + 1) % m, i, w);
    ens.graphs.push_back(g3);

    Digraph g4(m);
    for (int i = 0; i < 3; ++i) {
        g4.add_edge(i, i + 3, w);
        g4.add_edge(i + 3, i, w);
    }
    ens.graphs.push_back(g4);

    ens.transition = Matrix(4, 4);
    ens.transition(0, 0) = 0.5;
    ens.transition(0, 1) = 0.5;
    ens.transition(1, 1) = 0.5;
    ens.transition(1, 2) = 0.5;
    ens.transition(2, 2) = 0.5;
    ens.transition(2, 3) = 0.5;
    ens.transition(3, 0) = 0.5;
    ens.transition(3, 3) = 0.5;
    ens.initial_dist.assign(4, 0.25);
    return ens;
}

}  // namespace

ExperimentConfig six_sensor_example(int case_id) {
    if (case_id != 1 && case_id != 2)
        throw ConfigInvalid("six_sensor_example: case must be 1 or 2");

    ExperimentConfig cfg;
    cfg.dimension = 3;
    cfg.node_count = 6;
    cfg.theta = {1.0, 1.0, -1.0};
    // Prior box chosen as the coordinate permutation that actually contains
    // theta; see README for the discussion.
    cfg.box_lower = {0.0, 0.0, -2.0};
    cfg.box_upper = {2.0, 2.0, 0.0};
    cfg.ensemble = default_ensemble();
    cfg.sensor_thresholds.assign(6, 1.0);
    cfg.measurement_noise_std = 8.0;
    cfg.channel_threshold = 0.0;
    cfg.channel_noise_std = 1.0;
    cfg.innovation_halfwidth = 0.1;
    cfg.regressor_initial_state = {1.3, 1.3, 1.3};

    // One dominant coordinate per node; the opposite trio carries flipped
    // signs so node pairs probe each axis in both directions.
    const double s = 5.0 / 6.0;
    cfg.regressor_nodes = {
        StateSpaceSpec{{1.0, 0.5, 0.5}, {1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}},
        StateSpaceSpec{{0.5, 1.0, 0.5}, {0.0, 1.0, 0.0}, {0.0, 1.0, 0.0}},
        StateSpaceSpec{{0.5, 0.5, 1.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}},
        StateSpaceSpec{{1.0, s, s}, {1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}},
        StateSpaceSpec{{s, 1.0, s}, {0.0, 1.0, 0.0}, {0.0, -1.0, 0.0}},
        StateSpaceSpec{{s, s, 1.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}},
    };
    // Declared envelope for the constants report. The dominant coordinate is
    // a bounded-increment random walk, so the realized maximum can drift past
    // this; the run report records the realized value and flags the excess.
    cfg.phi_bar = 20.0;
    cfg.enforce_phi_bar = false;

    cfg.encoder.schedule = "cyclic-basis";
    cfg.encoder.h_psi = 3;
    cfg.excitation_window = 2;

    if (case_id == 1) {
        cfg.beta = 39.0;
        cfg.gamma = 74.0;
        cfg.step_exponent = 1.0;
    } else {
        cfg.beta = 16.0;
        cfg.gamma = 65.0;
        cfg.step_exponent = 0.8;
    }

    cfg.horizon = 100000;
    cfg.reps = 100;
    cfg.seed = 412398217;
    cfg.baseline = true;
    cfg.rate_window_lo = 1000;
    cfg.rate_window_hi = cfg.horizon;
    cfg.initial_theta = {0.5, 0.5, 0.5};
    cfg.initial_neighbor_estimate = {0.5, 0.5, 0.5};
    return cfg;
}

}  // namespace eftqdi
