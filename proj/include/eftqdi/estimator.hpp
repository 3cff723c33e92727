// The estimation-fusion recursion itself. Each tick every node first refines
// its estimates of neighboring estimates from the one-bit channel data, then
// fuses its own binary measurement innovation with a consensus term over the
// currently active graph. Both updates are projected onto the prior box.
//
// Update order within a tick is fixed: all randomness (topology state,
// regressors, measurement noise, channel noise) is drawn first, then every
// neighbor-estimate update and every fusion update is computed from the
// previous tick's state before anything commits. The fusion step consumes the
// previous neighbor estimates, not the ones produced earlier in the same tick.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eftqdi/encoding.hpp"
#include "eftqdi/graph.hpp"
#include "eftqdi/linalg.hpp"
#include "eftqdi/rng.hpp"
#include "eftqdi/signal.hpp"

namespace eftqdi {

// Axis-aligned prior box; the projection is the componentwise clamp.
class ProjectionBox {
public:
    ProjectionBox(Vec lower, Vec upper);

    std::size_t dimension() const { return lower_.size(); }
    const Vec& lower() const { return lower_; }
    const Vec& upper() const { return upper_; }

    // sup norm over the box = norm of the componentwise max-magnitude corner.
    double theta_bar() const { return theta_bar_; }

    Vec center() const;
    bool contains(std::span<const double> x, double tol = 0.0) const;
    void project_in_place(std::span<double> x) const;

private:
    Vec lower_, upper_;
    double theta_bar_ = 0.0;
};

Vec project_box(std::span<const double> x, const ProjectionBox& box);

// Polynomial step sizes b_k = k^-p with p in (1/2, 1]; carries the regressor
// window h so c_h can be derived. Throws InvalidExponent.
class StepSchedule {
public:
    StepSchedule(double exponent, int window);

    double at(std::int64_t k) const;
    double exponent() const { return exponent_; }
    int window() const { return window_; }

private:
    double exponent_ = 1.0;
    int window_ = 1;
};

struct GainConfig {
    double beta = 1.0;
    double gamma = 1.0;
    StepSchedule schedule;
};

// Refines the estimate of a neighboring estimate from one channel bit.
// Active:   proj(prev + gamma b_k psi (G(C - psi'prev) - z)).
// Inactive: prev, bit-identical (hold rule).
Vec estimation_update(std::span<const double> prev, std::span<const double> psi, int z,
                      const NoiseModel& channel_noise, double channel_threshold, double gamma,
                      double b_k, bool active, const ProjectionBox& box);

struct NeighborTerm {
    double weight = 0.0;
    std::span<const double> estimate;
};

// Fusion: proj(prev + beta b_k (phi (F(C - phi'prev) - s) +
//                sum_j a_j (est_j - prev))).
Vec fusion_update(std::span<const double> prev, std::span<const double> phi, int s,
                  const NoiseModel& measurement_noise, double sensor_threshold,
                  std::span<const NeighborTerm> neighbors, double beta, double b_k,
                  const ProjectionBox& box);

// One sensor's state: fusion estimate plus the per-neighbor estimates, keyed
// by the union-graph in-neighbor set (fixed, ascending sender id).
struct NodeState {
    Vec theta;
    std::vector<int> neighbor_ids;
    std::vector<Vec> neighbor_est;
};

// Directed union edge sender -> receiver, in node-major (receiver, then
// ascending sender) order; ordinal indexes telemetry and channel streams,
// local is the position within the receiver's neighbor list.
struct UnionEdge {
    int receiver = 0;
    int sender = 0;
    int ordinal = 0;
    int local = 0;
};

struct StepTelemetry {
    std::int64_t k = 0;
    int active_graph = -1;  // -1 when topology is unused (baseline mode)
    std::vector<double> node_sq_error;  // per node, |theta_i - theta|^2
    std::vector<double> edge_sq_error;  // per union edge, |est_ij - theta_j|^2

    double fe_total() const;
    double ene_total() const;
};

enum class RunMode {
    cooperative,     // full recursion: channels, neighbor estimates, consensus
    noncooperative,  // innovation-only baseline, no communication machinery
};

// Everything needed to build one network instance. Plain data so the harness
// can assemble it from a parsed configuration.
struct NetworkInit {
    int dimension = 0;
    int node_count = 0;
    Vec true_theta;
    ProjectionBox box;
    TopologyEnsemble ensemble;
    Vec sensor_thresholds;  // length m
    NoiseModel measurement_noise;
    double channel_threshold = 0.0;
    NoiseModel channel_noise;
    std::vector<RegressorGenerator> regressors;  // length m
    LinearEncoder encoder;
    GainConfig gains;
    Vec initial_theta;     // shared across nodes
    Vec initial_estimate;  // shared across edges
};

// A synchronized network of binary sensors running the recursion. Single
// owner, strictly sequential in k; independent instances (one per Monte Carlo
// repetition) may run on distinct threads.
class Network {
public:
    Network(NetworkInit init, std::uint64_t master_seed, std::uint64_t rep, RunMode mode);

    // Runs one synchronized tick and returns its telemetry (valid until the
    // next step call).
    const StepTelemetry& step();

    std::int64_t clock() const { return clock_; }
    RunMode mode() const { return mode_; }
    int node_count() const { return init_.node_count; }
    int dimension() const { return init_.dimension; }

    const NodeState& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const std::vector<UnionEdge>& union_edges() const { return edges_; }
    const ProjectionBox& box() const { return init_.box; }
    const Vec& true_theta() const { return init_.true_theta; }

    // State overrides (warm starts and fixtures); dimensions must match.
    void set_node_theta(int i, Vec theta);
    void set_neighbor_estimate(int receiver, int sender, Vec estimate);

    double realized_phi_max() const;

private:
    void step_cooperative();
    void step_noncooperative();
    void record_telemetry(int active_graph);

    NetworkInit init_;
    RunMode mode_;
    std::int64_t clock_ = 0;

    std::vector<NodeState> nodes_;
    std::vector<UnionEdge> edges_;
    std::vector<std::vector<int>> edge_ordinal_;  // [receiver][local neighbor index]

    std::optional<MarkovSwitcher> switcher_;
    std::vector<Rng> regressor_rng_;
    std::vector<Rng> measurement_rng_;
    std::vector<Rng> channel_rng_;  // per union edge ordinal

    // Per-tick scratch, allocated once.
    std::vector<Vec> phi_;
    std::vector<int> s_bits_;
    std::vector<int> z_bits_;
    std::vector<char> edge_active_;
    std::vector<Vec> next_theta_;
    std::vector<Vec> next_est_;    // per edge ordinal
    std::vector<NeighborTerm> neighbor_scratch_;
    StepTelemetry telemetry_;
};

// b_k for the schedule; k >= 1.
double step_size(const StepSchedule& schedule, std::int64_t k);

}  // namespace eftqdi
