#include "eftqdi/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "eftqdi/errors.hpp"

namespace eftqdi {

ProjectionBox::ProjectionBox(Vec lower, Vec upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size() || lower_.empty())
        throw DimensionMismatch("ProjectionBox: bounds must share a nonzero dimension");
    double acc = 0.0;
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (!(lower_[i] < upper_[i]))
            throw ConfigInvalid("ProjectionBox: lower must be strictly below upper");
        const double corner = std::max(std::abs(lower_[i]), std::abs(upper_[i]));
        acc += corner * corner;
    }
    theta_bar_ = std::sqrt(acc);
}

Vec ProjectionBox::center() const {
    Vec c(lower_.size());
    for (std::size_t i = 0; i < lower_.size(); ++i) c[i] = 0.5 * (lower_[i] + upper_[i]);
    return c;
}

bool ProjectionBox::contains(std::span<const double> x, double tol) const {
    if (x.size() != lower_.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
    return true;
}

void ProjectionBox::project_in_place(std::span<double> x) const {
    if (x.size() != lower_.size())
        throw DimensionMismatch("ProjectionBox: vector dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower_[i], upper_[i]);
}

Vec project_box(std::span<const double> x, const ProjectionBox& box) {
    Vec out(x.begin(), x.end());
    box.project_in_place(out);
    return out;
}

StepSchedule::StepSchedule(double exponent, int window) : exponent_(exponent), window_(window) {
    if (!(exponent > 0.5) || !(exponent <= 1.0))
        throw InvalidExponent("StepSchedule: exponent must lie in (1/2, 1]");
    if (window < 1) throw NonPositiveInput("StepSchedule: window must be >= 1");
}

double StepSchedule::at(std::int64_t k) const {
    if (k < 1) throw NonPositiveInput("StepSchedule: k must be >= 1");
    return std::pow(static_cast<double>(k), -exponent_);
}

double step_size(const StepSchedule& schedule, std::int64_t k) { return schedule.at(k); }

Vec estimation_update(std::span<const double> prev, std::span<const double> psi, int z,
                      const NoiseModel& channel_noise, double channel_threshold, double gamma,
                      double b_k, bool active, const ProjectionBox& box) {
    Vec out(prev.begin(), prev.end());
    if (!active) return out;  // hold rule: inactive edges stay bit-identical
    if (psi.size() != prev.size())
        throw DimensionMismatch("estimation_update: psi dimension mismatch");
    const double predicted = channel_noise.cdf(channel_threshold - dot(psi, prev));
    const double innovation = predicted - static_cast<double>(z);
    const double gain = gamma * b_k * innovation;
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += gain * psi[c];
    box.project_in_place(out);
    return out;
}

Vec fusion_update(std::span<const double> prev, std::span<const double> phi, int s,
                  const NoiseModel& measurement_noise, double sensor_threshold,
                  std::span<const NeighborTerm> neighbors, double beta, double b_k,
                  const ProjectionBox& box) {
    if (phi.size() != prev.size())
        throw DimensionMismatch("fusion_update: phi dimension mismatch");
    Vec out(prev.begin(), prev.end());
    const double predicted = measurement_noise.cdf(sensor_threshold - dot(phi, prev));
    const double innovation = predicted - static_cast<double>(s);
    const double gain = beta * b_k;
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += gain * innovation * phi[c];
    for (const NeighborTerm& term : neighbors) {
        if (term.estimate.size() != prev.size())
            throw DimensionMismatch("fusion_update: neighbor estimate dimension mismatch");
        for (std::size_t c = 0; c < out.size(); ++c)
            out[c] += gain * term.weight * (term.estimate[c] - prev[c]);
    }
    box.project_in_place(out);
    return out;
}

double StepTelemetry::fe_total() const {
    double acc = 0.0;
    for (double v : node_sq_error) acc += v;
    return acc;
}

double StepTelemetry::ene_total() const {
    double acc = 0.0;
    for (double v : edge_sq_error) acc += v;
    return acc;
}

Network::Network(NetworkInit init, std::uint64_t master_seed, std::uint64_t rep, RunMode mode)
    : init_(std::move(init)), mode_(mode) {
    const int m = init_.node_count;
    const auto n = static_cast<std::size_t>(init_.dimension);
    if (m <= 0) throw DimensionMismatch("Network: node_count must be positive");
    if (init_.true_theta.size() != n || init_.box.dimension() != n ||
        init_.initial_theta.size() != n || init_.initial_estimate.size() != n)
        throw DimensionMismatch("Network: dimension fields disagree");
    if (init_.sensor_thresholds.size() != static_cast<std::size_t>(m))
        throw DimensionMismatch("Network: one sensor threshold per node required");
    if (init_.regressors.size() != static_cast<std::size_t>(m))
        throw DimensionMismatch("Network: one regressor generator per node required");
    for (const auto& g : init_.regressors)
        if (g.dimension() != init_.dimension)
            throw DimensionMismatch("Network: regressor dimension mismatch");
    if (init_.encoder.dimension() != init_.dimension)
        throw DimensionMismatch("Network: encoder dimension mismatch");
    if (init_.ensemble.node_count() != m)
        throw DimensionMismatch("Network: ensemble node count mismatch");

    // Fixed union neighbor structure; ordinals are node-major.
    const Digraph membership = [&] {
        Digraph d(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (i == j) continue;
                for (const auto& g : init_.ensemble.graphs)
                    if (g.weight(i, j) > 0.0) {
                        d.add_edge(j, i, 0.5);
                        break;
                    }
            }
        return d;
    }();

    nodes_.resize(static_cast<std::size_t>(m));
    edge_ordinal_.resize(static_cast<std::size_t>(m));
    int ordinal = 0;
    for (int i = 0; i < m; ++i) {
        auto& node = nodes_[static_cast<std::size_t>(i)];
        node.theta = init_.initial_theta;
        node.neighbor_ids = membership.in_neighbors(i);
        node.neighbor_est.assign(node.neighbor_ids.size(), init_.initial_estimate);
        int local = 0;
        for (int j : node.neighbor_ids) {
            edges_.push_back(UnionEdge{i, j, ordinal, local});
            edge_ordinal_[static_cast<std::size_t>(i)].push_back(ordinal);
            ++ordinal;
            ++local;
        }
    }

    if (mode_ == RunMode::cooperative) {
        switcher_.emplace(init_.ensemble, make_stream(master_seed, rep, StreamRole::markov, 0));
        channel_rng_.reserve(edges_.size());
        for (const auto& e : edges_)
            channel_rng_.push_back(
                make_stream(master_seed, rep, StreamRole::channel,
                            static_cast<std::uint64_t>(e.ordinal)));
    }
    for (int i = 0; i < m; ++i) {
        regressor_rng_.push_back(
            make_stream(master_seed, rep, StreamRole::regressor, static_cast<std::uint64_t>(i)));
        measurement_rng_.push_back(
            make_stream(master_seed, rep, StreamRole::measurement, static_cast<std::uint64_t>(i)));
    }

    phi_.assign(static_cast<std::size_t>(m), Vec(n, 0.0));
    s_bits_.assign(static_cast<std::size_t>(m), 0);
    z_bits_.assign(edges_.size(), 0);
    edge_active_.assign(edges_.size(), 0);
    next_theta_.assign(static_cast<std::size_t>(m), Vec(n, 0.0));
    next_est_.assign(edges_.size(), Vec(n, 0.0));
    telemetry_.node_sq_error.assign(static_cast<std::size_t>(m), 0.0);
    telemetry_.edge_sq_error.assign(edges_.size(), 0.0);
}

const StepTelemetry& Network::step() {
    if (mode_ == RunMode::cooperative)
        step_cooperative();
    else
        step_noncooperative();
    return telemetry_;
}

void Network::step_cooperative() {
    const std::int64_t k = clock_ + 1;
    const double b_k = init_.gains.schedule.at(k);
    const int m = init_.node_count;
    const auto n = static_cast<std::size_t>(init_.dimension);

    // (a) topology state for this tick; the constructor draw covers k = 1.
    if (k > 1) switcher_->next();
    const int u = switcher_->state();
    const Digraph& active = init_.ensemble.graphs[static_cast<std::size_t>(u)];

    // (b) all randomness for the tick: regressors, measurement bits, channel
    // bits on active edges (encoded from the sender's previous estimate).
    for (int i = 0; i < m; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        init_.regressors[iu].next_into(regressor_rng_[iu], phi_[iu]);
        const double d = init_.measurement_noise.sample(measurement_rng_[iu]);
        const double y = dot(phi_[iu], init_.true_theta) + d;
        s_bits_[iu] = y <= init_.sensor_thresholds[iu] ? 1 : 0;
    }
    const Vec& psi = init_.encoder.psi_at(k);
    for (const auto& e : edges_) {
        const auto eu = static_cast<std::size_t>(e.ordinal);
        const bool is_active = active.weight(e.receiver, e.sender) > 0.0;
        edge_active_[eu] = is_active ? 1 : 0;
        if (!is_active) continue;
        const double omega = init_.channel_noise.sample(channel_rng_[eu]);
        const double encoded = dot(psi, nodes_[static_cast<std::size_t>(e.sender)].theta);
        z_bits_[eu] = encoded + omega <= init_.channel_threshold ? 1 : 0;
    }

    // (c) neighbor-estimate updates from the previous state.
    const double gamma_gain = init_.gains.gamma * b_k;
    for (const auto& e : edges_) {
        const auto eu = static_cast<std::size_t>(e.ordinal);
        const auto& node = nodes_[static_cast<std::size_t>(e.receiver)];
        const Vec& prev = node.neighbor_est[static_cast<std::size_t>(e.local)];
        Vec& out = next_est_[eu];
        out = prev;
        if (!edge_active_[eu]) continue;
        const double predicted =
            init_.channel_noise.cdf(init_.channel_threshold - dot(psi, prev));
        const double innovation = predicted - static_cast<double>(z_bits_[eu]);
        for (std::size_t c = 0; c < n; ++c) out[c] += gamma_gain * innovation * psi[c];
        init_.box.project_in_place(out);
    }

    // (d) fusion updates, consuming the previous neighbor estimates.
    const double beta_gain = init_.gains.beta * b_k;
    for (int i = 0; i < m; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        const auto& node = nodes_[iu];
        const Vec& prev = node.theta;
        Vec& out = next_theta_[iu];
        out = prev;
        const double predicted = init_.measurement_noise.cdf(
            init_.sensor_thresholds[iu] - dot(phi_[iu], prev));
        const double innovation = predicted - static_cast<double>(s_bits_[iu]);
        for (std::size_t c = 0; c < n; ++c) out[c] += beta_gain * innovation * phi_[iu][c];
        for (std::size_t local = 0; local < node.neighbor_ids.size(); ++local) {
            const int j = node.neighbor_ids[local];
            const double a = active.weight(i, j);
            if (a <= 0.0) continue;
            const Vec& est = node.neighbor_est[local];
            for (std::size_t c = 0; c < n; ++c)
                out[c] += beta_gain * a * (est[c] - prev[c]);
        }
        init_.box.project_in_place(out);
    }

    // (e) commit.
    for (int i = 0; i < m; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        nodes_[iu].theta.swap(next_theta_[iu]);
        for (std::size_t local = 0; local < nodes_[iu].neighbor_ids.size(); ++local) {
            const auto eu = static_cast<std::size_t>(edge_ordinal_[iu][local]);
            nodes_[iu].neighbor_est[local].swap(next_est_[eu]);
        }
    }
    clock_ = k;
    record_telemetry(u);
}

void Network::step_noncooperative() {
    const std::int64_t k = clock_ + 1;
    const double b_k = init_.gains.schedule.at(k);
    const int m = init_.node_count;
    const auto n = static_cast<std::size_t>(init_.dimension);

    for (int i = 0; i < m; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        init_.regressors[iu].next_into(regressor_rng_[iu], phi_[iu]);
        const double d = init_.measurement_noise.sample(measurement_rng_[iu]);
        const double y = dot(phi_[iu], init_.true_theta) + d;
        s_bits_[iu] = y <= init_.sensor_thresholds[iu] ? 1 : 0;
    }

    const double beta_gain = init_.gains.beta * b_k;
    for (int i = 0; i < m; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        Vec& theta = nodes_[iu].theta;
        const double predicted = init_.measurement_noise.cdf(
            init_.sensor_thresholds[iu] - dot(phi_[iu], theta));
        const double innovation = predicted - static_cast<double>(s_bits_[iu]);
        for (std::size_t c = 0; c < n; ++c) theta[c] += beta_gain * innovation * phi_[iu][c];
        init_.box.project_in_place(theta);
    }
    clock_ = k;
    record_telemetry(-1);
}

void Network::record_telemetry(int active_graph) {
    telemetry_.k = clock_;
    telemetry_.active_graph = active_graph;
    const int m = init_.node_count;
    const auto n = static_cast<std::size_t>(init_.dimension);
    for (int i = 0; i < m; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        double acc = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            const double d = nodes_[iu].theta[c] - init_.true_theta[c];
            acc += d * d;
        }
        telemetry_.node_sq_error[iu] = acc;
    }
    if (mode_ == RunMode::cooperative) {
        for (const auto& e : edges_) {
            const auto eu = static_cast<std::size_t>(e.ordinal);
            const auto& node = nodes_[static_cast<std::size_t>(e.receiver)];
            const Vec& est = node.neighbor_est[static_cast<std::size_t>(e.local)];
            const Vec& sender_theta = nodes_[static_cast<std::size_t>(e.sender)].theta;
            double acc = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                const double d = est[c] - sender_theta[c];
                acc += d * d;
            }
            telemetry_.edge_sq_error[eu] = acc;
        }
    }
}

void Network::set_node_theta(int i, Vec theta) {
    if (theta.size() != static_cast<std::size_t>(init_.dimension))
        throw DimensionMismatch("set_node_theta: dimension mismatch");
    nodes_[static_cast<std::size_t>(i)].theta = std::move(theta);
}

void Network::set_neighbor_estimate(int receiver, int sender, Vec estimate) {
    if (estimate.size() != static_cast<std::size_t>(init_.dimension))
        throw DimensionMismatch("set_neighbor_estimate: dimension mismatch");
    auto& node = nodes_[static_cast<std::size_t>(receiver)];
    for (std::size_t local = 0; local < node.neighbor_ids.size(); ++local) {
        if (node.neighbor_ids[local] == sender) {
            node.neighbor_est[local] = std::move(estimate);
            return;
        }
    }
    throw DimensionMismatch("set_neighbor_estimate: no such union edge");
}

double Network::realized_phi_max() const {
    double acc = 0.0;
    for (const auto& g : init_.regressors) acc = std::max(acc, g.realized_max());
    return acc;
}

}  // namespace eftqdi
