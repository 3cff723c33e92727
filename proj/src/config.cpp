#include "eftqdi/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "eftqdi/errors.hpp"

namespace eftqdi {

namespace {

using nlohmann::json;

Vec vec_from_json(const json& j, const char* field) {
    if (!j.is_array()) throw ConfigInvalid(std::string(field) + ": expected an array");
    Vec out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigInvalid(std::string(field) + ": expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

Matrix matrix_from_json(const json& j, const char* field) {
    if (!j.is_array() || j.empty())
        throw ConfigInvalid(std::string(field) + ": expected a nonempty array of rows");
    const std::size_t cols = j.front().size();
    Matrix m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const auto& row = j[r];
        if (!row.is_array() || row.size() != cols)
            throw ConfigInvalid(std::string(field) + ": ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c].get<double>();
    }
    return m;
}

json vec_to_json(const Vec& v) { return json(v); }

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

const json& require(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end()) throw ConfigInvalid(std::string("missing config field: ") + field);
    return *it;
}

}  // namespace

ProjectionBox ExperimentConfig::make_box() const { return ProjectionBox(box_lower, box_upper); }

LinearEncoder ExperimentConfig::make_encoder() const {
    if (encoder.schedule == "cyclic-basis") return LinearEncoder::cyclic_basis(dimension);
    if (encoder.schedule == "explicit") return LinearEncoder::explicit_schedule(encoder.vectors);
    throw ConfigInvalid("encoder.schedule must be \"cyclic-basis\" or \"explicit\"");
}

StepSchedule ExperimentConfig::make_schedule() const {
    return StepSchedule(step_exponent, excitation_window);
}

std::vector<RegressorGenerator> ExperimentConfig::make_regressors() const {
    std::vector<RegressorGenerator> out;
    out.reserve(regressor_nodes.size());
    const std::optional<double> bound =
        enforce_phi_bar ? std::optional<double>(phi_bar) : std::nullopt;
    for (const auto& node : regressor_nodes)
        out.push_back(RegressorGenerator::state_space(node.a_diag, node.b, node.c_diag,
                                                      regressor_initial_state,
                                                      innovation_halfwidth, bound));
    return out;
}

std::int64_t ExperimentConfig::effective_rate_lo() const {
    if (rate_window_lo > 0) return rate_window_lo;
    return std::min<std::int64_t>(1000, std::max<std::int64_t>(1, horizon / 2));
}

std::int64_t ExperimentConfig::effective_rate_hi() const {
    return rate_window_hi > 0 ? rate_window_hi : horizon;
}

NetworkInit ExperimentConfig::make_network_init() const {
    NetworkInit init{dimension,
                     node_count,
                     theta,
                     make_box(),
                     ensemble,
                     sensor_thresholds,
                     NoiseModel::gaussian(measurement_noise_std),
                     channel_threshold,
                     NoiseModel::gaussian(channel_noise_std),
                     make_regressors(),
                     make_encoder(),
                     GainConfig{beta, gamma, make_schedule()},
                     initial_theta.empty() ? make_box().center() : initial_theta,
                     initial_neighbor_estimate.empty() ? make_box().center()
                                                       : initial_neighbor_estimate};
    return init;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.dimension = require(j, "dimension").get<int>();
    cfg.node_count = require(j, "node_count").get<int>();
    cfg.theta = vec_from_json(require(j, "theta"), "theta");
    const json& box = require(j, "box");
    cfg.box_lower = vec_from_json(require(box, "lower"), "box.lower");
    cfg.box_upper = vec_from_json(require(box, "upper"), "box.upper");

    const json& ens = require(j, "ensemble");
    const json& graphs = require(ens, "graphs");
    if (!graphs.is_array() || graphs.empty())
        throw ConfigInvalid("ensemble.graphs: expected a nonempty array");
    for (const auto& graph_spec : graphs) {
        Digraph g(cfg.node_count);
        for (const auto& edge : require(graph_spec, "edges")) {
            if (!edge.is_array() || edge.size() != 3)
                throw ConfigInvalid("ensemble edge: expected [from, to, weight]");
            // Node ids are 1-based in config files.
            g.add_edge(edge[0].get<int>() - 1, edge[1].get<int>() - 1, edge[2].get<double>());
        }
        cfg.ensemble.graphs.push_back(std::move(g));
    }
    cfg.ensemble.transition = matrix_from_json(require(ens, "transition"), "ensemble.transition");
    if (ens.contains("initial_dist")) {
        cfg.ensemble.initial_dist = vec_from_json(ens["initial_dist"], "ensemble.initial_dist");
    } else {
        cfg.ensemble.initial_dist.assign(cfg.ensemble.graphs.size(),
                                         1.0 / static_cast<double>(cfg.ensemble.graphs.size()));
    }

    const json& st = require(j, "sensor_thresholds");
    if (st.is_number()) {
        cfg.sensor_thresholds.assign(static_cast<std::size_t>(cfg.node_count), st.get<double>());
    } else {
        cfg.sensor_thresholds = vec_from_json(st, "sensor_thresholds");
    }
    cfg.measurement_noise_std = require(j, "measurement_noise_std").get<double>();
    cfg.channel_threshold = require(j, "channel_threshold").get<double>();
    cfg.channel_noise_std = require(j, "channel_noise_std").get<double>();

    const json& reg = require(j, "regressors");
    cfg.innovation_halfwidth = require(reg, "innovation_halfwidth").get<double>();
    cfg.regressor_initial_state =
        vec_from_json(require(reg, "initial_state"), "regressors.initial_state");
    cfg.phi_bar = require(reg, "phi_bar").get<double>();
    cfg.enforce_phi_bar = reg.value("enforce_phi_bar", false);
    for (const auto& node : require(reg, "nodes")) {
        StateSpaceSpec spec;
        spec.a_diag = vec_from_json(require(node, "a_diag"), "regressors.nodes.a_diag");
        spec.b = vec_from_json(require(node, "b"), "regressors.nodes.b");
        spec.c_diag = vec_from_json(require(node, "c_diag"), "regressors.nodes.c_diag");
        cfg.regressor_nodes.push_back(std::move(spec));
    }

    const json& enc = require(j, "encoder");
    cfg.encoder.schedule = require(enc, "schedule").get<std::string>();
    if (enc.contains("vectors"))
        for (const auto& v : enc["vectors"])
            cfg.encoder.vectors.push_back(vec_from_json(v, "encoder.vectors"));
    cfg.encoder.h_psi = enc.value("h_psi", 0);

    const json& gains = require(j, "gains");
    cfg.beta = require(gains, "beta").get<double>();
    cfg.gamma = require(gains, "gamma").get<double>();
    cfg.step_exponent = require(gains, "step_exponent").get<double>();

    cfg.excitation_window = require(j, "excitation_window").get<int>();
    cfg.horizon = require(j, "horizon").get<std::int64_t>();
    cfg.reps = require(j, "reps").get<int>();
    cfg.seed = require(j, "seed").get<std::uint64_t>();
    cfg.baseline = j.value("baseline", false);
    if (j.contains("rate_window")) {
        const auto& rw = j["rate_window"];
        if (!rw.is_array() || rw.size() != 2)
            throw ConfigInvalid("rate_window: expected [lo, hi]");
        cfg.rate_window_lo = rw[0].get<std::int64_t>();
        cfg.rate_window_hi = rw[1].get<std::int64_t>();
    }
    if (j.contains("initial_theta"))
        cfg.initial_theta = vec_from_json(j["initial_theta"], "initial_theta");
    if (j.contains("initial_neighbor_estimate"))
        cfg.initial_neighbor_estimate =
            vec_from_json(j["initial_neighbor_estimate"], "initial_neighbor_estimate");
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["dimension"] = cfg.dimension;
    j["node_count"] = cfg.node_count;
    j["theta"] = vec_to_json(cfg.theta);
    j["box"] = {{"lower", vec_to_json(cfg.box_lower)}, {"upper", vec_to_json(cfg.box_upper)}};

    json graphs = json::array();
    for (const auto& g : cfg.ensemble.graphs) {
        json edges = json::array();
        for (int i = 0; i < g.node_count(); ++i)
            for (int from = 0; from < g.node_count(); ++from) {
                const double w = g.weight(i, from);
                if (w > 0.0) edges.push_back(json::array({from + 1, i + 1, w}));
            }
        graphs.push_back(json{{"edges", edges}});
    }
    j["ensemble"] = {{"graphs", graphs},
                     {"transition", matrix_to_json(cfg.ensemble.transition)},
                     {"initial_dist", vec_to_json(cfg.ensemble.initial_dist)}};

    j["sensor_thresholds"] = vec_to_json(cfg.sensor_thresholds);
    j["measurement_noise_std"] = cfg.measurement_noise_std;
    j["channel_threshold"] = cfg.channel_threshold;
    j["channel_noise_std"] = cfg.channel_noise_std;

    json nodes = json::array();
    for (const auto& node : cfg.regressor_nodes)
        nodes.push_back(json{{"a_diag", vec_to_json(node.a_diag)},
                             {"b", vec_to_json(node.b)},
                             {"c_diag", vec_to_json(node.c_diag)}});
    j["regressors"] = {{"innovation_halfwidth", cfg.innovation_halfwidth},
                       {"initial_state", vec_to_json(cfg.regressor_initial_state)},
                       {"phi_bar", cfg.phi_bar},
                       {"enforce_phi_bar", cfg.enforce_phi_bar},
                       {"nodes", nodes}};

    json enc;
    enc["schedule"] = cfg.encoder.schedule;
    if (!cfg.encoder.vectors.empty()) {
        json vectors = json::array();
        for (const auto& v : cfg.encoder.vectors) vectors.push_back(vec_to_json(v));
        enc["vectors"] = vectors;
    }
    enc["h_psi"] = cfg.encoder.h_psi;
    j["encoder"] = enc;

    j["gains"] = {{"beta", cfg.beta}, {"gamma", cfg.gamma}, {"step_exponent", cfg.step_exponent}};
    j["excitation_window"] = cfg.excitation_window;
    j["horizon"] = cfg.horizon;
    j["reps"] = cfg.reps;
    j["seed"] = cfg.seed;
    j["baseline"] = cfg.baseline;
    j["rate_window"] = json::array({cfg.effective_rate_lo(), cfg.effective_rate_hi()});
    if (!cfg.initial_theta.empty()) j["initial_theta"] = vec_to_json(cfg.initial_theta);
    if (!cfg.initial_neighbor_estimate.empty())
        j["initial_neighbor_estimate"] = vec_to_json(cfg.initial_neighbor_estimate);
    return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("config parse error: ") + e.what());
    }
    return config_from_json(j);
}

namespace {

void check_structure(const ExperimentConfig& cfg) {
    const auto n = static_cast<std::size_t>(cfg.dimension);
    const auto m = static_cast<std::size_t>(cfg.node_count);
    if (cfg.dimension < 1) throw ConfigInvalid("dimension must be >= 1");
    if (cfg.node_count < 1) throw ConfigInvalid("node_count must be >= 1");
    if (cfg.theta.size() != n) throw ConfigInvalid("theta length must equal dimension");
    if (cfg.box_lower.size() != n || cfg.box_upper.size() != n)
        throw ConfigInvalid("box bounds must match dimension");
    cfg.ensemble.validate();
    if (cfg.ensemble.node_count() != cfg.node_count)
        throw ConfigInvalid("ensemble node set must match node_count");
    if (cfg.sensor_thresholds.size() != m)
        throw ConfigInvalid("sensor_thresholds must give one value per node");
    if (cfg.measurement_noise_std < 0.0 || cfg.channel_noise_std < 0.0)
        throw ConfigInvalid("noise standard deviations must be >= 0");
    if (cfg.regressor_nodes.size() != m)
        throw ConfigInvalid("regressors.nodes must give one model per node");
    if (cfg.regressor_initial_state.size() != n)
        throw ConfigInvalid("regressors.initial_state must match dimension");
    for (const auto& node : cfg.regressor_nodes)
        if (node.a_diag.size() != n || node.b.size() != n || node.c_diag.size() != n)
            throw ConfigInvalid("regressor model vectors must match dimension");
    if (!(cfg.phi_bar > 0.0)) throw ConfigInvalid("regressors.phi_bar must be positive");
    if (!(cfg.beta > 0.0) || !(cfg.gamma > 0.0))
        throw ConfigInvalid("gains beta and gamma must be strictly positive");
    if (!(cfg.step_exponent > 0.5) || !(cfg.step_exponent <= 1.0))
        throw ConfigInvalid("gains.step_exponent must lie in (1/2, 1]");
    if (cfg.excitation_window < 1) throw ConfigInvalid("excitation_window must be >= 1");
    if (cfg.horizon < 1) throw ConfigInvalid("horizon must be >= 1");
    if (cfg.reps < 1) throw ConfigInvalid("reps must be >= 1");
    if (!cfg.initial_theta.empty() && cfg.initial_theta.size() != n)
        throw ConfigInvalid("initial_theta must match dimension");
    if (!cfg.initial_neighbor_estimate.empty() && cfg.initial_neighbor_estimate.size() != n)
        throw ConfigInvalid("initial_neighbor_estimate must match dimension");
    const auto lo = cfg.effective_rate_lo();
    const auto hi = cfg.effective_rate_hi();
    if (lo < 1 || hi > cfg.horizon || lo >= hi)
        throw ConfigInvalid("rate_window must satisfy 1 <= lo < hi <= horizon");
    if (cfg.encoder.schedule == "explicit" && cfg.encoder.vectors.empty())
        throw ConfigInvalid("explicit encoder schedule requires vectors");
}

int effective_h_psi(const ExperimentConfig& cfg, const LinearEncoder& enc) {
    return cfg.encoder.h_psi > 0 ? cfg.encoder.h_psi : enc.dimension();
}

}  // namespace

ExcitationReport config_excitation_report(const ExperimentConfig& cfg) {
    // Innovations zeroed: the state recursion runs on its mean path.
    std::vector<RegressorGenerator> gens;
    for (const auto& node : cfg.regressor_nodes)
        gens.push_back(RegressorGenerator::state_space(node.a_diag, node.b, node.c_diag,
                                                       cfg.regressor_initial_state, 0.0));
    const int h = cfg.excitation_window;
    const std::int64_t windows = std::min<std::int64_t>(1000, cfg.horizon - h + 1);
    const int horizon = static_cast<int>(std::max<std::int64_t>(h, windows + h - 1));

    Rng unused(0);
    std::vector<std::vector<Vec>> streams(gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i) {
        streams[i].reserve(static_cast<std::size_t>(horizon));
        for (int k = 0; k < horizon; ++k) streams[i].push_back(gens[i].next(unused));
    }
    return excitation_report(streams, h, horizon);
}

TheoryConstants derive_theory_constants(const ExperimentConfig& cfg,
                                        const EnsembleReport& report,
                                        const ExcitationReport& excitation,
                                        double delta_psi_sq) {
    TheoryConstants tc;
    tc.h = cfg.excitation_window;
    tc.c_h = c_h_constant(cfg.make_schedule());
    const ProjectionBox box = cfg.make_box();
    tc.theta_bar = box.theta_bar();
    tc.phi_bar = cfg.phi_bar;
    const LinearEncoder enc = cfg.make_encoder();
    tc.psi_bar = enc.psi_bar();

    const NoiseModel meas = NoiseModel::gaussian(cfg.measurement_noise_std);
    const NoiseModel chan = NoiseModel::gaussian(cfg.channel_noise_std);
    double f_lower = 0.0, f_upper = 0.0;
    for (std::size_t i = 0; i < cfg.sensor_thresholds.size(); ++i) {
        const auto bounds =
            density_bounds(meas, cfg.sensor_thresholds[i], tc.phi_bar * tc.theta_bar);
        f_lower = i == 0 ? bounds.lower : std::min(f_lower, bounds.lower);
        f_upper = std::max(f_upper, bounds.upper);
    }
    tc.f_lower = f_lower;
    tc.f_upper = f_upper;
    tc.g_lower = density_bounds(chan, cfg.channel_threshold, tc.psi_bar * tc.theta_bar).lower;

    tc.delta_phi_sq = excitation.delta_phi_sq;
    tc.delta_psi_sq = delta_psi_sq;
    tc.pi_min = report.pi_min;
    tc.lambda2_mirror = report.lambda2_mirror;
    tc.lambda_m = report.lambda_m;
    tc.n_bar = report.n_bar;

    if (!(tc.f_lower > 0.0))
        throw NonPositiveInput("theory constants: measurement density lower bound underflowed");
    if (!(tc.g_lower > 0.0))
        throw NonPositiveInput("theory constants: channel density lower bound underflowed");
    if (!(tc.delta_phi_sq > 0.0))
        throw NonPositiveInput("theory constants: excitation level is zero");
    if (!(tc.delta_psi_sq > 0.0))
        throw NonPositiveInput("theory constants: encoder excitation level is zero");
    if (!(tc.lambda2_mirror > 0.0))
        throw NonPositiveInput("theory constants: mirror connectivity is zero");
    tc.sigma();  // throws NonPositiveInput when inconsistent
    return tc;
}

ValidationReport validate_config(const ExperimentConfig& cfg) {
    check_structure(cfg);

    ValidationReport report;
    report.ensemble = validate_assumption_1(cfg.ensemble);
    report.theta_in_box = cfg.make_box().contains(cfg.theta);

    const LinearEncoder enc = cfg.make_encoder();
    const int h_psi = effective_h_psi(cfg, enc);
    report.delta_psi_sq =
        verify_pe(enc, h_psi, std::max<std::int64_t>(cfg.horizon, h_psi + enc.period()));
    report.excitation = config_excitation_report(cfg);

    try {
        report.constants =
            derive_theory_constants(cfg, report.ensemble, report.excitation, report.delta_psi_sq);
        report.gamma_threshold = gamma_threshold_thm1(cfg.beta, *report.constants);
        report.certificate = gain_certificate_thm2(cfg.beta, cfg.gamma, *report.constants);
    } catch (const NonPositiveInput& e) {
        report.constants_note = e.what();
    }
    return report;
}

ValidationReport require_valid(const ExperimentConfig& cfg) {
    ValidationReport report = validate_config(cfg);
    if (!report.ensemble.balanced_all)
        throw ConfigInvalid("Assumption 1 fails: not every member graph is balanced");
    if (!report.ensemble.union_has_spanning_tree)
        throw ConfigInvalid("Assumption 1 fails: the union topology has no spanning tree");
    if (!report.ensemble.ergodic)
        throw ConfigInvalid("Assumption 1 fails: the switching chain is not ergodic");
    if (!report.theta_in_box)
        throw ConfigInvalid("Assumption 3 fails: theta lies outside the prior box");
    if (!(report.delta_psi_sq > 0.0))
        throw ConfigInvalid("encoder persistent excitation fails: delta_psi^2 = 0");
    return report;
}

}  // namespace eftqdi
