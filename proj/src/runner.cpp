#include "eftqdi/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "eftqdi/errors.hpp"
#include "eftqdi/format.hpp"

namespace eftqdi {

namespace {

struct RepOutput {
    Vec fe;
    Vec ene;
    std::optional<Vec> fe_baseline;
    double phi_max = 0.0;
};

RepOutput run_one_rep(const ExperimentConfig& cfg, const NetworkInit& init, std::uint64_t rep) {
    const auto horizon = static_cast<std::size_t>(cfg.horizon);
    RepOutput out;
    out.fe.resize(horizon);
    out.ene.resize(horizon);

    Network net(init, cfg.seed, rep, RunMode::cooperative);
    for (std::size_t k = 0; k < horizon; ++k) {
        const StepTelemetry& t = net.step();
        out.fe[k] = t.fe_total();
        out.ene[k] = t.ene_total();
    }
    out.phi_max = net.realized_phi_max();

    if (cfg.baseline) {
        // Same stream derivation, so the baseline sees the same regressor and
        // measurement sample paths as the cooperative run.
        Network base(init, cfg.seed, rep, RunMode::noncooperative);
        Vec fe(horizon);
        for (std::size_t k = 0; k < horizon; ++k) fe[k] = base.step().fe_total();
        out.fe_baseline = std::move(fe);
        out.phi_max = std::max(out.phi_max, base.realized_phi_max());
    }
    return out;
}

// Collects repetition outputs and folds them strictly in repetition order.
// Workers deposit out-of-order results; deposits beyond the look-ahead window
// block so memory stays bounded.
class OrderedReducer {
public:
    OrderedReducer(std::size_t horizon, bool baseline, int window)
        : window_(window), fe_sum_(horizon, 0.0), ene_sum_(horizon, 0.0) {
        if (baseline) base_sum_ = Vec(horizon, 0.0);
    }

    void deposit(int rep, RepOutput&& out) {
        std::unique_lock<std::mutex> lock(mutex_);
        space_.wait(lock, [&] { return aborted_ || rep < next_ + window_; });
        if (aborted_) return;
        pending_.emplace(rep, std::move(out));
        while (!pending_.empty() && pending_.begin()->first == next_) {
            fold(pending_.begin()->second);
            pending_.erase(pending_.begin());
            ++next_;
        }
        space_.notify_all();
    }

    // Unblocks depositors after a worker failure.
    void abort() {
        std::lock_guard<std::mutex> lock(mutex_);
        aborted_ = true;
        space_.notify_all();
    }

    double phi_max() const { return phi_max_; }
    const Vec& fe_sum() const { return fe_sum_; }
    const Vec& ene_sum() const { return ene_sum_; }
    const std::optional<Vec>& base_sum() const { return base_sum_; }

private:
    void fold(const RepOutput& out) {
        for (std::size_t k = 0; k < fe_sum_.size(); ++k) {
            fe_sum_[k] += out.fe[k];
            ene_sum_[k] += out.ene[k];
        }
        if (base_sum_ && out.fe_baseline)
            for (std::size_t k = 0; k < base_sum_->size(); ++k)
                (*base_sum_)[k] += (*out.fe_baseline)[k];
        phi_max_ = std::max(phi_max_, out.phi_max);
    }

    std::mutex mutex_;
    std::condition_variable space_;
    bool aborted_ = false;
    int next_ = 0;
    int window_;
    std::map<int, RepOutput> pending_;
    Vec fe_sum_;
    Vec ene_sum_;
    std::optional<Vec> base_sum_;
    double phi_max_ = 0.0;
};

}  // namespace

int worker_count(int reps) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("EFTQDI_THREADS")) {
        int cap = 0;
        const auto res = std::from_chars(env, env + std::char_traits<char>::length(env), cap);
        if (res.ec == std::errc() && cap >= 1) hw = cap;
    }
    return std::max(1, std::min(hw, reps));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult result;
    result.validation = require_valid(cfg);
    result.master_seed = cfg.seed;
    result.config_echo = config_to_json(cfg);

    const NetworkInit init = cfg.make_network_init();
    const int reps = cfg.reps;
    const int workers = worker_count(reps);
    OrderedReducer reducer(static_cast<std::size_t>(cfg.horizon), cfg.baseline,
                           std::max(2, 2 * workers));

    std::atomic<int> next_rep{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const auto work = [&] {
        try {
            while (true) {
                const int rep = next_rep.fetch_add(1);
                if (rep >= reps) break;
                reducer.deposit(rep, run_one_rep(cfg, init, static_cast<std::uint64_t>(rep)));
            }
        } catch (...) {
            {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
            next_rep.store(reps);
            reducer.abort();
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    const double inv = 1.0 / static_cast<double>(reps);
    const auto horizon = static_cast<std::size_t>(cfg.horizon);
    result.mse_fe.resize(horizon);
    result.mse_ene.resize(horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
        result.mse_fe[k] = reducer.fe_sum()[k] * inv;
        result.mse_ene[k] = reducer.ene_sum()[k] * inv;
    }
    if (reducer.base_sum()) {
        Vec base(horizon);
        for (std::size_t k = 0; k < horizon; ++k) base[k] = (*reducer.base_sum())[k] * inv;
        result.mse_fe_baseline = std::move(base);
    }
    result.realized_phi_max = reducer.phi_max();

    for (std::size_t k = 0; k < horizon; ++k)
        if (!std::isfinite(result.mse_fe[k]) || result.mse_fe[k] < 0.0 ||
            !std::isfinite(result.mse_ene[k]) || result.mse_ene[k] < 0.0)
            throw Error("run_experiment: non-finite or negative trace value");

    const std::int64_t lo = cfg.effective_rate_lo();
    const std::int64_t hi = cfg.effective_rate_hi();
    result.fit_fe = rate_fit(result.mse_fe, lo, hi);
    result.fit_ene = rate_fit(result.mse_ene, lo, hi);
    if (result.mse_fe_baseline) {
        try {
            result.fit_baseline = rate_fit(*result.mse_fe_baseline, lo, hi);
        } catch (const NonPositiveTrace&) {
            // A flat-zero baseline has no log-log fit; leave it absent.
        }
    }

    result.rep_seeds.reserve(static_cast<std::size_t>(reps));
    for (int rep = 0; rep < reps; ++rep)
        result.rep_seeds.push_back(derive_stream_seed(
            cfg.seed, static_cast<std::uint64_t>(rep), StreamRole::rep_base, 0));
    return result;
}

std::string csv_bytes(const ExperimentResult& result) {
    std::string out = "k,mse_fe,mse_ene";
    const bool with_baseline = result.mse_fe_baseline.has_value();
    if (with_baseline) out += ",mse_fe_baseline";
    out += '\n';
    for (std::size_t k = 0; k < result.mse_fe.size(); ++k) {
        out += format_shortest(static_cast<std::int64_t>(k + 1));
        out += ',';
        out += format_shortest(result.mse_fe[k]);
        out += ',';
        out += format_shortest(result.mse_ene[k]);
        if (with_baseline) {
            out += ',';
            out += format_shortest((*result.mse_fe_baseline)[k]);
        }
        out += '\n';
    }
    return out;
}

void emit_csv(const ExperimentResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit_csv: cannot open " + path.string());
    const std::string bytes = csv_bytes(result);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("emit_csv: write failed for " + path.string());
}

CsvContent parse_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("parse_csv: cannot open " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw IoError("parse_csv: empty file");
    const bool with_baseline = header == "k,mse_fe,mse_ene,mse_fe_baseline";
    if (!with_baseline && header != "k,mse_fe,mse_ene")
        throw IoError("parse_csv: unexpected header: " + header);

    CsvContent content;
    if (with_baseline) content.mse_fe_baseline = Vec{};
    std::string line;
    while (std::getline(in, line)) {
        const char* ptr = line.data();
        const char* end = ptr + line.size();
        const auto next_field = [&](auto& value) {
            const auto res = std::from_chars(ptr, end, value);
            if (res.ec != std::errc()) throw IoError("parse_csv: bad field in: " + line);
            ptr = res.ptr;
            if (ptr != end && *ptr == ',') ++ptr;
        };
        std::int64_t k = 0;
        double fe = 0.0, ene = 0.0;
        next_field(k);
        next_field(fe);
        next_field(ene);
        content.k.push_back(k);
        content.mse_fe.push_back(fe);
        content.mse_ene.push_back(ene);
        if (with_baseline) {
            double base = 0.0;
            next_field(base);
            content.mse_fe_baseline->push_back(base);
        }
    }
    return content;
}

namespace {

void put(std::string& out, const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
}

std::string bool_str(bool v) { return v ? "true" : "false"; }

std::string vec_str(const Vec& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_shortest(v[i]);
    }
    s += "]";
    return s;
}

}  // namespace

std::string result_report(const ExperimentResult& result) {
    std::string out;
    put(out, "seed", format_shortest(result.master_seed));
    const auto& val = result.validation;
    put(out, "assumption1.balanced_all", bool_str(val.ensemble.balanced_all));
    put(out, "assumption1.union_spanning_tree", bool_str(val.ensemble.union_has_spanning_tree));
    put(out, "assumption1.ergodic", bool_str(val.ensemble.ergodic));
    put(out, "assumption1.stationary", vec_str(val.ensemble.stationary));
    put(out, "assumption3.theta_in_box", bool_str(val.theta_in_box));
    put(out, "excitation.window", format_shortest(static_cast<std::int64_t>(val.excitation.window)));
    put(out, "excitation.delta_phi_sq", format_shortest(val.excitation.delta_phi_sq));
    put(out, "excitation.satisfied", bool_str(val.excitation.satisfied));
    put(out, "encoder.delta_psi_sq", format_shortest(val.delta_psi_sq));
    put(out, "ensemble.pi_min", format_shortest(val.ensemble.pi_min));
    put(out, "ensemble.lambda2_mirror", format_shortest(val.ensemble.lambda2_mirror));
    put(out, "ensemble.lambda_m", format_shortest(val.ensemble.lambda_m));
    put(out, "ensemble.n_bar", format_shortest(static_cast<std::int64_t>(val.ensemble.n_bar)));
    if (val.constants) {
        const auto& tc = *val.constants;
        put(out, "constants.c_h", format_shortest(tc.c_h));
        put(out, "constants.f_lower", format_shortest(tc.f_lower));
        put(out, "constants.f_upper", format_shortest(tc.f_upper));
        put(out, "constants.g_lower", format_shortest(tc.g_lower));
        put(out, "constants.phi_bar", format_shortest(tc.phi_bar));
        put(out, "constants.psi_bar", format_shortest(tc.psi_bar));
        put(out, "constants.theta_bar", format_shortest(tc.theta_bar));
        put(out, "constants.sigma", format_shortest(tc.sigma()));
        if (val.gamma_threshold)
            put(out, "constants.gamma_threshold_thm1", format_shortest(*val.gamma_threshold));
    } else {
        put(out, "constants.note", val.constants_note);
    }
    if (val.certificate) {
        const auto& cert = *val.certificate;
        put(out, "certificate.w1", format_shortest(cert.w1));
        put(out, "certificate.w2", format_shortest(cert.w2));
        put(out, "certificate.w3", format_shortest(cert.w3));
        put(out, "certificate.lambda_min_W", format_shortest(cert.lambda_min_w));
        put(out, "certificate.satisfies_thm1", bool_str(cert.satisfies_thm1));
        put(out, "certificate.satisfies_thm2_rate", bool_str(cert.satisfies_thm2_rate));
    }
    put(out, "fit.fe.slope", format_shortest(result.fit_fe.slope));
    put(out, "fit.fe.r_squared", format_shortest(result.fit_fe.r_squared));
    put(out, "fit.ene.slope", format_shortest(result.fit_ene.slope));
    put(out, "fit.ene.r_squared", format_shortest(result.fit_ene.r_squared));
    if (result.fit_baseline) {
        put(out, "fit.baseline.slope", format_shortest(result.fit_baseline->slope));
        put(out, "fit.baseline.r_squared", format_shortest(result.fit_baseline->r_squared));
    }
    put(out, "realized.phi_max", format_shortest(result.realized_phi_max));
    const double declared =
        result.config_echo.contains("regressors")
            ? result.config_echo["regressors"].value("phi_bar", 0.0)
            : 0.0;
    const bool exceeded = declared > 0.0 && result.realized_phi_max > declared;
    put(out, "warn.phi_bar_exceeded", bool_str(exceeded));
    return out;
}

}  // namespace eftqdi
