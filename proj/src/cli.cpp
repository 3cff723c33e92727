#include "eftqdi/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eftqdi/errors.hpp"
#include "eftqdi/format.hpp"
#include "eftqdi/presets.hpp"
#include "eftqdi/runner.hpp"

namespace eftqdi {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitIoOrParse = 2;

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

std::pair<std::int64_t, std::int64_t> parse_rate_window(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigInvalid("--rate-window expects LO:HI");
    return {std::stoll(text.substr(0, colon)), std::stoll(text.substr(colon + 1))};
}

int run_and_emit(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const ExperimentResult result = run_experiment(cfg);
    emit_csv(result, out_dir / "results.csv");
    write_text(out_dir / "report.txt", result_report(result));
    write_text(out_dir / "config.json", result.config_echo.dump(2) + "\n");

    std::cout << "wrote " << (out_dir / "results.csv").string() << "\n"
              << "fe slope = " << format_shortest(result.fit_fe.slope)
              << ", ene slope = " << format_shortest(result.fit_ene.slope) << "\n"
              << "final mse_fe = " << format_shortest(result.mse_fe.back())
              << ", final mse_ene = " << format_shortest(result.mse_ene.back()) << "\n";
    if (result.mse_fe_baseline)
        std::cout << "final mse_fe_baseline = "
                  << format_shortest(result.mse_fe_baseline->back()) << "\n";
    return kExitOk;
}

std::string validation_text(const ExperimentConfig& cfg, const ValidationReport& report) {
    std::string out;
    const auto put = [&](const std::string& key, const std::string& value) {
        out += key + " = " + value + "\n";
    };
    const auto bool_str = [](bool v) { return std::string(v ? "true" : "false"); };
    put("assumption1.balanced_all", bool_str(report.ensemble.balanced_all));
    put("assumption1.union_spanning_tree", bool_str(report.ensemble.union_has_spanning_tree));
    put("assumption1.ergodic", bool_str(report.ensemble.ergodic));
    put("assumption1.pass", bool_str(report.ensemble.assumption1()));
    put("assumption2.window", format_shortest(static_cast<std::int64_t>(report.excitation.window)));
    put("assumption2.delta_phi_sq", format_shortest(report.excitation.delta_phi_sq));
    put("assumption2.satisfied_sample_path", bool_str(report.excitation.satisfied));
    put("assumption3.theta_in_box", bool_str(report.theta_in_box));
    put("encoder.delta_psi_sq", format_shortest(report.delta_psi_sq));
    put("ensemble.pi_min", format_shortest(report.ensemble.pi_min));
    put("ensemble.lambda2_mirror", format_shortest(report.ensemble.lambda2_mirror));
    put("ensemble.lambda_m", format_shortest(report.ensemble.lambda_m));
    put("ensemble.n_bar", format_shortest(static_cast<std::int64_t>(report.ensemble.n_bar)));
    if (report.constants) {
        put("constants.sigma", format_shortest(report.constants->sigma()));
        put("constants.c_h", format_shortest(report.constants->c_h));
        put("constants.f_lower", format_shortest(report.constants->f_lower));
        put("constants.f_upper", format_shortest(report.constants->f_upper));
        put("constants.g_lower", format_shortest(report.constants->g_lower));
        if (report.gamma_threshold)
            put("constants.gamma_threshold_thm1", format_shortest(*report.gamma_threshold));
    } else {
        put("constants.note", report.constants_note);
    }
    if (report.certificate) {
        put("certificate.lambda_min_W", format_shortest(report.certificate->lambda_min_w));
        put("certificate.satisfies_thm1", bool_str(report.certificate->satisfies_thm1));
        put("certificate.satisfies_thm2_rate", bool_str(report.certificate->satisfies_thm2_rate));
        put("certificate.beta", format_shortest(cfg.beta));
        put("certificate.gamma", format_shortest(cfg.gamma));
    }
    put("accepted", bool_str(report.accepted()));
    return out;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Distributed estimation from one-bit measurements and one-bit "
                 "communication over switching topologies"};
    app.require_subcommand(1);

    std::string config_path, out_dir, rate_window;
    std::uint64_t seed = 0;
    int reps_override = 0;
    std::int64_t horizon_override = 0;
    bool baseline_flag = false;

    auto* run_cmd = app.add_subcommand("run", "Run an experiment from a config file");
    run_cmd->add_option("--config", config_path, "Config file (JSON)")->required();
    run_cmd->add_option("--seed", seed, "Master seed (overrides the config)")->required();
    run_cmd->add_option("--out", out_dir, "Output directory")->required();
    run_cmd->add_option("--reps", reps_override, "Override repetition count");
    run_cmd->add_option("--horizon", horizon_override, "Override horizon");
    run_cmd->add_flag("--baseline", baseline_flag, "Also run the non-cooperative baseline");
    run_cmd->add_option("--rate-window", rate_window, "Rate-fit window LO:HI");

    auto* validate_cmd = app.add_subcommand("validate", "Validate a config file");
    validate_cmd->add_option("--config", config_path, "Config file (JSON)")->required();

    int case_id = 0;
    auto* example_cmd =
        app.add_subcommand("example-sec6", "Run the built-in six-sensor reproduction");
    example_cmd->add_option("--case", case_id, "1 (b_k = 1/k) or 2 (b_k = k^-4/5)")
        ->required()
        ->check(CLI::IsMember({1, 2}));
    example_cmd->add_option("--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitIoOrParse;
    }

    try {
        if (run_cmd->parsed()) {
            ExperimentConfig cfg = load_config(config_path);
            cfg.seed = seed;
            if (reps_override > 0) cfg.reps = reps_override;
            if (horizon_override > 0) {
                cfg.horizon = horizon_override;
                if (cfg.rate_window_hi > cfg.horizon) cfg.rate_window_hi = cfg.horizon;
                if (cfg.rate_window_lo >= cfg.horizon) cfg.rate_window_lo = 0;
            }
            if (baseline_flag) cfg.baseline = true;
            if (!rate_window.empty()) {
                const auto [lo, hi] = parse_rate_window(rate_window);
                cfg.rate_window_lo = lo;
                cfg.rate_window_hi = hi;
            }
            return run_and_emit(cfg, out_dir);
        }
        if (validate_cmd->parsed()) {
            const ExperimentConfig cfg = load_config(config_path);
            const ValidationReport report = validate_config(cfg);
            std::cout << validation_text(cfg, report);
            return report.accepted() ? kExitOk : kExitValidationFailure;
        }
        // example-sec6
        return run_and_emit(six_sensor_example(case_id), out_dir);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoOrParse;
    } catch (const ConfigInvalid& e) {
        std::cerr << "error: " << e.what() << "\n";
        // Prerequisite violations are validation failures; malformed files are
        // parse errors. Parse errors carry the "config parse error" prefix.
        return std::string(e.what()).rfind("config parse error", 0) == 0 ? kExitIoOrParse
                                                                         : kExitValidationFailure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidationFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoOrParse;
    }
}

int cli_main(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("eftqdi");
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace eftqdi
