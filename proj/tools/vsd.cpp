#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "vsd/errors.hpp"
#include "vsd/experiment.hpp"
#include "vsd/io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kValidationFailure = 2;

vsd::ExperimentConfig load(const std::string& path, const std::optional<std::uint64_t>& seed) {
    vsd::ExperimentConfig cfg = vsd::load_config(path);
    if (seed) cfg.seed = *seed;
    return cfg;
}

int cmd_forward(const vsd::ExperimentConfig& cfg) {
    const auto dir = vsd::output_directory(cfg);
    vsd::run_forward(cfg, dir);
    std::cout << "forward: wrote " << (dir / "forward").string() << " and " << (dir / "data.csv").string() << "\n";
    return kOk;
}

int cmd_invert(const vsd::ExperimentConfig& cfg, const std::string& data_path) {
    std::optional<vsd::Observation> data;
    if (!data_path.empty()) data = vsd::read_observation_csv(vsd::make_setup(cfg), data_path);
    const vsd::InversionRun run = vsd::run_inversion(cfg, data);
    const auto dir = vsd::output_directory(cfg);
    vsd::write_inversion_artifacts(cfg, run, dir);
    const auto& last = run.result.history.back();
    std::cout << "invert: " << cfg.name << " stop=" << vsd::to_string(run.result.stop_reason)
              << " iterations=" << run.result.iterations << " residual=" << vsd::format_real(last.residual)
              << " delta_abs=" << vsd::format_real(run.result.delta_abs)
              << " rel_error=" << vsd::format_real(run.relative_error) << "\n";
    std::cout << "invert: wrote " << dir.string() << "\n";
    return kOk;
}

int cmd_oracle_check(const vsd::ExperimentConfig& cfg) {
    const auto rows = vsd::oracle_check(cfg);
    const auto dir = vsd::output_directory(cfg);
    vsd::write_oracle_csv(rows, dir / "oracle_check.csv");
    bool ok = true;
    for (const auto& r : rows) {
        std::cout << "mode (" << r.n << "," << r.m << ") lambda=" << vsd::format_real(r.lambda)
                  << " max_deviation=" << vsd::format_real(r.max_deviation) << " " << (r.pass ? "pass" : "fail") << "\n";
        ok = ok && r.pass;
    }
    std::cout << "oracle-check: wrote " << (dir / "oracle_check.csv").string() << "\n";
    return ok ? kOk : kRuntimeFailure;
}

int cmd_verify() {
    const auto items = vsd::run_verify();
    std::filesystem::path dir = "out/verify";
    if (const char* root = std::getenv("VSD_OUT"); root != nullptr && *root != '\0') dir = std::filesystem::path(root) / "verify";
    std::filesystem::create_directories(dir);
    std::ostringstream csv;
    csv << "check,value,threshold,verdict\n";
    int failed = 0;
    for (const auto& it : items) {
        std::cout << it.name << " = " << vsd::format_real(it.value) << " (threshold " << vsd::format_real(it.threshold)
                  << ") " << (it.pass ? "pass" : "fail") << "\n";
        csv << it.name << ',' << vsd::format_real(it.value) << ',' << vsd::format_real(it.threshold) << ','
            << (it.pass ? "pass" : "fail") << '\n';
        failed += it.pass ? 0 : 1;
    }
    std::ofstream out(dir / "verify.csv", std::ios::binary);
    out << csv.str();
    if (failed > 0) {
        std::cerr << "verify: " << failed << " check(s) failed\n";
        return kRuntimeFailure;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variable-exponent sub-diffusion: forward solves, oracle checks and source reconstruction"};
    app.require_subcommand(1);

    std::string config_path;
    std::string data_path;
    std::optional<std::uint64_t> seed;

    auto* forward = app.add_subcommand("forward", "solve the forward problem and write snapshots and noisy data");
    auto* invert = app.add_subcommand("invert", "reconstruct the source");
    auto* oracle = app.add_subcommand("oracle-check", "compare the grid solver with the spectral oracle mode by mode");
    auto* verify = app.add_subcommand("verify", "run the verification suite");
    for (auto* sub : {forward, invert, oracle}) {
        sub->add_option("--config", config_path, "experiment JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override the noise seed");
    }
    invert->add_option("--data", data_path, "observation CSV written by `forward`")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidationFailure;
    }

    try {
        if (verify->parsed()) return cmd_verify();
        const vsd::ExperimentConfig cfg = load(config_path, seed);
        if (forward->parsed()) return cmd_forward(cfg);
        if (invert->parsed()) return cmd_invert(cfg, data_path);
        return cmd_oracle_check(cfg);
    } catch (const vsd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
}
