#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vsd/grid.hpp"
#include "vsd/inversion.hpp"
#include "vsd/timestep.hpp"

namespace vsd {

/// Analytic source in one of two forms:
///   sines: constant + sum amp sin(n pi x) sin(m pi y)
///   discs: sum of height * indicator of the closed disc
struct SourceFormula {
    enum class Kind { sines, discs };
    struct SineTerm {
        double amplitude;
        int n;
        int m;
    };
    struct Disc {
        double cx, cy, radius, height;
    };

    Kind kind = Kind::sines;
    double constant = 0.0;
    std::vector<SineTerm> terms;
    std::vector<Disc> discs;

    double operator()(double x, double y) const;
    GridField sample(const Grid2D& grid) const;
};

enum class Algorithm { thresholding, tpg };

struct OracleCheckSettings {
    int modes = 40;         // oracle truncation M
    int report_modes = 3;   // rows (n, m) with n, m <= this go into the report
    int fine_steps = 4000;
    double tolerance = 1e-2;
};

struct ExperimentConfig {
    std::string name;
    double a0 = 0.5;
    double slope = 0.25;
    double T = 1.0;
    int N = 50;
    int Nt = 100;
    PowerBeta beta{};
    SourceFormula truth;
    SourceFormula initial;
    Box box{0.3, 0.7, 0.3, 0.7};
    TimeMeasure measure = TimeMeasure::sample;
    double delta = 0.0;
    std::uint64_t seed = 1;
    int data_refine = 2;
    Algorithm algorithm = Algorithm::thresholding;
    InversionConfig inversion{};
    double lambda_shift = 5.0;  // lambda_n = n / (n + shift)
    std::string output_dir = "out";
    int snapshot_stride = 10;
    OracleCheckSettings oracle{};
};

/// Strict parse: every key is required and unknown keys are rejected. Errors are
/// ConfigError with the JSON path of the offending field (e.g. "noise.delta").
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON of a config; parse_config(config_to_json(c)) reproduces c.
std::string config_to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 of the text, as 16 hex digits.
std::string content_hash(const std::string& text);

InversionSetup make_setup(const ExperimentConfig& cfg);

/// Noise-free data: the truth is solved on the grid refined by cfg.data_refine
/// in space and time and sampled at the inversion grid's observation nodes.
Observation synthesize_clean_data(const ExperimentConfig& cfg, const InversionSetup& setup);

struct InversionRun {
    ReconstructionResult result;
    GridField truth;
    double relative_error = 0.0;
    double data_norm = 0.0;  // ||g|| of the clean data when known, else of the given data
    bool data_from_file = false;
};

/// Generates data (or uses `data`), runs the configured algorithm. With file
/// data the clean norm is unknown and delta_abs = delta ||g_delta||.
InversionRun run_inversion(const ExperimentConfig& cfg, const std::optional<Observation>& data = std::nullopt);

/// Resolved output directory: $VSD_OUT/<name> when VSD_OUT is set, else cfg.output_dir.
std::filesystem::path output_directory(const ExperimentConfig& cfg);

/// Writes reconstruction.csv, truth.csv, log.csv and metadata.json.
void write_inversion_artifacts(const ExperimentConfig& cfg, const InversionRun& run, const std::filesystem::path& dir);

/// Forward solve of the truth on the inversion grid (snapshots) and the noisy
/// observation file data.csv that `invert --data` reads back.
void run_forward(const ExperimentConfig& cfg, const std::filesystem::path& dir);

struct OracleRow {
    int n;
    int m;
    double lambda;
    double max_deviation;  // max over t_k of |c_grid - c_oracle| / max_t |c_oracle(1,1)|
    bool pass;
};

/// Mode-by-mode comparison of the grid forward solution of the truth source
/// with the spectral oracle.
std::vector<OracleRow> oracle_check(const ExperimentConfig& cfg);
void write_oracle_csv(const std::vector<OracleRow>& rows, const std::filesystem::path& path);

/// Smooth random pair for duality checks: f from modes n, m <= 3, omega from
/// modes n, m <= 2 times cos(p pi t / T), p <= 2, with N(0,1) amplitudes.
std::pair<GridField, Observation> random_smooth_pair(const InversionSetup& setup, std::uint64_t seed);

struct VerifyItem {
    std::string name;
    double value;
    double threshold;
    bool pass;
};

/// Kernel bounds, oracle agreement, adjoint duality and Duhamel consistency
/// at the module-test settings.
std::vector<VerifyItem> run_verify();

}  // namespace vsd
