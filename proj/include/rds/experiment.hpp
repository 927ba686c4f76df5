#pragma once

#include "rds/analysis.hpp"
#include "rds/conditionals.hpp"
#include "rds/dynamics.hpp"
#include "rds/io.hpp"
#include "rds/trace.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rds {

struct GeneratorConfig {
    std::string preset;  ///< informational; the fields below are authoritative
    std::vector<double> map;
    std::vector<NoiseComponent> noise;
    double x0 = 1.0;
    std::size_t n = 200;
    std::size_t holdout = 20;
    std::uint64_t seed = 1;

    bool operator==(const GeneratorConfig&) const = default;
};

struct FitConfig {
    Algorithm algorithm = Algorithm::gsbr;
    PriorSpec prior;
    SamplerSettings sampler;
    std::vector<std::uint64_t> seeds{1};

    bool operator==(const FitConfig&) const = default;
};

struct AnalysisConfig {
    /// Empty: scaled to the trace length (see EstimatorConfig::for_length).
    std::optional<EstimatorConfig> sm;
    std::size_t map_bins = 300;
    double map_lo = -2.0;
    double map_hi = 2.0;
    std::size_t kde_points = 401;
    double noise_lo = -1.0;
    double noise_hi = 1.0;
    double state_lo = -2.2;
    double state_hi = 2.2;
    std::optional<double> bandwidth;
    std::size_t quasi_invariant_length = 1'000'000;
    std::uint64_t quasi_invariant_seed = 2024;
    std::vector<std::size_t> ppm_horizons{1, 5, 10, 15, 20};

    bool operator==(const AnalysisConfig&) const = default;
};

struct ExperimentConfig {
    std::optional<GeneratorConfig> generator;
    std::optional<std::string> dataset;  ///< existing dataset CSV, alternative to the generator
    FitConfig fit;
    AnalysisConfig analysis;
    std::string output = ".";

    bool operator==(const ExperimentConfig&) const = default;

    /// Throws ValidationError naming the offending field path.
    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Built-in generators: cubic-f1, cubic-f2l1..cubic-f2l4, logistic-f24.
GeneratorConfig preset_generator(const std::string& name);
std::vector<std::string> preset_names();
/// "PS_NRP" / "PS_IRP".
PriorSpec prior_preset(const std::string& name);

TimeSeriesDataset generate(const GeneratorConfig& g);

/// Coefficients of the true map padded or cut to degree + 1 terms.
std::vector<double> padded_truth(const PolynomialMap& map, int degree);

/// SM blocks sized to the trace: K = 47, N = floor(length / (47 * 1.05)), s = N / 20.
EstimatorConfig sm_for_length(std::size_t length);

struct ThetaRow {
    int j;
    double truth;
    double sm;
    double mean;
    double sd;
    PareValue pare;
};
std::vector<ThetaRow> theta_report(const ChainTrace& trace, std::span<const double> truth, const EstimatorConfig& sm);

/// Mean of the row PAREs over nonzero-truth coefficients.
double average_nonzero_pare(const std::vector<ThetaRow>& rows);

struct PredictionRow {
    std::size_t j;
    double truth;
    double sm;
    double map;
    double pare_sm;
    double pare_map;
};
/// x_{n+1}..x_{n+count} against the holdout.
std::vector<PredictionRow> prediction_report(const ChainTrace& trace, std::span<const double> holdout,
                                             const EstimatorConfig& sm, const AnalysisConfig& a, std::size_t count = 5);

struct RunResult {
    std::filesystem::path csv;
    ChainTrace trace;
};

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// Writes <output>/data.csv (+ sidecars) and returns its path.
std::filesystem::path cmd_generate(const ExperimentConfig& c);
/// Runs one chain per seed; traces land in <output>/<algorithm>_seed<k>.csv.
std::vector<RunResult> cmd_fit(const ExperimentConfig& c);
/// Report tables for each trace under <output>/report/<trace stem>/.
void cmd_analyze(const ExperimentConfig& c, const std::vector<std::filesystem::path>& traces,
                 const std::filesystem::path& dataset);

struct ReproduceOptions {
    bool full = false;
    std::optional<std::size_t> iterations;  ///< overrides both defaults
    std::uint64_t seed = 1;
};
std::vector<std::string> reproduce_ids();
/// Generate, fit and analyze one bundled experiment under root/<id>/.
void cmd_reproduce(const std::string& id, const std::filesystem::path& root, const ReproduceOptions& opt);

/// $RDS_OUTPUT_ROOT, else ./rds-output.
std::filesystem::path default_output_root();

}  // namespace rds
