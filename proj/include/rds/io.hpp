#pragma once

#include "rds/conditionals.hpp"
#include "rds/dynamics.hpp"
#include "rds/trace.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace rds {

namespace fs = std::filesystem;

/// Sidecar paths: foo.csv -> foo.json and foo_holdout.csv.
fs::path metadata_path(const fs::path& csv);
fs::path holdout_path(const fs::path& csv);

nlohmann::json to_json(const PriorSpec& prior);
PriorSpec prior_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GaussianMixtureNoise& noise);
GaussianMixtureNoise noise_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RejectionCounters& c);

/// `index,x` CSV, the holdout CSV when present, and a JSON sidecar.
void write_dataset(const fs::path& csv, const TimeSeriesDataset& data);
/// Reads the CSV plus whichever sidecars exist.
TimeSeriesDataset read_dataset(const fs::path& csv);

/// One row per record: iter, theta_0..theta_m, x0, p|c|lambda,
/// x_future_1..x_future_T, z_pred, n_star, d_star. The sidecar carries run
/// settings, timings and rejection counters merged with `extra`.
void write_trace(const fs::path& csv, const ChainTrace& trace, const nlohmann::json& extra = {});
ChainTrace read_trace(const fs::path& csv);
nlohmann::json read_metadata(const fs::path& csv);

/// `grid,mass` CSV.
void write_density(const fs::path& csv, const EmpiricalDensity& density);
EmpiricalDensity read_density(const fs::path& csv);

/// Plain CSV table: header row then rows of cells.
void write_table(const fs::path& csv, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

}  // namespace rds
