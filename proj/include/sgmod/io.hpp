#pragma once

#include "sgmod/capacity_analysis.hpp"
#include "sgmod/density_evolution.hpp"
#include "sgmod/link_sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgmod {

/// File could not be written or read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits; infinities as "inf" / "-inf", NaN as "nan".
std::string format_double(double v);

/// Inverse of format_double. Throws IoError on malformed text.
double parse_double(const std::string& text);

/// JSON number, or the string "inf" / "-inf" / "nan" for non-finite values.
nlohmann::json json_double(double v);
double json_to_double(const nlohmann::json& j);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

/// Minimal CSV: header row plus data rows, comma separated, no quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};
std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

// Density evolution: one row per (iteration, grid point).
CsvTable de_trajectory_table(const DeTrajectory& trajectory);
nlohmann::json de_summary_json(const DeTrajectory& trajectory);
nlohmann::json de_trajectory_json(const DeTrajectory& trajectory);

// Spectral-efficiency curves, rows sorted by (receiver, alpha, ebn0_db).
CsvTable curve_table_csv(const CurveTable& table);
nlohmann::json curve_table_json(const CurveTable& table);
CurveTable parse_curve_csv(const std::string& text);

// Link simulation.
nlohmann::json link_sim_config_json(const LinkSimConfig& config);
nlohmann::json link_sim_json(const LinkSimResult& result);
CsvTable de_comparison_table(const DeComparison& comparison);
nlohmann::json de_comparison_json(const DeComparison& comparison);

}  // namespace sgmod
