#pragma once

#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "apex/solvable.hpp"
#include "config.hpp"

namespace apex::runner {

/// Numeric CSV table; cells are written with 17 significant digits.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string to_csv(const Table& table);

/// Writes through a sibling temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct ScenarioOutcome {
  std::vector<std::pair<Report, Table>> reports;
  std::optional<Certificate> certificate;
  double final_error = 0.0;   // op_distance(oracle(T), order-N product at T)
  double residual = 0.0;      // sup ||H^(N+1)||
  double oracle_error = 0.0;
};

struct PreparedField {
  SpinRep rep;
  FieldCurve field;
  TimeGrid grid{std::vector<double>{0.0, 1.0}};
};

/// Spin representation, validated level-0 field and grid of a scenario.
PreparedField prepare_field(const ScenarioConfig& config);

ScenarioOutcome run_scenario(const ScenarioConfig& config);

/// Writes <out>/<report>.csv for every report in the outcome.
void write_reports(const ScenarioOutcome& outcome, const std::filesystem::path& out);

enum class SweepParam { OmegaP, B, Points, Order };

SweepParam parse_sweep_param(const std::string& name);

/// Parses "0,1,2" (commas and/or whitespace).  Empty lists are rejected.
std::vector<double> parse_values(const std::string& list);

/// One row per value, in input order: value, final_error, residual,
/// oracle_error, wall_time_s.  Failures propagate from the offending run.
Table sweep(const ScenarioConfig& base, SweepParam param, const std::vector<double>& values);

/// Applies a sweep value to a copy of `base` (validated).
ScenarioConfig with_param(const ScenarioConfig& base, SweepParam param, double value);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int degeneracy = 3;
inline constexpr int convergence = 4;
inline constexpr int certificate = 5;
inline constexpr int numerical = 6;
inline constexpr int internal = 1;
}  // namespace exit_code

int exit_code_for(const std::exception& e);

/// `apex: error code=<n> kind=<kind> [field=<key>] message="<text>"` on one line.
std::string diagnostic(const std::exception& e);

}  // namespace apex::runner
