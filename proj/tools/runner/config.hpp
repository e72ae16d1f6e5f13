#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "apex/errors.hpp"
#include "apex/spectral_frame.hpp"

namespace apex::runner {

/// Invalid scenario configuration.  `field()` names the offending key path.
class ConfigError : public ValidationError {
 public:
  ConfigError(std::string field, const std::string& what)
      : ValidationError(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }
  const char* kind() const noexcept override { return "config"; }

 private:
  std::string field_;
};

struct PrecessionField {
  double r = 1.0;
  double theta0 = 0.0;
  double omega = 1.0;
  double phi0 = 0.0;
};

struct SolvableField {
  enum class Shape { Constant, Sinusoidal };
  Shape shape = Shape::Constant;
  double theta0 = 0.0;
  double epsilon = 0.0;
  double omega = 1.0;
  double phi0 = 0.0;
  /// Multiplies the generated radius; 1 keeps the profile on the solvable manifold.
  double radius_scale = 1.0;
};

struct SampledField {
  std::filesystem::path path;
};

using FieldSpec = std::variant<PrecessionField, SolvableField, SampledField>;

enum class Report { Fidelity, Residuals, Phases, Certificate };

const char* report_name(Report r);

struct ScenarioConfig {
  std::string name;
  double j = 0.5;
  double b = 1.0;
  FieldSpec field;
  /// Optional for sampled fields, whose file supplies the grid.
  std::optional<double> duration;
  std::optional<std::size_t> points;
  int order = 0;
  double oracle_tol = 1e-9;
  double certificate_tol = 1e-6;
  GaugePolicy gauge = GaugePolicy::PositiveOverlap;
  std::vector<Report> outputs;
};

/// Parses and validates a YAML scenario.  Relative sample paths resolve
/// against `base_dir`.
ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

/// Re-checks the invariants (used after command-line overrides).
void validate(const ScenarioConfig& config);

/// Reads "pi/3", "2*pi", "0.5 pi" or a plain number.
double parse_angle(const std::string& text);

}  // namespace apex::runner
