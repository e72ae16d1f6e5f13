#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace apex::runner {

namespace {

using Path = std::string;

double number(const YAML::Node& node, const Path& key) {
  if (!node || !node.IsScalar()) throw ConfigError(key, "expected a number");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "expected a number, got '" + node.Scalar() + "'");
  }
}

double angle(const YAML::Node& node, const Path& key) {
  if (!node || !node.IsScalar()) throw ConfigError(key, "expected an angle");
  try {
    return parse_angle(node.Scalar());
  } catch (const std::invalid_argument&) {
    throw ConfigError(key, "expected an angle such as 1.05 or pi/3, got '" + node.Scalar() + "'");
  }
}

long integer(const YAML::Node& node, const Path& key) {
  const double v = number(node, key);
  if (v != std::floor(v)) throw ConfigError(key, "expected an integer");
  return static_cast<long>(v);
}

std::string text(const YAML::Node& node, const Path& key) {
  if (!node || !node.IsScalar()) throw ConfigError(key, "expected a string");
  return node.Scalar();
}

// Rejects keys outside `allowed` so typos do not silently fall back to defaults.
void only_keys(const YAML::Node& map, const Path& where, std::set<std::string> allowed) {
  if (!map.IsMap()) throw ConfigError(where.empty() ? "<root>" : where, "expected a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.Scalar();
    if (!allowed.count(key)) {
      throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

double optional_angle(const YAML::Node& map, const char* key, const Path& where, double fallback) {
  return map[key] ? angle(map[key], where + "." + key) : fallback;
}

FieldSpec parse_field(const YAML::Node& node, const std::filesystem::path& base_dir) {
  if (!node) throw ConfigError("field", "missing");
  if (!node.IsMap()) throw ConfigError("field", "expected a mapping");
  const std::string kind = text(node["kind"], "field.kind");
  if (kind == "precession") {
    only_keys(node, "field", {"kind", "r", "theta0", "omega", "phi0"});
    PrecessionField f;
    f.r = number(node["r"], "field.r");
    f.theta0 = angle(node["theta0"], "field.theta0");
    f.omega = number(node["omega"], "field.omega");
    f.phi0 = optional_angle(node, "phi0", "field", 0.0);
    return f;
  }
  if (kind == "solvable") {
    only_keys(node, "field", {"kind", "theta", "omega", "phi0", "radius_scale"});
    SolvableField f;
    const auto th = node["theta"];
    if (!th || !th.IsMap()) throw ConfigError("field.theta", "expected a mapping");
    const std::string shape = text(th["shape"], "field.theta.shape");
    if (shape == "constant") {
      only_keys(th, "field.theta", {"shape", "theta0"});
      f.shape = SolvableField::Shape::Constant;
    } else if (shape == "sinusoidal") {
      only_keys(th, "field.theta", {"shape", "theta0", "epsilon"});
      f.shape = SolvableField::Shape::Sinusoidal;
      f.epsilon = number(th["epsilon"], "field.theta.epsilon");
    } else {
      throw ConfigError("field.theta.shape", "expected constant or sinusoidal, got '" + shape + "'");
    }
    f.theta0 = angle(th["theta0"], "field.theta.theta0");
    f.omega = number(node["omega"], "field.omega");
    f.phi0 = optional_angle(node, "phi0", "field", 0.0);
    if (node["radius_scale"]) f.radius_scale = number(node["radius_scale"], "field.radius_scale");
    return f;
  }
  if (kind == "sampled") {
    only_keys(node, "field", {"kind", "path"});
    std::filesystem::path p = text(node["path"], "field.path");
    if (p.is_relative()) p = base_dir / p;
    return SampledField{p};
  }
  throw ConfigError("field.kind", "expected precession, solvable or sampled, got '" + kind + "'");
}

}  // namespace

const char* report_name(Report r) {
  switch (r) {
    case Report::Fidelity: return "fidelity";
    case Report::Residuals: return "residuals";
    case Report::Phases: return "phases";
    case Report::Certificate: return "certificate";
  }
  return "?";
}

double parse_angle(const std::string& raw) {
  std::string s;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  const auto to_double = [&raw](const std::string& part) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument(raw);
    }
    if (used != part.size()) throw std::invalid_argument(raw);
    return v;
  };
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return to_double(s);
  double value = std::numbers::pi;
  std::string head = s.substr(0, pos);
  std::string tail = s.substr(pos + 2);
  if (!head.empty()) {
    if (head == "-") {
      value = -value;
    } else {
      if (head.back() == '*') head.pop_back();
      value *= to_double(head);
    }
  }
  if (!tail.empty()) {
    if (tail.front() != '/') throw std::invalid_argument(raw);
    value /= to_double(tail.substr(1));
  }
  return value;
}

void validate(const ScenarioConfig& c) {
  const double twice = 2.0 * c.j;
  if (!(c.j > 0.0) || std::abs(twice - std::round(twice)) > 1e-12 || c.j > 8.0) {
    throw ConfigError("j", "must be a positive half-integer no larger than 8");
  }
  if (!(c.b > 0.0) || !std::isfinite(c.b)) throw ConfigError("b", "must be positive");
  if (c.order < 0 || c.order > 4) {
    throw ConfigError("order", "must be in 0..4, got " + std::to_string(c.order));
  }
  if (!(c.oracle_tol >= 1e-12 && c.oracle_tol <= 1e-3)) {
    throw ConfigError("oracle_tol", "must lie in [1e-12, 1e-3]");
  }
  if (!(c.certificate_tol > 0.0)) throw ConfigError("certificate_tol", "must be positive");
  const bool sampled = std::holds_alternative<SampledField>(c.field);
  if (!sampled && (!c.duration || !c.points)) throw ConfigError("grid", "T and points required");
  if (c.duration && !(*c.duration > 0.0)) throw ConfigError("grid.T", "must be positive");
  if (c.points && *c.points < 16) throw ConfigError("grid.points", "must be at least 16");
  if (c.points && *c.points > (1u << 16)) throw ConfigError("grid.points", "at most 65536");
  if (const auto* p = std::get_if<PrecessionField>(&c.field)) {
    if (!(p->r > 0.0)) throw ConfigError("field.r", "must be positive");
  }
  if (const auto* s = std::get_if<SolvableField>(&c.field)) {
    if (!(s->omega > 0.0)) throw ConfigError("field.omega", "must be positive");
    if (!(s->radius_scale > 0.0)) throw ConfigError("field.radius_scale", "must be positive");
  }
  if (c.outputs.empty()) throw ConfigError("outputs", "at least one report required");
}

ScenarioConfig parse_config(const std::string& source, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(source);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<yaml>", e.msg + " at line " + std::to_string(e.mark.line + 1));
  }
  if (!root || !root.IsMap()) throw ConfigError("<root>", "expected a mapping");
  only_keys(root, "", {"name", "model", "j", "b", "field", "grid", "order", "oracle_tol",
                       "certificate_tol", "gauge", "outputs"});

  ScenarioConfig c;
  c.name = root["name"] ? text(root["name"], "name") : "scenario";
  const std::string model = root["model"] ? text(root["model"], "model") : "spin";
  if (model != "spin") throw ConfigError("model", "only 'spin' is supported, got '" + model + "'");
  c.j = number(root["j"], "j");
  c.b = number(root["b"], "b");
  c.field = parse_field(root["field"], base_dir);
  if (const auto g = root["grid"]) {
    only_keys(g, "grid", {"T", "points"});
    c.duration = angle(g["T"], "grid.T");
    const long pts = integer(g["points"], "grid.points");
    if (pts < 0) throw ConfigError("grid.points", "must be at least 16");
    c.points = static_cast<std::size_t>(pts);
  }
  c.order = static_cast<int>(integer(root["order"], "order"));
  if (root["oracle_tol"]) c.oracle_tol = number(root["oracle_tol"], "oracle_tol");
  if (root["certificate_tol"]) c.certificate_tol = number(root["certificate_tol"], "certificate_tol");
  if (root["gauge"]) {
    const std::string g = text(root["gauge"], "gauge");
    if (g == "positive_overlap") {
      c.gauge = GaugePolicy::PositiveOverlap;
    } else if (g == "first_component_real") {
      c.gauge = GaugePolicy::FirstComponentReal;
    } else {
      throw ConfigError("gauge", "expected positive_overlap or first_component_real");
    }
  }
  const auto outs = root["outputs"];
  if (!outs || !outs.IsSequence()) throw ConfigError("outputs", "expected a list");
  std::set<Report> seen;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const std::string key = "outputs[" + std::to_string(i) + "]";
    const std::string kind = text(outs[i], key);
    Report r;
    if (kind == "fidelity") r = Report::Fidelity;
    else if (kind == "residuals") r = Report::Residuals;
    else if (kind == "phases") r = Report::Phases;
    else if (kind == "certificate") r = Report::Certificate;
    else throw ConfigError(key, "unknown report '" + kind + "'");
    if (seen.insert(r).second) c.outputs.push_back(r);
  }
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

}  // namespace apex::runner
