#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

#include "apex/expansion.hpp"
#include "apex/propagator.hpp"
#include "apex/spin_model.hpp"

namespace apex::runner {

namespace fs = std::filesystem;

namespace {

std::string cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string label(double n) {
  // Magnetic numbers as -1/2, 0, +1 ...
  const long twice = std::lround(2.0 * n);
  std::string s = twice > 0 ? "+" : (twice < 0 ? "-" : "");
  const long a = std::labs(twice);
  s += a % 2 ? std::to_string(a) + "/2" : std::to_string(a / 2);
  return s;
}

}  // namespace

PreparedField prepare_field(const ScenarioConfig& c) {
  PreparedField p;
  p.rep = spin_matrices(c.j);
  if (const auto* s = std::get_if<SampledField>(&c.field)) {
    std::ifstream in(s->path);
    if (!in) throw ConfigError("field.path", "cannot read " + s->path.string());
    TimeGrid file_grid{std::vector<double>{0.0, 1.0}};
    p.field = read_field_profile(in, c.b, &file_grid);
    p.grid = file_grid;
    if (c.duration && c.points) {
      if (*c.duration > file_grid.back() * (1.0 + 1e-12)) {
        throw ConfigError("grid.T", "exceeds the time span of the sampled profile");
      }
      p.grid = TimeGrid::uniform(std::min(*c.duration, file_grid.back()), *c.points);
    }
  } else {
    p.grid = TimeGrid::uniform(*c.duration, *c.points);
    if (const auto* f = std::get_if<PrecessionField>(&c.field)) {
      p.field = FieldCurve::precession(c.b, f->r, f->theta0, f->omega, f->phi0);
    } else {
      const auto& s = std::get<SolvableField>(c.field);
      const AngleProfile shape = s.shape == SolvableField::Shape::Constant
                                     ? AngleProfile::constant(s.theta0)
                                     : AngleProfile::sinusoidal(s.theta0, s.epsilon);
      auto profile = solvable_radius(shape, PhaseSchedule::linear(s.omega, s.phi0), c.b, p.grid);
      if (s.radius_scale != 1.0) profile = scale_radius(profile, s.radius_scale, p.grid);
      p.field = profile.generated;
    }
  }
  p.field.validate(p.grid);
  return p;
}

namespace {

// Samples of H^(i) on the grid, zeros past an exact truncation.
std::vector<ComplexMatrix> level_samples(const ExpansionChain& chain, int i, int dim) {
  const int count = static_cast<int>(chain.levels.size());
  if (i < count) return chain.levels[static_cast<std::size_t>(i)].samples;
  if (i == count && !chain.residual_samples.empty()) return chain.residual_samples;
  return std::vector<ComplexMatrix>(chain.grid.size(), ComplexMatrix::Zero(dim, dim));
}

Table fidelity_table(const ExpansionChain& chain, const PropagatorResult& oracle, int order) {
  Table t;
  t.header.push_back("t");
  for (int n = 0; n <= order; ++n) t.header.push_back("err_N" + std::to_string(n));
  for (std::size_t k = 0; k < chain.grid.size(); ++k) {
    std::vector<double> row{chain.grid[k]};
    for (int n = 0; n <= order; ++n) {
      const ComplexMatrix u = product_approximation(chain, k, std::min(n, chain.order()));
      row.push_back(op_distance(oracle.unitaries[k], u));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table residuals_table(const ExpansionChain& chain, const PropagatorResult& oracle, int order,
                      int dim) {
  Table t;
  t.header.push_back("t");
  std::vector<std::vector<ComplexMatrix>> hs;
  for (int i = 0; i <= order + 1; ++i) {
    t.header.push_back("norm_H" + std::to_string(i));
    hs.push_back(level_samples(chain, i, dim));
  }
  for (int i = 0; i <= order + 1; ++i) t.header.push_back("herm_H" + std::to_string(i));
  for (int i = 0; i <= order; ++i) t.header.push_back("udef_U" + std::to_string(i));
  t.header.push_back("udef_product");
  t.header.push_back("udef_oracle");
  for (std::size_t k = 0; k < chain.grid.size(); ++k) {
    std::vector<double> row{chain.grid[k]};
    for (const auto& h : hs) row.push_back(h[k].norm());
    for (const auto& h : hs) row.push_back(hermiticity_defect(h[k]));
    for (int i = 0; i <= order; ++i) {
      row.push_back(i <= chain.order()
                        ? unitarity_defect(chain.levels[static_cast<std::size_t>(i)].factors[k])
                        : 0.0);
    }
    row.push_back(unitarity_defect(product_approximation(chain, k)));
    row.push_back(unitarity_defect(oracle.unitaries[k]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table phases_table(const ExpansionChain& chain, const SpinRep& rep, int order) {
  Table t;
  t.header.push_back("t");
  for (int i = 0; i <= order; ++i) {
    for (const char* kind : {"delta", "gamma", "alpha"}) {
      for (int a = 0; a < rep.dim; ++a) {
        t.header.push_back(std::string(kind) + "_L" + std::to_string(i) + "_n" +
                           label(rep.magnetic(a)));
      }
    }
  }
  for (std::size_t k = 0; k < chain.grid.size(); ++k) {
    std::vector<double> row{chain.grid[k]};
    for (int i = 0; i <= order; ++i) {
      const EigenFrame* f =
          i <= chain.order() ? &chain.levels[static_cast<std::size_t>(i)].frame : nullptr;
      using Column = std::vector<RealVector> EigenFrame::*;
      for (Column phases : {&EigenFrame::dynamical_phase, &EigenFrame::geometric_phase,
                            &EigenFrame::total_phase}) {
        for (int a = 0; a < rep.dim; ++a) row.push_back(f ? (f->*phases)[k](a) : 0.0);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table certificate_table(const Certificate& c) {
  Table t;
  t.header = {"granted",      "tolerance",    "residual",     "residual_bound",
              "final_distance", "max_distance", "oracle_error", "sigma_rate_max",
              "chain_levels", "chain_exact"};
  t.rows.push_back({c.granted ? 1.0 : 0.0, c.tolerance, c.residual, c.residual_bound,
                    c.final_distance, c.max_distance, c.oracle_error, c.sigma_rate_max,
                    static_cast<double>(c.chain_levels), c.chain_exact ? 1.0 : 0.0});
  return t;
}

ExpansionOptions expansion_options(const ScenarioConfig& c) {
  ExpansionOptions o;
  o.frame.gauge = c.gauge;
  return o;
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out += (i ? "," : "") + table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell(row[i]);
    out += '\n';
  }
  return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

ScenarioOutcome run_scenario(const ScenarioConfig& config) {
  validate(config);
  const PreparedField p = prepare_field(config);
  const auto options = expansion_options(config);
  const auto source = dipole_source(p.rep, p.field);
  const auto chain = expand(source, p.grid, config.order, options);
  const auto oracle = propagate(source, p.grid, config.oracle_tol);

  ScenarioOutcome out;
  const std::size_t last = p.grid.size() - 1;
  out.final_error = op_distance(oracle.unitaries[last], product_approximation(chain, last));
  out.residual = chain.residual;
  out.oracle_error = oracle.error_estimate;
  for (Report r : config.outputs) {
    switch (r) {
      case Report::Fidelity:
        out.reports.emplace_back(r, fidelity_table(chain, oracle, config.order));
        break;
      case Report::Residuals:
        out.reports.emplace_back(r, residuals_table(chain, oracle, config.order, p.rep.dim));
        break;
      case Report::Phases:
        out.reports.emplace_back(r, phases_table(chain, p.rep, config.order));
        break;
      case Report::Certificate: {
        CertifyOptions co;
        co.oracle_tolerance = config.oracle_tol;
        co.expansion = options;
        out.certificate = certify_field(p.field, p.rep, p.grid, config.certificate_tol, co);
        out.reports.emplace_back(r, certificate_table(*out.certificate));
        break;
      }
    }
  }
  return out;
}

void write_reports(const ScenarioOutcome& outcome, const fs::path& out) {
  for (const auto& [kind, table] : outcome.reports) {
    write_atomic(out / (std::string(report_name(kind)) + ".csv"), to_csv(table));
  }
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "omega_p") return SweepParam::OmegaP;
  if (name == "b") return SweepParam::B;
  if (name == "points") return SweepParam::Points;
  if (name == "N") return SweepParam::Order;
  throw ConfigError("--param", "expected omega_p, b, points or N, got '" + name + "'");
}

std::vector<double> parse_values(const std::string& list) {
  std::string s = list;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw ConfigError("--values", "not a number: '" + token + "'");
    values.push_back(v);
  }
  if (values.empty()) throw ConfigError("--values", "empty value list");
  return values;
}

ScenarioConfig with_param(const ScenarioConfig& base, SweepParam param, double value) {
  ScenarioConfig c = base;
  const auto integral = [value](const char* key) {
    if (value != std::floor(value)) throw ConfigError(key, "sweep value must be an integer");
    return static_cast<long>(value);
  };
  switch (param) {
    case SweepParam::OmegaP:
      if (auto* f = std::get_if<PrecessionField>(&c.field)) {
        f->omega = value;
      } else if (auto* s = std::get_if<SolvableField>(&c.field)) {
        s->omega = value;
      } else {
        throw ConfigError("--param", "omega_p does not apply to sampled fields");
      }
      break;
    case SweepParam::B:
      c.b = value;
      break;
    case SweepParam::Points: {
      if (std::holds_alternative<SampledField>(c.field) && !c.duration) {
        throw ConfigError("--param", "points needs a grid section for sampled fields");
      }
      const long n = integral("grid.points");
      if (n < 0) throw ConfigError("grid.points", "must be at least 16");
      c.points = static_cast<std::size_t>(n);
      break;
    }
    case SweepParam::Order:
      c.order = static_cast<int>(integral("order"));
      break;
  }
  validate(c);
  return c;
}

Table sweep(const ScenarioConfig& base, SweepParam param, const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("--values", "empty value list");
  std::vector<ScenarioConfig> runs;
  for (double v : values) runs.push_back(with_param(base, param, v));
  Table t;
  t.header = {"value", "final_error", "residual", "oracle_error", "wall_time_s"};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    ScenarioConfig c = runs[i];
    c.outputs = {Report::Fidelity};
    const auto start = std::chrono::steady_clock::now();
    const auto out = run_scenario(c);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    t.rows.push_back({values[i], out.final_error, out.residual, out.oracle_error, wall});
  }
  return t;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return exit_code::config;
  if (dynamic_cast<const DegeneracyError*>(&e) || dynamic_cast<const TrackingError*>(&e)) {
    return exit_code::degeneracy;
  }
  if (dynamic_cast<const ConvergenceError*>(&e)) return exit_code::convergence;
  if (dynamic_cast<const Error*>(&e)) return exit_code::numerical;
  return exit_code::internal;
}

std::string diagnostic(const std::exception& e) {
  std::string kind = "internal";
  if (const auto* err = dynamic_cast<const Error*>(&e)) kind = err->kind();
  std::string msg = e.what();
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
    if (c == '"') c = '\'';
  }
  std::string line = "apex: error code=" + std::to_string(exit_code_for(e)) + " kind=" + kind;
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) line += " field=" + ce->field();
  return line + " message=\"" + msg + "\"";
}

}  // namespace apex::runner
