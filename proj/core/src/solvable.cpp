#include "apex/solvable.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <cstdio>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>

#include "apex/errors.hpp"
#include "apex/propagator.hpp"

namespace apex {

namespace {

constexpr double kAngleStep = 1e-4;
// Sub-intervals per grid cell scanned for interior extrema of the radius spline.
constexpr int kExtremumScan = 16;

std::function<double(double)> derive(const std::function<double(double)>& f) {
  return [f](double x) { return numeric_derivative(f, x, kAngleStep); };
}

AngleProfile completed(AngleProfile p) {
  if (!p.theta) throw ValidationError("AngleProfile: theta(phi) required");
  if (!p.dtheta) p.dtheta = derive(p.theta);
  if (!p.d2theta) p.d2theta = derive(p.dtheta);
  return p;
}

PhaseSchedule completed(PhaseSchedule p) {
  if (!p.phi) throw ValidationError("PhaseSchedule: phi(t) required");
  if (!p.phi_dot) p.phi_dot = derive(p.phi);
  if (!p.phi_ddot) p.phi_ddot = derive(p.phi_dot);
  return p;
}

// Smallest value of the spline through `r` on each cell, including interior
// extrema located by a sign change of the spline slope.
struct Dip {
  double value = std::numeric_limits<double>::infinity();
  double time = 0.0;
  std::size_t cell = 0;
};

Dip lowest_point(const TimeGrid& grid, const std::vector<double>& r) {
  const CubicSpline<double> spline(std::vector<double>(grid.times().begin(), grid.times().end()),
                                   r);
  Dip dip;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (r[k] < dip.value) dip = {r[k], grid[k], k == 0 ? 0 : k - 1};
  }
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double h = grid.step(k) / kExtremumScan;
    double a = grid[k];
    double da = spline.derivative(a);
    for (int s = 1; s <= kExtremumScan; ++s) {
      double c = grid[k] + s * h;
      const double dc = spline.derivative(c);
      if (da < 0.0 && dc > 0.0) {
        double lo = a, hi = c;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (spline.derivative(mid) < 0.0 ? lo : hi) = mid;
        }
        const double t = 0.5 * (lo + hi);
        const double v = spline(t);
        if (v < dip.value) dip = {v, t, k};
      }
      a = c;
      da = dc;
    }
  }
  return dip;
}

void require_positive(const TimeGrid& grid, const std::vector<double>& r) {
  const Dip dip = lowest_point(grid, r);
  if (dip.value > 0.0) return;
  // Report the maximal run of grid cells around the dip where r <= 0.
  std::size_t lo = dip.cell, hi = std::min(dip.cell + 1, grid.size() - 1);
  while (lo > 0 && r[lo] <= 0.0) --lo;
  while (hi + 1 < grid.size() && r[hi] <= 0.0) ++hi;
  std::ostringstream msg;
  msg << "solvable profile: r(t) = " << dip.value << " <= 0 at t=" << dip.time
      << "; infeasible on [" << grid[lo] << ", " << grid[hi] << "]";
  throw InfeasibleProfileError(msg.str(), grid[lo], grid[hi]);
}

FieldCurve generate(const AngleProfile& th, const PhaseSchedule& ph, double b, double scale) {
  FieldCurve::Functions f;
  f.phi = ph.phi;
  f.phi_dot = ph.phi_dot;
  f.theta = [th, ph](double t) { return th.theta(ph.phi(t)); };
  f.theta_dot = [th, ph](double t) { return th.dtheta(ph.phi(t)) * ph.phi_dot(t); };
  f.r = [th, ph, b, scale](double t) {
    const double p = ph.phi(t);
    const double s = std::sin(th.theta(p)), c = std::cos(th.theta(p));
    const double d1 = th.dtheta(p), d2 = th.d2theta(p);
    const double g = d1 / s;
    const double g_prime = (d2 * s - d1 * d1 * c) / (s * s);
    return scale * (ph.phi_dot(t) / b) * (c - g_prime / (1.0 + g * g));
  };
  return FieldCurve(b, std::move(f), 0);
}

SolvableProfile build(const AngleProfile& theta_of_phi, const PhaseSchedule& phi_of_t, double b,
                      double scale, const TimeGrid& grid) {
  if (!(b > 0.0)) throw ValidationError("solvable_radius: b must be positive");
  SolvableProfile p;
  p.theta_of_phi = completed(theta_of_phi);
  p.phi_of_t = completed(phi_of_t);
  p.b = b;
  p.radius_scale = scale;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    if (!(p.phi_of_t.phi_dot(t) > 0.0)) {
      std::ostringstream msg;
      msg << "solvable_radius: phi_dot must be positive, got " << p.phi_of_t.phi_dot(t)
          << " at t=" << t;
      throw ValidationError(msg.str());
    }
    const double th = p.theta_of_phi.theta(p.phi_of_t.phi(t));
    if (!(std::sin(th) > 1e-12) || th >= std::numbers::pi) {
      std::ostringstream msg;
      msg << "solvable_radius: theta=" << th << " leaves (0, pi) at t=" << t;
      throw DomainError(msg.str());
    }
  }
  p.generated = generate(p.theta_of_phi, p.phi_of_t, b, scale);
  std::vector<double> r(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) r[k] = p.generated.r(grid[k]);
  require_positive(grid, r);
  p.positivity_margin = *std::min_element(r.begin(), r.end());
  return p;
}

}  // namespace

AngleProfile AngleProfile::constant(double theta0) {
  return {[theta0](double) { return theta0; }, [](double) { return 0.0; },
          [](double) { return 0.0; }};
}

AngleProfile AngleProfile::sinusoidal(double theta0, double epsilon) {
  return {[theta0, epsilon](double p) { return theta0 + epsilon * std::sin(p); },
          [epsilon](double p) { return epsilon * std::cos(p); },
          [epsilon](double p) { return -epsilon * std::sin(p); }};
}

PhaseSchedule PhaseSchedule::linear(double omega, double phi0) {
  return {[omega, phi0](double t) { return phi0 + omega * t; },
          [omega](double) { return omega; }, [](double) { return 0.0; }};
}

SolvableProfile solvable_radius(const AngleProfile& theta_of_phi, const PhaseSchedule& phi_of_t,
                                double b, const TimeGrid& grid) {
  return build(theta_of_phi, phi_of_t, b, 1.0, grid);
}

SolvableProfile scale_radius(const SolvableProfile& profile, double factor, const TimeGrid& grid) {
  if (!(factor > 0.0)) throw ValidationError("scale_radius: factor must be positive");
  return build(profile.theta_of_phi, profile.phi_of_t, profile.b, profile.radius_scale * factor,
               grid);
}

Certificate certify_field(const FieldCurve& field, const SpinRep& rep, const TimeGrid& grid,
                          double tolerance, const CertifyOptions& options) {
  if (!(tolerance > 0.0)) throw ValidationError("certify: tolerance must be positive");
  field.validate(grid);
  const auto source = dipole_source(rep, field);
  const auto chain = expand(source, grid, 1, options.expansion);
  PropagatorOptions popt;
  popt.tolerance = options.oracle_tolerance;
  const auto oracle = propagate(source, grid, popt);

  Certificate c;
  c.tolerance = tolerance;
  c.residual = chain.residual;
  c.residual_bound = tolerance * chain.levels.front().sup_norm;
  c.oracle_error = oracle.error_estimate;
  c.chain_levels = static_cast<int>(chain.levels.size());
  c.chain_exact = chain.exact;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double d = op_distance(oracle.unitaries[k], product_approximation(chain, k));
    c.max_distance = std::max(c.max_distance, d);
    if (k + 1 == grid.size()) c.final_distance = d;
    c.sigma_rate_max = std::max(c.sigma_rate_max, std::abs(sigma_rate(field, grid[k])));
  }
  c.granted = c.residual <= c.residual_bound && c.max_distance <= tolerance;
  return c;
}

Certificate certify_exact(const SolvableProfile& profile, const SpinRep& rep, const TimeGrid& grid,
                          double tolerance, const CertifyOptions& options) {
  return certify_field(profile.generated, rep, grid, tolerance, options);
}

void write_field_profile(std::ostream& out, const FieldCurve& field, const TimeGrid& grid) {
  out << "t,r,theta,phi\n";
  char line[128];
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", t, field.r(t), field.theta(t),
                  field.phi(t));
    out << line;
  }
}

FieldCurve read_field_profile(std::istream& in, double b, TimeGrid* grid_out) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("field profile: empty input");
  line.erase(std::remove_if(line.begin(), line.end(), [](char ch) { return std::isspace(ch); }),
             line.end());
  if (line != "t,r,theta,phi") {
    throw ValidationError("field profile: header must be 't,r,theta,phi', got '" + line + "'");
  }
  std::vector<double> t, r, th, ph;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double v[4];
    std::string extra;
    if (!(fields >> v[0] >> v[1] >> v[2] >> v[3]) || (fields >> extra)) {
      throw ValidationError("field profile: row " + std::to_string(row) +
                            " does not hold four numbers");
    }
    if (!t.empty() && !(v[0] > t.back())) {
      throw ValidationError("field profile: t not strictly increasing at row " +
                            std::to_string(row));
    }
    t.push_back(v[0]);
    r.push_back(v[1]);
    th.push_back(v[2]);
    ph.push_back(t.size() > 1 ? unwrap_near(v[3], ph.back(), 2.0 * std::numbers::pi) : v[3]);
  }
  if (t.size() < 4) throw ValidationError("field profile: at least four rows required");
  TimeGrid grid(t);
  auto field = FieldCurve::from_samples(b, grid, std::move(r), std::move(th), std::move(ph), 0);
  field.validate(grid);
  if (grid_out) *grid_out = grid;
  return field;
}

}  // namespace apex
