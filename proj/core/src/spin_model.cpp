#include "apex/spin_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "apex/errors.hpp"

namespace apex {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kI{0.0, 1.0};
// Step for numerically differentiated field callables.
constexpr double kFieldDiffStep = 1e-4;
// Distance from the south pole at which the W gauge is declared singular.
constexpr double kPoleMargin = 1e-12;

FieldCurve::Scalar derivative_of(const FieldCurve::Scalar& f) {
  return [f](double t) { return numeric_derivative(f, t, kFieldDiffStep); };
}

double simpson(double fa, double fm, double fb, double h) { return (fa + 4.0 * fm + fb) * h / 6.0; }

Eigen::VectorXcd phase_vector(const RealVector& n, double angle) {
  return (n * angle).unaryExpr([](double x) { return std::polar(1.0, x); });
}

}  // namespace

SpinRep spin_matrices(double j) {
  const double twice = 2.0 * j;
  if (!(j >= 0.0) || std::abs(twice - std::round(twice)) > 1e-12 || j > 64.0) {
    std::ostringstream msg;
    msg << "spin_matrices: j=" << j << " is not a non-negative half-integer (<= 64)";
    throw ValidationError(msg.str());
  }
  SpinRep rep;
  rep.j = std::round(twice) / 2.0;
  rep.dim = static_cast<int>(std::round(twice)) + 1;
  const int d = rep.dim;
  rep.magnetic.resize(d);
  rep.ladder = RealVector::Zero(d);
  for (int a = 0; a < d; ++a) rep.magnetic(a) = -rep.j + a;
  rep.Jplus = ComplexMatrix::Zero(d, d);
  for (int a = 0; a + 1 < d; ++a) {
    const double n = rep.magnetic(a);
    rep.ladder(a) = std::sqrt((rep.j - n) * (rep.j + n + 1.0));
    rep.Jplus(a + 1, a) = rep.ladder(a);
  }
  rep.Jminus = rep.Jplus.adjoint();
  rep.J1 = 0.5 * (rep.Jplus + rep.Jminus);
  rep.J2 = (rep.Jplus - rep.Jminus) / (2.0 * kI);
  rep.J3 = rep.magnetic.cast<Complex>().asDiagonal();
  return rep;
}

// ---------------------------------------------------------------------------
// FieldCurve

FieldCurve::FieldCurve(double b, Functions functions, int level)
    : b_(b), level_(level), f_(std::move(functions)) {
  if (!(b_ > 0.0)) throw ValidationError("FieldCurve: Larmor frequency b must be positive");
  if (!f_.r || !f_.theta || !f_.phi) throw ValidationError("FieldCurve: r, theta, phi required");
  if (!f_.r_dot) f_.r_dot = derivative_of(f_.r);
  if (!f_.theta_dot) f_.theta_dot = derivative_of(f_.theta);
  if (!f_.phi_dot) f_.phi_dot = derivative_of(f_.phi);
}

FieldCurve FieldCurve::from_samples(double b, const TimeGrid& grid, std::vector<double> r,
                                    std::vector<double> theta, std::vector<double> phi,
                                    int level) {
  if (r.size() != grid.size() || theta.size() != grid.size() || phi.size() != grid.size()) {
    throw ValidationError("FieldCurve::from_samples: one sample per grid point required");
  }
  std::vector<double> knots(grid.times().begin(), grid.times().end());
  auto rs = std::make_shared<const CubicSpline<double>>(knots, std::move(r));
  auto ts = std::make_shared<const CubicSpline<double>>(knots, std::move(theta));
  auto ps = std::make_shared<const CubicSpline<double>>(std::move(knots), std::move(phi));
  Functions f;
  f.r = [rs](double t) { return (*rs)(t); };
  f.theta = [ts](double t) { return (*ts)(t); };
  f.phi = [ps](double t) { return (*ps)(t); };
  f.r_dot = [rs](double t) { return rs->derivative(t); };
  f.theta_dot = [ts](double t) { return ts->derivative(t); };
  f.phi_dot = [ps](double t) { return ps->derivative(t); };
  return FieldCurve(b, std::move(f), level);
}

FieldCurve FieldCurve::precession(double b, double r, double theta0, double omega, double phi0) {
  Functions f;
  f.r = [r](double) { return r; };
  f.theta = [theta0](double) { return theta0; };
  f.phi = [phi0, omega](double t) { return phi0 + omega * t; };
  f.r_dot = [](double) { return 0.0; };
  f.theta_dot = [](double) { return 0.0; };
  f.phi_dot = [omega](double) { return omega; };
  return FieldCurve(b, std::move(f), 0);
}

double FieldCurve::tip_speed(double t) const {
  const double td = theta_dot(t);
  const double s = std::sin(theta(t)) * phi_dot(t);
  return std::sqrt(td * td + s * s);
}

void FieldCurve::validate(const TimeGrid& grid) const {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const double rv = r(t);
    const double th = theta(t);
    if (!std::isfinite(rv) || !std::isfinite(th) || !std::isfinite(phi(t))) {
      std::ostringstream msg;
      msg << "field: non-finite value at t=" << t;
      throw ValidationError(msg.str());
    }
    if ((level_ == 0 && !(rv > 0.0)) || rv < 0.0) {
      std::ostringstream msg;
      msg << "field: r=" << rv << " not positive at t=" << t;
      throw ValidationError(msg.str());
    }
    if (th < 0.0) {
      std::ostringstream msg;
      msg << "field: theta=" << th << " outside [0, pi) at t=" << t;
      throw ValidationError(msg.str());
    }
    if (th >= kPi - kPoleMargin) {
      std::ostringstream msg;
      msg << "field: theta reaches pi at t=" << t << "; the eigenbasis is not single valued there";
      throw GaugeSingularityError(msg.str());
    }
  }
}

// ---------------------------------------------------------------------------
// Hamiltonian and eigenbasis

ComplexMatrix dipole_hamiltonian(const SpinRep& rep, double b, double r, double theta,
                                 double phi) {
  return b * r *
         (std::sin(theta) * std::cos(phi) * rep.J1 + std::sin(theta) * std::sin(phi) * rep.J2 +
          std::cos(theta) * rep.J3);
}

ComplexMatrix dipole_hamiltonian(const SpinRep& rep, const FieldCurve& field, double t) {
  const double r = field.r(t);
  if ((field.level() == 0 && !(r > 0.0)) || r < 0.0) {
    std::ostringstream msg;
    msg << "dipole_hamiltonian: r=" << r << " not positive at t=" << t;
    throw ValidationError(msg.str());
  }
  return dipole_hamiltonian(rep, field.b(), r, field.theta(t), field.phi(t));
}

ComplexMatrix dipole_derivative(const SpinRep& rep, const FieldCurve& field, double t) {
  const double r = field.r(t), th = field.theta(t), ph = field.phi(t);
  const double rd = field.r_dot(t), thd = field.theta_dot(t), phd = field.phi_dot(t);
  const double st = std::sin(th), ct = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
  const double x = rd * st * cp + r * (thd * ct * cp - phd * st * sp);
  const double y = rd * st * sp + r * (thd * ct * sp + phd * st * cp);
  const double z = rd * ct - r * thd * st;
  return field.b() * (x * rep.J1 + y * rep.J2 + z * rep.J3);
}

HamiltonianSource dipole_source(const SpinRep& rep, const FieldCurve& field) {
  return HamiltonianSource(
      rep.dim, [rep, field](double t) { return dipole_hamiltonian(rep, field, t); },
      [rep, field](double t) { return dipole_derivative(rep, field, t); });
}

ComplexMatrix wigner_w(const SpinRep& rep, double theta, double phi) {
  const Eigen::VectorXcd left = phase_vector(rep.magnetic, -phi);
  const Eigen::VectorXcd right = phase_vector(rep.magnetic, phi);
  return left.asDiagonal() * expm_unitary(rep.J2, theta) * right.asDiagonal();
}

SpinEigenbasis spin_eigenbasis(const SpinRep& rep, const FieldCurve& field, double t) {
  const double th = field.theta(t);
  if (th >= kPi - kPoleMargin) {
    std::ostringstream msg;
    msg << "spin_eigenbasis: theta reaches pi at t=" << t;
    throw GaugeSingularityError(msg.str());
  }
  return {wigner_w(rep, th, field.phi(t)), rep.magnetic * (field.b() * field.r(t))};
}

ComplexMatrix spin_connection(const SpinRep& rep, const FieldCurve& field, double t) {
  const double th = field.theta(t), ph = field.phi(t);
  const Complex up = std::polar(1.0, ph);
  const Complex down = std::conj(up);
  const ComplexMatrix a_theta = 0.5 * (up * rep.Jminus - down * rep.Jplus);
  const RealVector diag = rep.magnetic * (1.0 - std::cos(th));
  const ComplexMatrix a_phi =
      kI * (ComplexMatrix(diag.cast<Complex>().asDiagonal()) +
            0.5 * std::sin(th) * (up * rep.Jminus + down * rep.Jplus));
  // The radial coefficient vanishes identically.
  return field.theta_dot(t) * a_theta + field.phi_dot(t) * a_phi;
}

// ---------------------------------------------------------------------------
// Phases and kinematics

LevelPhases level_phases(const FieldCurve& field, const TimeGrid& grid) {
  const std::size_t m = grid.size();
  LevelPhases p;
  p.level = field.level();
  p.delta.assign(m, 0.0);
  p.gamma.assign(m, 0.0);
  p.alpha.assign(m, 0.0);
  const auto berry = [&field](double t) {
    return (1.0 - std::cos(field.theta(t))) * field.phi_dot(t);
  };
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double a = grid[k], mid = grid.midpoint(k), c = grid[k + 1], h = grid.step(k);
    p.delta[k + 1] = p.delta[k] - field.b() * simpson(field.r(a), field.r(mid), field.r(c), h);
    p.gamma[k + 1] = p.gamma[k] - simpson(berry(a), berry(mid), berry(c), h);
  }
  for (std::size_t k = 0; k < m; ++k) p.alpha[k] = p.delta[k] + p.gamma[k];
  return p;
}

TipKinematics tip_kinematics(const FieldCurve& field, const TimeGrid& grid) {
  return tip_kinematics(field, grid, level_phases(field, grid));
}

TipKinematics tip_kinematics(const FieldCurve& field, const TimeGrid& grid,
                             const LevelPhases& phases) {
  const std::size_t m = grid.size();
  TipKinematics kin;
  kin.delta = phases.delta;
  kin.gamma = phases.gamma;
  kin.alpha = phases.alpha;
  kin.omega.resize(m);
  kin.xi.resize(m);
  kin.sigma.resize(m);
  kin.Omega.resize(m);
  kin.zero_speed.assign(m, false);

  double scale = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    scale = std::max(scale, field.b() * std::abs(field.r(grid[k])) + field.tip_speed(grid[k]));
  }
  const double floor = 1e-12 * scale;

  bool have_xi = false;
  double xi_prev = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double t = grid[k];
    const double th = field.theta(t), ph = field.phi(t);
    const double thd = field.theta_dot(t), phd = field.phi_dot(t);
    const double along = std::sin(th) * phd;
    const double w = std::sqrt(thd * thd + along * along);
    kin.omega[k] = w;
    kin.Omega[k] = std::polar(1.0, -(kin.alpha[k] + ph)) * Complex(along, thd);
    if (w <= floor) {
      kin.zero_speed[k] = true;
      kin.omega[k] = 0.0;
      kin.Omega[k] = 0.0;
      kin.xi[k] = xi_prev;
    } else {
      const double xi = std::atan2(thd, along);
      kin.xi[k] = have_xi ? unwrap_near(xi, xi_prev, kTwoPi) : xi;
      have_xi = true;
    }
    xi_prev = kin.xi[k];
    kin.sigma[k] = -kin.alpha[k] - ph + kin.xi[k];
  }
  return kin;
}

double sigma_rate(const FieldCurve& field, double t) {
  if (field.tip_speed(t) <= 1e-12 * (1.0 + field.b() * std::abs(field.r(t)))) return 0.0;
  const auto xi_at = [&field](double s) {
    return std::atan2(field.theta_dot(s), std::sin(field.theta(s)) * field.phi_dot(s));
  };
  const double xi0 = xi_at(t);
  const auto xi_local = [&](double s) { return unwrap_near(xi_at(s), xi0, kTwoPi); };
  const double xi_dot = numeric_derivative(xi_local, t, kFieldDiffStep);
  return field.b() * field.r(t) - std::cos(field.theta(t)) * field.phi_dot(t) + xi_dot;
}

// ---------------------------------------------------------------------------
// Level recursion

FieldCurve level_field(const FieldCurve& field, const TipKinematics& kin, const TimeGrid& grid,
                       FieldFormula formula) {
  const std::size_t m = grid.size();
  if (kin.sigma.size() != m) throw ValidationError("level_field: kinematics not on this grid");
  const double th0 = field.theta(0.0);
  const double ph0 = field.phi(0.0);
  const double st0 = std::sin(th0), ct0 = std::cos(th0);
  const double t2 = std::tan(0.5 * th0) * std::tan(0.5 * th0);

  std::vector<double> r(m), theta(m), phi(m), delta(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double s = kin.sigma[k];
    double d = 1.0, th = 0.0, ph = 0.0;
    if (formula == FieldFormula::Corrected) {
      const double c = std::cos(s + ph0), sn = std::sin(s + ph0);
      const double x = ct0 * c * std::cos(ph0) + sn * std::sin(ph0);
      const double y = ct0 * c * std::sin(ph0) - sn * std::cos(ph0);
      const double z = -st0 * c;
      d = std::sqrt(x * x + y * y + z * z);
      th = std::acos(std::clamp(z / d, -1.0, 1.0));
      ph = std::atan2(y, x);
    } else {
      d = std::sqrt(1.0 + std::sin(ph0) * st0 * st0 * std::sin(ph0 + 2.0 * s));
      th = std::acos(std::clamp(-st0 * std::cos(s) / d, -1.0, 1.0));
      const double num = std::sin(s) + t2 * std::sin(2.0 * ph0 + s);
      const double den = -std::cos(s) + t2 * std::cos(2.0 * ph0 + s);
      ph = std::atan2(-num, -den);
    }
    delta[k] = d;
    if (kin.zero_speed[k]) {
      r[k] = 0.0;
      if (k > 0) {
        th = theta[k - 1];
        ph = phi[k - 1];
      }
    } else {
      r[k] = kin.omega[k] * d / field.b();
    }
    theta[k] = th;
    phi[k] = k > 0 ? unwrap_near(ph, phi[k - 1], kTwoPi) : ph;
  }
  std::vector<bool> flags = kin.zero_speed;
  FieldCurve next = FieldCurve::from_samples(field.b(), grid, std::move(r), std::move(theta),
                                             std::move(phi), field.level() + 1);
  next.set_delta_factor(std::move(delta));
  next.set_zero_speed(std::move(flags));
  return next;
}

namespace {

double relative_distance(const ComplexMatrix& closed, const ComplexMatrix& generic,
                         double sup_generic) {
  const double dist = op_distance(closed, generic);
  const double denom = std::max(generic.norm(), 1e-3 * sup_generic);
  if (denom == 0.0) return dist == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return dist / denom;
}

double sup_norm(const std::vector<ComplexMatrix>& samples) {
  double s = 0.0;
  for (const auto& m : samples) s = std::max(s, m.norm());
  return s;
}

double max_relative_distance(const SpinRep& rep, const FieldCurve& field,
                             const std::vector<ComplexMatrix>& generic, const TimeGrid& grid,
                             std::size_t* worst_index) {
  const double sup = sup_norm(generic);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const ComplexMatrix closed =
        dipole_hamiltonian(rep, field.b(), field.r(t), field.theta(t), field.phi(t));
    const double rel = relative_distance(closed, generic[k], sup);
    if (!(rel <= worst)) {
      worst = rel;
      if (worst_index) *worst_index = k;
    }
  }
  return worst;
}

}  // namespace

void validate_level_field(const SpinRep& rep, const FieldCurve& field,
                          const std::vector<ComplexMatrix>& generic, const TimeGrid& grid,
                          double tolerance) {
  if (generic.size() != grid.size()) {
    throw ValidationError("validate_level_field: generic samples not on this grid");
  }
  std::size_t worst_k = 0;
  const double worst = max_relative_distance(rep, field, generic, grid, &worst_k);
  if (!(worst <= tolerance)) {
    const double t = grid[worst_k];
    std::ostringstream msg;
    msg << "level " << field.level() << " closed form differs from the generic Hamiltonian by "
        << worst << " (relative) at t=" << t;
    throw ClosedFormMismatchError(
        msg.str(), dipole_hamiltonian(rep, field.b(), field.r(t), field.theta(t), field.phi(t)),
        generic[worst_k], worst);
  }
}

ComplexMatrix closed_form_ui(const SpinRep& rep, const FieldCurve& field,
                             const LevelPhases& phases, const TimeGrid& grid, std::size_t k) {
  if (k >= grid.size() || phases.alpha.size() != grid.size()) {
    throw ValidationError("closed_form_ui: index or phases inconsistent with the grid");
  }
  const double t = grid[k];
  const Eigen::VectorXcd rot = phase_vector(rep.magnetic, phases.alpha[k]);
  return wigner_w(rep, field.theta(t), field.phi(t)) * rot.asDiagonal() *
         wigner_w(rep, field.theta(0.0), field.phi(0.0)).adjoint();
}

LevelPhases phi0_zero_phases(const FieldCurve& field, const TipKinematics& kin,
                             const TimeGrid& grid) {
  if (std::abs(field.phi(0.0)) > 1e-12) {
    throw ValidationError("phi0_zero_phases: requires phi(0) = 0");
  }
  const std::size_t m = grid.size();
  if (kin.sigma.size() != m) throw ValidationError("phi0_zero_phases: kinematics not on this grid");
  const double th0 = field.theta(0.0);
  const double c = std::cos(th0);
  const double tn = std::tan(th0);
  const double s0 = kin.sigma[0];

  LevelPhases p;
  p.level = field.level() + 1;
  p.ell.assign(m, 0.0);
  p.delta.assign(m, 0.0);
  p.gamma.assign(m, 0.0);
  p.alpha.assign(m, 0.0);
  p.x.assign(m, 0.0);
  p.y.assign(m, 0.0);

  double branch_prev = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (k > 0) {
      const double h = grid.step(k - 1);
      p.ell[k] = p.ell[k - 1] + simpson(field.tip_speed(grid[k - 1]),
                                        field.tip_speed(grid.midpoint(k - 1)),
                                        field.tip_speed(grid[k]), h);
    }
    const double s = kin.sigma[k];
    // X = xn / xd and Y = yn / yd kept as fractions so tan(sigma) poles are harmless.
    const double xn = -c * std::sin(s - s0);
    const double xd = c * c * std::cos(s) * std::cos(s0) + std::sin(s) * std::sin(s0);
    const double yn = tn * (std::sin(s) - std::sin(s0));
    const double yd = 1.0 + tn * tn * std::sin(s) * std::sin(s0);
    p.x[k] = xn / xd;
    p.y[k] = yn / yd;
    // gamma1 = -arctan[(X - Y) / (1 + X Y)], branch fixed by continuity (period pi).
    const double raw = std::atan2(xn * yd - yn * xd, xd * yd + xn * yn);
    double branch = raw;
    if (k > 0) {
      branch = unwrap_near(raw, branch_prev, kPi);
      if (std::abs(branch - branch_prev) > 0.25 * kPi) {
        std::ostringstream msg;
        msg << "phi0_zero_phases: branch of gamma1 ambiguous between t=" << grid[k - 1]
            << " and t=" << grid[k] << "; refine the grid";
        throw RefinementError(msg.str());
      }
    } else {
      branch = unwrap_near(raw, 0.0, kPi);
    }
    branch_prev = branch;
    p.delta[k] = -p.ell[k];
    p.gamma[k] = -branch;
    p.alpha[k] = p.delta[k] + p.gamma[k];
  }
  return p;
}

std::vector<FieldCurve> closed_form_fields(const FieldCurve& field, const TimeGrid& grid,
                                           int max_level, FieldFormula formula) {
  std::vector<FieldCurve> out{field};
  for (int i = 0; i < max_level; ++i) {
    const auto kin = tip_kinematics(out.back(), grid);
    out.push_back(level_field(out.back(), kin, grid, formula));
  }
  return out;
}

DualityReport check_duality(const SpinRep& rep, const FieldCurve& field, const TimeGrid& grid,
                            int max_level, FieldFormula formula, double tolerance,
                            const ExpansionOptions& options) {
  if (max_level < 1) throw ValidationError("check_duality: max_level must be at least 1");
  DualityReport report;
  report.formula = formula;
  report.tolerance = tolerance;

  const auto chain = expand(dipole_source(rep, field), grid, max_level - 1, options);
  const auto fields = closed_form_fields(field, grid, max_level, formula);
  const std::vector<ComplexMatrix> zeros(grid.size(), ComplexMatrix::Zero(rep.dim, rep.dim));

  report.passed = true;
  for (int i = 1; i <= max_level; ++i) {
    const std::vector<ComplexMatrix>* generic = &zeros;
    if (i < static_cast<int>(chain.levels.size())) {
      generic = &chain.levels[static_cast<std::size_t>(i)].samples;
    } else if (i == static_cast<int>(chain.levels.size())) {
      generic = &chain.residual_samples;
    }
    DualityLevel lvl;
    lvl.level = i;
    lvl.max_relative_distance =
        max_relative_distance(rep, fields[static_cast<std::size_t>(i)], *generic, grid, nullptr);
    lvl.passed = lvl.max_relative_distance <= tolerance;
    report.passed = report.passed && lvl.passed;
    report.levels.push_back(lvl);
  }
  return report;
}

}  // namespace apex
