#pragma once

#include <functional>
#include <iosfwd>

#include "apex/expansion.hpp"
#include "apex/spin_model.hpp"

namespace apex {

/// theta as a function of phi.  Missing derivatives are taken numerically.
struct AngleProfile {
  std::function<double(double)> theta;
  std::function<double(double)> dtheta;
  std::function<double(double)> d2theta;

  static AngleProfile constant(double theta0);
  /// theta0 + epsilon sin(phi)
  static AngleProfile sinusoidal(double theta0, double epsilon);
};

/// phi as a function of time; phi_dot must stay positive.
struct PhaseSchedule {
  std::function<double(double)> phi;
  std::function<double(double)> phi_dot;
  std::function<double(double)> phi_ddot;

  static PhaseSchedule linear(double omega, double phi0 = 0.0);
};

/// A driving field on which sigma is constant, so H^(2) vanishes and
/// U^(0) U^(1) is the exact propagator.
struct SolvableProfile {
  AngleProfile theta_of_phi;
  PhaseSchedule phi_of_t;
  double b = 1.0;
  FieldCurve generated;
  /// min_k r(t_k)
  double positivity_margin = 0.0;
  /// 1 unless the radius was rescaled for a negative control.
  double radius_scale = 1.0;
};

/// r(t) = (phi_dot / b) [cos th - (d/dphi)(th' / sin th) / (1 + (th' / sin th)^2)]
SolvableProfile solvable_radius(const AngleProfile& theta_of_phi, const PhaseSchedule& phi_of_t,
                                double b, const TimeGrid& grid);

/// Same profile with r(t) multiplied by `factor`.  Used as a negative control.
SolvableProfile scale_radius(const SolvableProfile& profile, double factor, const TimeGrid& grid);

struct CertifyOptions {
  double oracle_tolerance = 1e-9;
  ExpansionOptions expansion;
};

struct Certificate {
  bool granted = false;
  double tolerance = 0.0;
  /// sup ||H^(2)|| and the bound tolerance * sup ||H^(0)|| it is held to.
  double residual = 0.0;
  double residual_bound = 0.0;
  /// op_distance(oracle, U0 U1) at T and the maximum over the grid.
  double final_distance = 0.0;
  double max_distance = 0.0;
  double oracle_error = 0.0;
  double sigma_rate_max = 0.0;
  int chain_levels = 0;
  bool chain_exact = false;
};

/// Builds the N = 1 expansion and the oracle on the field and checks both
/// bounds.  Failure is reported through `granted`, never thrown.
Certificate certify_field(const FieldCurve& field, const SpinRep& rep, const TimeGrid& grid,
                          double tolerance, const CertifyOptions& options = {});

Certificate certify_exact(const SolvableProfile& profile, const SpinRep& rep, const TimeGrid& grid,
                          double tolerance, const CertifyOptions& options = {});

/// Field-profile CSV: header `t,r,theta,phi`, radians, strictly increasing t.
void write_field_profile(std::ostream& out, const FieldCurve& field, const TimeGrid& grid);

/// Reads a field-profile CSV into a spline-backed level-0 curve.  The grid
/// of the file is returned through `grid` when non-null.
FieldCurve read_field_profile(std::istream& in, double b, TimeGrid* grid = nullptr);

}  // namespace apex
