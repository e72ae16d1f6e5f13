#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "apex/expansion.hpp"
#include "apex/hamiltonian_source.hpp"
#include "apex/interpolation.hpp"
#include "apex/operator_core.hpp"

namespace apex {

/// Spin-j angular momentum matrices in the J3 eigenbasis, ordered by
/// ascending magnetic number n = -j, ..., j (hbar = 1).
struct SpinRep {
  double j = 0.5;
  int dim = 2;
  ComplexMatrix J1, J2, J3, Jplus, Jminus;
  /// magnetic[a] = -j + a
  RealVector magnetic;
  /// ladder[a] = <a+1| J+ |a> = sqrt((j - n)(j + n + 1)), n = magnetic[a]
  RealVector ladder;
};

SpinRep spin_matrices(double j);

/// Field curve (r, theta, phi)(t) of a magnetic dipole drive together with
/// its Larmor frequency.  Level 0 curves usually wrap analytic callables;
/// curves derived by level_field() wrap cubic splines of grid samples.
class FieldCurve {
 public:
  using Scalar = std::function<double(double)>;

  struct Functions {
    Scalar r, theta, phi;
    /// Missing derivatives are taken numerically.
    Scalar r_dot, theta_dot, phi_dot;
  };

  FieldCurve() = default;
  FieldCurve(double b, Functions functions, int level = 0);

  static FieldCurve from_samples(double b, const TimeGrid& grid, std::vector<double> r,
                                 std::vector<double> theta, std::vector<double> phi, int level);

  /// r = r0, theta = theta0, phi = phi0 + omega t.
  static FieldCurve precession(double b, double r, double theta0, double omega,
                               double phi0 = 0.0);

  double b() const { return b_; }
  int level() const { return level_; }

  double r(double t) const { return f_.r(t); }
  double theta(double t) const { return f_.theta(t); }
  double phi(double t) const { return f_.phi(t); }
  double r_dot(double t) const { return f_.r_dot(t); }
  double theta_dot(double t) const { return f_.theta_dot(t); }
  double phi_dot(double t) const { return f_.phi_dot(t); }

  /// Angular speed of the field tip on the unit sphere.
  double tip_speed(double t) const;

  const Functions& functions() const { return f_; }

  /// Delta(t_k) used to build this level (derived levels only).
  const std::optional<std::vector<double>>& delta_factor() const { return delta_factor_; }
  void set_delta_factor(std::vector<double> delta) { delta_factor_ = std::move(delta); }

  /// Grid instants where the parent level had zero tip speed (derived levels).
  const std::vector<bool>& zero_speed() const { return zero_speed_; }
  void set_zero_speed(std::vector<bool> flags) { zero_speed_ = std::move(flags); }

  /// Level 0: r > 0 everywhere on the grid; every level: r >= 0 and
  /// theta in [0, pi).  Throws ValidationError / GaugeSingularityError.
  void validate(const TimeGrid& grid) const;

 private:
  double b_ = 1.0;
  int level_ = 0;
  Functions f_;
  std::optional<std::vector<double>> delta_factor_;
  std::vector<bool> zero_speed_;
};

ComplexMatrix dipole_hamiltonian(const SpinRep& rep, double b, double r, double theta, double phi);

/// b r (sin th cos ph J1 + sin th sin ph J2 + cos th J3) at time t.
ComplexMatrix dipole_hamiltonian(const SpinRep& rep, const FieldCurve& field, double t);

ComplexMatrix dipole_derivative(const SpinRep& rep, const FieldCurve& field, double t);

/// Hamiltonian source with the analytic dipole derivative.
HamiltonianSource dipole_source(const SpinRep& rep, const FieldCurve& field);

/// exp(-i phi J3) exp(-i theta J2) exp(i phi J3)
ComplexMatrix wigner_w(const SpinRep& rep, double theta, double phi);

struct SpinEigenbasis {
  ComplexMatrix vectors;  // columns W |n; pole>, n ascending
  RealVector values;      // n b r
};

SpinEigenbasis spin_eigenbasis(const SpinRep& rep, const FieldCurve& field, double t);

/// Closed-form A_mn(t) = <m|d/dt|n> in the W(theta, phi) gauge.
ComplexMatrix spin_connection(const SpinRep& rep, const FieldCurve& field, double t);

/// Per-level phases of a dipole field on a grid:
///   delta(t) = -b int r,  gamma(t) = -int (1 - cos theta) dphi/dt,  alpha = delta + gamma.
/// alpha_n = n alpha for level label n.  The phi0 = 0 diagnostics (ell, x, y)
/// are filled by phi0_zero_phases only.
struct LevelPhases {
  int level = 0;
  std::vector<double> delta, gamma, alpha;
  std::vector<double> ell, x, y;
};

/// Composite Simpson quadrature using the field at grid points and midpoints.
LevelPhases level_phases(const FieldCurve& field, const TimeGrid& grid);

struct TipKinematics {
  std::vector<double> omega;   // |Omega|
  std::vector<double> xi;
  std::vector<double> sigma;   // continuity unwrapped
  std::vector<Complex> Omega;  // exp(-i(alpha + phi)) (sin th phi_dot + i th_dot)
  std::vector<double> delta, gamma, alpha;
  /// Instants with omega below the zero-speed floor; xi and sigma are held.
  std::vector<bool> zero_speed;
};

TipKinematics tip_kinematics(const FieldCurve& field, const TimeGrid& grid);
TipKinematics tip_kinematics(const FieldCurve& field, const TimeGrid& grid,
                             const LevelPhases& phases);

/// d sigma / dt = b r - cos(theta) phi_dot + d xi / dt, evaluated from the
/// field callables (0 where the tip is at rest).
double sigma_rate(const FieldCurve& field, double t);

enum class FieldFormula {
  /// Delta and theta^(i+1) exactly as printed in the source derivation.
  Printed,
  /// The rotated vector omega W0 (cos s, -sin s, 0): Delta == 1 and the
  /// third component uses cos(sigma + phi0).
  Corrected,
};

/// Field of H^(i+1) from the level-i field and kinematics, on the grid.
FieldCurve level_field(const FieldCurve& field, const TipKinematics& kinematics,
                       const TimeGrid& grid, FieldFormula formula = FieldFormula::Corrected);

/// Throws ClosedFormMismatchError when dipole_hamiltonian(field) differs from
/// `generic[k]` by more than `tolerance` (relative Frobenius) at any grid point.
void validate_level_field(const SpinRep& rep, const FieldCurve& field,
                          const std::vector<ComplexMatrix>& generic, const TimeGrid& grid,
                          double tolerance = 1e-6);

/// W(th(t_k), ph(t_k)) exp(i alpha(t_k) J3) W(th(0), ph(0))^dagger
ComplexMatrix closed_form_ui(const SpinRep& rep, const FieldCurve& field,
                             const LevelPhases& phases, const TimeGrid& grid, std::size_t k);

/// Level-1 phases in closed form for a phi0 = 0 drive: delta1 = -ell with
/// ell the arclength of the tip path, gamma1 from X and Y.
LevelPhases phi0_zero_phases(const FieldCurve& field, const TipKinematics& kinematics,
                             const TimeGrid& grid);

struct DualityLevel {
  int level = 0;
  double max_relative_distance = 0.0;
  bool passed = false;
};

struct DualityReport {
  FieldFormula formula = FieldFormula::Corrected;
  double tolerance = 1e-6;
  std::vector<DualityLevel> levels;
  bool passed = false;
};

/// Closed-form level fields (levels 1..max_level) built by level_field, one
/// per entry; element 0 is `field` itself.
std::vector<FieldCurve> closed_form_fields(const FieldCurve& field, const TimeGrid& grid,
                                           int max_level,
                                           FieldFormula formula = FieldFormula::Corrected);

/// Compares the closed-form level Hamiltonians with the generic expansion
/// for levels 1..max_level.  Never throws on mismatch; the outcome is in
/// the report.
DualityReport check_duality(const SpinRep& rep, const FieldCurve& field, const TimeGrid& grid,
                            int max_level, FieldFormula formula, double tolerance = 1e-6,
                            const ExpansionOptions& options = {});

}  // namespace apex
