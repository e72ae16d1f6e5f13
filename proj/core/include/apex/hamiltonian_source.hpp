#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "apex/interpolation.hpp"
#include "apex/operator_core.hpp"

namespace apex {

/// How dH/dt is obtained when the source has no analytic derivative.
struct DerivativeOptions {
  /// Centred-difference step as a fraction of the local grid spacing.
  double step_fraction = 0.25;
  bool richardson = false;
};

/// A Hermitian family t -> H(t) of fixed dimension, optionally with its
/// analytic time derivative.  Copies share the underlying callables.
class HamiltonianSource {
 public:
  using Eval = std::function<ComplexMatrix(double)>;

  HamiltonianSource() = default;
  HamiltonianSource(int dim, Eval eval, Eval derivative = {});

  /// Cubic-spline interpolant of samples on `grid`; the derivative is the
  /// spline derivative.
  static HamiltonianSource from_samples(const TimeGrid& grid, std::vector<ComplexMatrix> samples);

  /// H(t) = h for all t.
  static HamiltonianSource constant(const ComplexMatrix& h);

  int dim() const { return dim_; }
  ComplexMatrix operator()(double t) const { return eval_(t); }

  bool has_derivative() const { return static_cast<bool>(derivative_); }

  /// Analytic derivative when available, otherwise a centred difference with
  /// step `spacing * options.step_fraction`.
  ComplexMatrix derivative(double t, double spacing, const DerivativeOptions& options = {}) const;

  /// Non-null for sources built by from_samples.
  const CubicSpline<ComplexMatrix>* spline() const { return spline_.get(); }

 private:
  int dim_ = 0;
  Eval eval_;
  Eval derivative_;
  std::shared_ptr<const CubicSpline<ComplexMatrix>> spline_;
};

/// Relative error estimate of the cubic interpolant of `samples`: a spline
/// through the even-indexed samples is compared at the odd ones and the
/// discrepancy scaled by 1/16 (fourth-order convergence).  Returned relative
/// to the largest sample norm; zero when all samples vanish.
double interpolation_residual(const TimeGrid& grid, const std::vector<ComplexMatrix>& samples);

}  // namespace apex
