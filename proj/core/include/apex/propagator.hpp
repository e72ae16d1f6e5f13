#pragma once

#include <vector>

#include "apex/hamiltonian_source.hpp"
#include "apex/operator_core.hpp"

namespace apex {

struct PropagatorOptions {
  double tolerance = 1e-9;
  /// Substeps per grid interval may not exceed this.
  long max_substeps = 1L << 20;
  long initial_substeps = 1;
};

/// Time-ordered exponential sampled on a grid.
struct PropagatorResult {
  TimeGrid grid{std::vector<double>{0.0, 1.0}};
  std::vector<ComplexMatrix> unitaries;
  /// op_distance between the last two refinements at the final time.
  double error_estimate = 0.0;
  long substeps = 0;
};

/// Midpoint exponential stepping with global step halving: every interval is
/// split into s substeps, each contributing expm_unitary(H(t_mid), dt); s
/// doubles until two successive refinements agree at T within `tolerance`.
PropagatorResult propagate(const HamiltonianSource& source, const TimeGrid& grid,
                           const PropagatorOptions& options = {});

PropagatorResult propagate(const HamiltonianSource& source, const TimeGrid& grid, double tolerance);

/// Single pass with fixed substeps (no refinement loop).
std::vector<ComplexMatrix> propagate_fixed(const HamiltonianSource& source, const TimeGrid& grid,
                                           long substeps);

/// Exact propagator for b r (sin(th0) cos(w t) J1 + sin(th0) sin(w t) J2 + cos(th0) J3),
/// obtained in the frame rotating at w about axis 3:
///   U(t) = exp(-i w t J3) exp(-i [(b r cos th0 - w) J3 + b r sin th0 J1] t).
ComplexMatrix rabi_oracle(double b, double r, double theta0, double omega, double t,
                          double j = 0.5);

}  // namespace apex
