#include "apex/propagator.hpp"

#include <limits>
#include <sstream>

#include "apex/errors.hpp"
#include "apex/spin_model.hpp"

namespace apex {

namespace {
constexpr long kStallCheckSubsteps = 1024;
}  // namespace

std::vector<ComplexMatrix> propagate_fixed(const HamiltonianSource& source, const TimeGrid& grid,
                                           long substeps) {
  if (substeps < 1) throw ValidationError("propagate_fixed: substeps must be positive");
  const int dim = source.dim();
  std::vector<ComplexMatrix> out;
  out.reserve(grid.size());
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  out.push_back(u);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double dt = grid.step(k) / static_cast<double>(substeps);
    for (long s = 0; s < substeps; ++s) {
      const double tm = grid[k] + (static_cast<double>(s) + 0.5) * dt;
      u = expm_unitary(source(tm), dt) * u;
    }
    out.push_back(u);
  }
  return out;
}

PropagatorResult propagate(const HamiltonianSource& source, const TimeGrid& grid,
                           const PropagatorOptions& options) {
  if (!(options.tolerance > 0.0)) throw ValidationError("propagate: tolerance must be positive");
  long s = std::max(1L, options.initial_substeps);
  auto previous = propagate_fixed(source, grid, s);
  double estimate = std::numeric_limits<double>::infinity();
  // Once the midpoint rule is resolved each doubling cuts the estimate by ~4;
  // two doublings with less than a factor 2 gain mean roundoff has taken over.
  int stalled = 0;
  while (true) {
    if (2 * s > options.max_substeps) {
      std::ostringstream msg;
      msg << "propagate: tolerance " << options.tolerance << " not reached with " << s
          << " substeps per interval (estimate " << estimate << ")";
      throw ConvergenceError(msg.str(), estimate);
    }
    s *= 2;
    auto refined = propagate_fixed(source, grid, s);
    const double last = estimate;
    estimate = op_distance(refined.back(), previous.back());
    previous = std::move(refined);
    if (estimate <= options.tolerance) break;
    stalled = (s >= kStallCheckSubsteps && estimate > 0.5 * last) ? stalled + 1 : 0;
    if (stalled >= 2) {
      std::ostringstream msg;
      msg << "propagate: error estimate stalled at " << estimate << " with " << s
          << " substeps per interval, above tolerance " << options.tolerance;
      throw ConvergenceError(msg.str(), estimate);
    }
  }
  PropagatorResult result;
  result.grid = grid;
  result.unitaries = std::move(previous);
  result.error_estimate = estimate;
  result.substeps = s;
  return result;
}

PropagatorResult propagate(const HamiltonianSource& source, const TimeGrid& grid,
                           double tolerance) {
  PropagatorOptions options;
  options.tolerance = tolerance;
  return propagate(source, grid, options);
}

ComplexMatrix rabi_oracle(double b, double r, double theta0, double omega, double t, double j) {
  const SpinRep rep = spin_matrices(j);
  const ComplexMatrix rotating =
      (b * r * std::cos(theta0) - omega) * rep.J3 + b * r * std::sin(theta0) * rep.J1;
  return expm_unitary(rep.J3, omega * t) * expm_unitary(rotating, t);
}

}  // namespace apex
