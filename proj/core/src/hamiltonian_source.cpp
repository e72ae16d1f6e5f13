#include "apex/hamiltonian_source.hpp"

#include <cmath>

#include "apex/errors.hpp"

namespace apex {

HamiltonianSource::HamiltonianSource(int dim, Eval eval, Eval derivative)
    : dim_(dim), eval_(std::move(eval)), derivative_(std::move(derivative)) {
  if (dim_ <= 0) throw ValidationError("HamiltonianSource: dimension must be positive");
  if (!eval_) throw ValidationError("HamiltonianSource: missing evaluation callable");
}

HamiltonianSource HamiltonianSource::from_samples(const TimeGrid& grid,
                                                  std::vector<ComplexMatrix> samples) {
  if (samples.size() != grid.size()) {
    throw ValidationError("HamiltonianSource::from_samples: one sample per grid point required");
  }
  const int dim = static_cast<int>(samples.front().rows());
  for (const auto& s : samples) {
    if (s.rows() != dim || s.cols() != dim) {
      throw ValidationError("HamiltonianSource::from_samples: inconsistent sample dimensions");
    }
  }
  auto spline = std::make_shared<const CubicSpline<ComplexMatrix>>(
      std::vector<double>(grid.times().begin(), grid.times().end()), std::move(samples));
  // Spline arithmetic keeps Hermiticity only up to round-off; re-symmetrise.
  HamiltonianSource src(
      dim,
      [spline](double t) -> ComplexMatrix {
        const ComplexMatrix m = (*spline)(t);
        return 0.5 * (m + m.adjoint());
      },
      [spline](double t) -> ComplexMatrix {
        const ComplexMatrix m = spline->derivative(t);
        return 0.5 * (m + m.adjoint());
      });
  src.spline_ = std::move(spline);
  return src;
}

HamiltonianSource HamiltonianSource::constant(const ComplexMatrix& h) {
  if (!is_hermitian(h)) throw ValidationError("HamiltonianSource::constant: not Hermitian");
  const ComplexMatrix zero = ComplexMatrix::Zero(h.rows(), h.cols());
  return HamiltonianSource(
      static_cast<int>(h.rows()), [h](double) { return h; }, [zero](double) { return zero; });
}

ComplexMatrix HamiltonianSource::derivative(double t, double spacing,
                                            const DerivativeOptions& options) const {
  if (derivative_) return derivative_(t);
  const double h = spacing * options.step_fraction;
  if (!(h > 0.0)) throw ValidationError("HamiltonianSource::derivative: step must be positive");
  const auto centred = [&](double step) -> ComplexMatrix {
    return (eval_(t + step) - eval_(t - step)) / (2.0 * step);
  };
  if (!options.richardson) return centred(h);
  return (4.0 * centred(0.5 * h) - centred(h)) / 3.0;
}

double interpolation_residual(const TimeGrid& grid, const std::vector<ComplexMatrix>& samples) {
  if (samples.size() != grid.size()) {
    throw ValidationError("interpolation_residual: one sample per grid point required");
  }
  double scale = 0.0;
  for (const auto& s : samples) scale = std::max(scale, s.norm());
  if (scale == 0.0 || grid.size() < 8) return 0.0;

  std::vector<double> knots;
  std::vector<ComplexMatrix> values;
  for (std::size_t k = 0; k < grid.size(); k += 2) {
    knots.push_back(grid[k]);
    values.push_back(samples[k]);
  }
  if (knots.back() != grid.back()) {
    knots.push_back(grid.back());
    values.push_back(samples.back());
  }
  const CubicSpline<ComplexMatrix> coarse(std::move(knots), std::move(values));
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < grid.size(); k += 2) {
    worst = std::max(worst, (coarse(grid[k]) - samples[k]).norm());
  }
  return worst / 16.0 / scale;
}

}  // namespace apex
