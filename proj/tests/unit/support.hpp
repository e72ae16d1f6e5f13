#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "apex/operator_core.hpp"

namespace apex::testing {

inline constexpr double kPi = std::numbers::pi;

/// Seeded GUE-like sample, entries of order one.
inline ComplexMatrix random_hermitian(int dim, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  ComplexMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < dim; ++k) m(i, k) = Complex(normal(gen), normal(gen));
  }
  return 0.5 * (m + m.adjoint());
}

/// exp(-i h dt) by scaling and squaring of the Taylor series; shares no code
/// with the eigen-decomposition route.
inline ComplexMatrix taylor_expm(const ComplexMatrix& h, double dt) {
  const ComplexMatrix a = Complex(0.0, -dt) * h;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (std::ldexp(norm, -squarings) > 0.25) ++squarings;
  const ComplexMatrix scaled = std::ldexp(1.0, -squarings) * a;
  ComplexMatrix term = ComplexMatrix::Identity(h.rows(), h.cols());
  ComplexMatrix sum = term;
  for (int n = 1; n <= 30; ++n) {
    term = term * scaled / static_cast<double>(n);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace apex::testing
