#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "apex/errors.hpp"

namespace apex {

/// Weights w_j such that sum_j w_j f(nodes[j]) approximates f^(order)(x)
/// (Fornberg's recursion, exact for polynomials of degree < nodes.size()).
std::vector<double> finite_difference_weights(std::span<const double> nodes, double x,
                                              int order);

/// Fourth-order Richardson-extrapolated centred difference of a scalar function.
double numeric_derivative(const std::function<double(double)>& f, double t, double step);

/// Wraps `value` by multiples of `period` so it lies within period/2 of `reference`.
double unwrap_near(double value, double reference, double period);

/// Clamped cubic spline over arbitrary strictly increasing knots.  The end
/// slopes come from the cubic through the first (last) four samples, which
/// keeps the interpolant fourth-order accurate up to the boundaries.
///
/// `Value` is anything closed under +, - and scalar multiplication: double,
/// Eigen vectors, Eigen matrices.
template <class Value>
class CubicSpline {
 public:
  CubicSpline() = default;

  CubicSpline(std::vector<double> knots, std::vector<Value> values)
      : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.size() != values_.size() || knots_.size() < 2) {
      throw ValidationError("CubicSpline: need at least two knots with one value each");
    }
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (!(knots_[i] > knots_[i - 1])) {
        throw ValidationError("CubicSpline: knots must be strictly increasing");
      }
    }
    solve_moments();
  }

  std::size_t size() const { return knots_.size(); }
  std::span<const double> knots() const { return knots_; }
  std::span<const Value> values() const { return values_; }

  Value operator()(double t) const {
    const std::size_t i = interval(t);
    const double h = knots_[i + 1] - knots_[i];
    const double a = (knots_[i + 1] - t) / h;
    const double b = (t - knots_[i]) / h;
    return a * values_[i] + b * values_[i + 1] +
           ((a * a * a - a) * (h * h / 6.0)) * moments_[i] +
           ((b * b * b - b) * (h * h / 6.0)) * moments_[i + 1];
  }

  Value derivative(double t) const {
    const std::size_t i = interval(t);
    const double h = knots_[i + 1] - knots_[i];
    const double a = (knots_[i + 1] - t) / h;
    const double b = (t - knots_[i]) / h;
    return (1.0 / h) * (values_[i + 1] - values_[i]) -
           ((3.0 * a * a - 1.0) * h / 6.0) * moments_[i] +
           ((3.0 * b * b - 1.0) * h / 6.0) * moments_[i + 1];
  }

  Value second_derivative(double t) const {
    const std::size_t i = interval(t);
    const double h = knots_[i + 1] - knots_[i];
    const double a = (knots_[i + 1] - t) / h;
    const double b = (t - knots_[i]) / h;
    return a * moments_[i] + b * moments_[i + 1];
  }

 private:
  std::size_t interval(double t) const {
    if (t <= knots_.front()) return 0;
    if (t >= knots_.back()) return knots_.size() - 2;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    return static_cast<std::size_t>(it - knots_.begin()) - 1;
  }

  Value end_slope(bool at_start) const {
    const std::size_t n = knots_.size();
    const std::size_t m = std::min<std::size_t>(4, n);
    std::vector<double> nodes(m);
    const std::size_t first = at_start ? 0 : n - m;
    for (std::size_t j = 0; j < m; ++j) nodes[j] = knots_[first + j];
    auto w = finite_difference_weights(nodes, at_start ? knots_.front() : knots_.back(), 1);
    Value slope = w[0] * values_[first];
    for (std::size_t j = 1; j < m; ++j) slope = slope + w[j] * values_[first + j];
    return slope;
  }

  // Thomas algorithm on the clamped-spline moment equations.
  void solve_moments() {
    const std::size_t n = knots_.size();
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = knots_[i + 1] - knots_[i];

    std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0);
    std::vector<Value> rhs(n, 0.0 * values_[0]);

    const Value slope0 = end_slope(true);
    const Value slope1 = end_slope(false);

    diag[0] = 2.0 * h[0];
    upper[0] = h[0];
    rhs[0] = 6.0 * ((1.0 / h[0]) * (values_[1] - values_[0]) - slope0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      lower[i] = h[i - 1];
      diag[i] = 2.0 * (h[i - 1] + h[i]);
      upper[i] = h[i];
      rhs[i] = 6.0 * ((1.0 / h[i]) * (values_[i + 1] - values_[i]) -
                      (1.0 / h[i - 1]) * (values_[i] - values_[i - 1]));
    }
    lower[n - 1] = h[n - 2];
    diag[n - 1] = 2.0 * h[n - 2];
    rhs[n - 1] = 6.0 * (slope1 - (1.0 / h[n - 2]) * (values_[n - 1] - values_[n - 2]));

    for (std::size_t i = 1; i < n; ++i) {
      const double f = lower[i] / diag[i - 1];
      diag[i] -= f * upper[i - 1];
      rhs[i] = rhs[i] - f * rhs[i - 1];
    }
    moments_.assign(n, 0.0 * values_[0]);
    moments_[n - 1] = (1.0 / diag[n - 1]) * rhs[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
      moments_[i] = (1.0 / diag[i]) * (rhs[i] - upper[i] * moments_[i + 1]);
    }
  }

  std::vector<double> knots_;
  std::vector<Value> values_;
  std::vector<Value> moments_;
};

}  // namespace apex
