#include "apex/interpolation.hpp"

#include <numbers>

namespace apex {

std::vector<double> finite_difference_weights(std::span<const double> nodes, double x,
                                              int order) {
  const int n = static_cast<int>(nodes.size());
  if (n == 0 || order < 0 || order >= n) {
    throw ValidationError("finite_difference_weights: need more nodes than the derivative order");
  }
  // c[j][m]: weight of node j for the m-th derivative.
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][order];
  return w;
}

double numeric_derivative(const std::function<double(double)>& f, double t, double step) {
  const auto centred = [&](double h) { return (f(t + h) - f(t - h)) / (2.0 * h); };
  return (4.0 * centred(0.5 * step) - centred(step)) / 3.0;
}

double unwrap_near(double value, double reference, double period) {
  return value - period * std::round((value - reference) / period);
}

}  // namespace apex
