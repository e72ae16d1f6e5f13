#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "apex/hamiltonian_source.hpp"
#include "apex/interpolation.hpp"
#include "support.hpp"

namespace apex {
namespace {

TEST(FiniteDifferenceWeights, CentredStencils) {
  const std::vector<double> three{-1.0, 0.0, 1.0};
  const auto d1 = finite_difference_weights(three, 0.0, 1);
  EXPECT_NEAR(d1[0], -0.5, 1e-15);
  EXPECT_NEAR(d1[1], 0.0, 1e-15);
  EXPECT_NEAR(d1[2], 0.5, 1e-15);
  const auto d2 = finite_difference_weights(three, 0.0, 2);
  EXPECT_NEAR(d2[0], 1.0, 1e-15);
  EXPECT_NEAR(d2[1], -2.0, 1e-15);
  EXPECT_NEAR(d2[2], 1.0, 1e-15);
}

TEST(FiniteDifferenceWeights, ExactOnPolynomialsOfLowDegree) {
  const std::vector<double> nodes{0.0, 0.3, 0.7, 1.5, 2.0};
  const auto w = finite_difference_weights(nodes, 0.9, 1);
  // Five nodes differentiate quartics exactly.
  const auto p = [](double x) { return 2.0 - x + 3.0 * x * x - 0.5 * std::pow(x, 4); };
  const auto dp = [](double x) { return -1.0 + 6.0 * x - 2.0 * std::pow(x, 3); };
  double sum = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) sum += w[j] * p(nodes[j]);
  EXPECT_NEAR(sum, dp(0.9), 1e-12);
}

TEST(NumericDerivative, FourthOrderAccurate) {
  const auto f = [](double t) { return std::sin(3.0 * t); };
  EXPECT_NEAR(numeric_derivative(f, 0.4, 1e-3), 3.0 * std::cos(1.2), 1e-11);
}

TEST(UnwrapNear, PicksNearestImage) {
  EXPECT_NEAR(unwrap_near(-3.1, 3.1, 2.0 * testing::kPi), -3.1 + 2.0 * testing::kPi, 1e-15);
  EXPECT_NEAR(unwrap_near(0.2, 9.6, testing::kPi), 0.2 + 3.0 * testing::kPi, 1e-14);
  EXPECT_DOUBLE_EQ(unwrap_near(1.0, 1.2, 2.0 * testing::kPi), 1.0);
}

TEST(CubicSpline, ReproducesCubicsOnIrregularKnots) {
  const std::vector<double> knots{0.0, 0.1, 0.35, 0.4, 0.8, 1.3, 1.31, 2.0};
  const auto p = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x + 0.75 * x * x * x; };
  std::vector<double> values;
  for (double x : knots) values.push_back(p(x));
  const CubicSpline<double> s(knots, values);
  for (double x = 0.0; x <= 2.0; x += 0.013) {
    EXPECT_NEAR(s(x), p(x), 1e-12);
    EXPECT_NEAR(s.derivative(x), -2.0 + x + 2.25 * x * x, 1e-11);
    EXPECT_NEAR(s.second_derivative(x), 1.0 + 4.5 * x, 1e-9);
  }
}

TEST(CubicSpline, FourthOrderConvergence) {
  const auto err = [](std::size_t n) {
    const auto g = TimeGrid::uniform(3.0, n);
    std::vector<double> knots(g.times().begin(), g.times().end()), values;
    for (double t : knots) values.push_back(std::sin(2.0 * t));
    const CubicSpline<double> s(knots, values);
    double e = 0.0;
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
      e = std::max(e, std::abs(s(g.midpoint(k)) - std::sin(2.0 * g.midpoint(k))));
    }
    return e;
  };
  const double ratio = err(33) / err(65);
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 24.0);
}

TEST(CubicSpline, MatrixValuesInterpolateEntrywise) {
  const auto g = TimeGrid::uniform(1.0, 40);
  std::vector<double> knots(g.times().begin(), g.times().end());
  std::vector<ComplexMatrix> values;
  for (double t : knots) {
    ComplexMatrix m(2, 2);
    m << std::cos(t), Complex(0.0, t), Complex(0.0, -t), t * t;
    values.push_back(m);
  }
  const CubicSpline<ComplexMatrix> s(knots, values);
  const ComplexMatrix mid = s(0.5123);
  EXPECT_NEAR(mid(0, 0).real(), std::cos(0.5123), 1e-8);
  EXPECT_NEAR(mid(0, 1).imag(), 0.5123, 1e-13);
  EXPECT_NEAR(mid(1, 1).real(), 0.5123 * 0.5123, 1e-13);
}

TEST(CubicSpline, RejectsBadKnots) {
  EXPECT_THROW(CubicSpline<double>({0.0}, {1.0}), ValidationError);
  EXPECT_THROW(CubicSpline<double>({0.0, 0.0, 1.0}, {1.0, 2.0, 3.0}), ValidationError);
  EXPECT_THROW(CubicSpline<double>({0.0, 1.0}, {1.0}), ValidationError);
}

TEST(InterpolationResidual, SmallForResolvedLargeForAliased) {
  const auto sample = [](std::size_t n, double freq) {
    const auto g = TimeGrid::uniform(1.0, n);
    std::vector<ComplexMatrix> s;
    for (std::size_t k = 0; k < g.size(); ++k) {
      s.push_back(ComplexMatrix::Constant(1, 1, std::sin(freq * g[k])));
    }
    return interpolation_residual(g, s);
  };
  EXPECT_LT(sample(257, 3.0), 1e-8);
  EXPECT_GT(sample(17, 40.0), 1e-3);
}

TEST(HamiltonianSource, SampledSourceIsHermitianBetweenKnots) {
  const auto g = TimeGrid::uniform(1.0, 30);
  std::vector<ComplexMatrix> s;
  for (std::size_t k = 0; k < g.size(); ++k) {
    s.push_back(testing::random_hermitian(3, 1) * std::cos(g[k]) +
                testing::random_hermitian(3, 2) * g[k]);
  }
  const auto src = HamiltonianSource::from_samples(g, s);
  EXPECT_TRUE(is_hermitian(src(0.4321)));
  EXPECT_LE(op_distance(src(g[7]), s[7]), 1e-14);
  const ComplexMatrix d = src.derivative(0.5, g.step(0));
  const ComplexMatrix exact =
      -std::sin(0.5) * testing::random_hermitian(3, 1) + testing::random_hermitian(3, 2);
  EXPECT_LE(op_distance(d, exact), 1e-4);
}

TEST(HamiltonianSource, ConstantSourceHasZeroDerivative) {
  const auto src = HamiltonianSource::constant(testing::random_hermitian(4, 9));
  EXPECT_EQ(src.derivative(0.3, 0.1).norm(), 0.0);
}

}  // namespace
}  // namespace apex
