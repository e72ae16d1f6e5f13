#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "apex/errors.hpp"
#include "apex/solvable.hpp"
#include "support.hpp"

namespace apex {
namespace {

using testing::kPi;

TEST(SolvableRadius, ConstantAngleGivesConstantRadius) {
  const auto grid = TimeGrid::uniform(2 * kPi, 128);
  const double th = 0.6, w = 1.7, b = 2.0;
  const auto p = solvable_radius(AngleProfile::constant(th), PhaseSchedule::linear(w), b, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(p.generated.r(grid[k]), w * std::cos(th) / b, 1e-15);
  }
  EXPECT_NEAR(p.positivity_margin, w * std::cos(th) / b, 1e-15);
}

TEST(SolvableRadius, SigmaIsStationary) {
  const auto grid = TimeGrid::uniform(2 * kPi, 256);
  for (const auto& shape : {AngleProfile::constant(kPi / 4), AngleProfile::sinusoidal(kPi / 4, 0.1),
                            AngleProfile::sinusoidal(0.5, 0.2)}) {
    const auto p = solvable_radius(shape, PhaseSchedule::linear(1.0), 1.0, grid);
    for (std::size_t k = 0; k < grid.size(); k += 5) {
      EXPECT_LE(std::abs(sigma_rate(p.generated, grid[k])), 1e-8 * p.b);
    }
  }
}

TEST(SolvableRadius, NumericalAngleDerivativesMatchAnalytic) {
  const auto grid = TimeGrid::uniform(3.0, 64);
  // Numeric angle derivatives use central differences, so agreement is O(h^2).
  AngleProfile numeric;
  numeric.theta = [](double p) { return kPi / 4 + 0.1 * std::sin(p); };
  const auto a = solvable_radius(AngleProfile::sinusoidal(kPi / 4, 0.1), PhaseSchedule::linear(1.3), 1.0, grid);
  const auto n = solvable_radius(numeric, PhaseSchedule::linear(1.3), 1.0, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(a.generated.r(grid[k]), n.generated.r(grid[k]), 1e-7);
  }
}

TEST(SolvableRadius, NegativeRadiusReportsInterval) {
  const auto grid = TimeGrid::uniform(2 * kPi, 200);
  // Large wobbles push r below zero on roughly [4.398, 5.027] (direct evaluation of the formula).
  try {
    solvable_radius(AngleProfile::sinusoidal(1.2, 0.6), PhaseSchedule::linear(1.0), 1.0, grid);
    FAIL() << "expected InfeasibleProfileError";
  } catch (const InfeasibleProfileError& e) {
    EXPECT_NEAR(e.t_begin(), 4.398, 0.04);
    EXPECT_NEAR(e.t_end(), 5.027, 0.04);
  }
  // The dip near t = 4.71 is about one grid spacing wide and only a few 1e-4 deep.
  EXPECT_THROW(solvable_radius(AngleProfile::sinusoidal(1.3, 0.5), PhaseSchedule::linear(1.0), 1.0, grid),
               InfeasibleProfileError);
  EXPECT_THROW(solvable_radius(AngleProfile::constant(2.0), PhaseSchedule::linear(1.0), 1.0, grid),
               InfeasibleProfileError);
}

TEST(SolvableRadius, DomainAndScheduleChecks) {
  const auto grid = TimeGrid::uniform(1.0, 32);
  EXPECT_THROW(solvable_radius(AngleProfile::constant(0.0), PhaseSchedule::linear(1.0), 1.0, grid),
               DomainError);
  EXPECT_THROW(solvable_radius(AngleProfile::constant(0.5), PhaseSchedule::linear(-1.0), 1.0, grid),
               ValidationError);
  EXPECT_THROW(solvable_radius(AngleProfile::constant(0.5), PhaseSchedule::linear(1.0), 0.0, grid),
               ValidationError);
}

TEST(CertifyExact, ConstantProfileGrantedForSeveralSpins) {
  const auto grid = TimeGrid::uniform(2 * kPi, 256);
  const auto p = solvable_radius(AngleProfile::constant(kPi / 4), PhaseSchedule::linear(1.0), 1.0, grid);
  for (double j : {0.5, 1.0}) {
    const auto c = certify_exact(p, spin_matrices(j), grid, 1e-6);
    EXPECT_TRUE(c.granted);
    EXPECT_LE(c.max_distance, 1e-6);
    EXPECT_LE(c.final_distance, c.max_distance);
    EXPECT_LE(c.residual, c.residual_bound);
    EXPECT_LE(c.sigma_rate_max, 1e-8);
  }
}

TEST(CertifyExact, OffManifoldProfilesFail) {
  const auto grid = TimeGrid::uniform(2 * kPi, 256);
  const auto p = solvable_radius(AngleProfile::constant(kPi / 4), PhaseSchedule::linear(1.0), 1.0, grid);
  for (double factor : {1.05, 1.01, 0.99}) {
    const auto c = certify_exact(scale_radius(p, factor, grid), spin_matrices(0.5), grid, 1e-6);
    EXPECT_FALSE(c.granted) << factor;
    EXPECT_GT(c.residual, c.residual_bound);
  }
}

TEST(CertifyField, RadialDriveGrantedWithPhaseOnlyFirstFactor) {
  FieldCurve::Functions f;
  f.r = [](double t) { return 1.0 + t * t; };
  f.theta = [](double) { return 0.7; };
  f.phi = [](double) { return 0.2; };
  f.r_dot = [](double t) { return 2 * t; };
  f.theta_dot = [](double) { return 0.0; };
  f.phi_dot = [](double) { return 0.0; };
  const auto grid = TimeGrid::uniform(1.0, 64);
  const auto c = certify_field(FieldCurve(1.0, f), spin_matrices(1.0), grid, 1e-6);
  EXPECT_TRUE(c.granted);
  EXPECT_TRUE(c.chain_exact);
  EXPECT_EQ(c.chain_levels, 1);
}

TEST(FieldProfile, RoundTripsThroughCsv) {
  const auto grid = TimeGrid::uniform(2.0, 65);
  const auto p = solvable_radius(AngleProfile::sinusoidal(kPi / 4, 0.1), PhaseSchedule::linear(1.0), 1.0, grid);
  std::stringstream csv;
  write_field_profile(csv, p.generated, grid);
  TimeGrid back{std::vector<double>{0.0, 1.0}};
  const auto read = read_field_profile(csv, 1.0, &back);
  ASSERT_EQ(back.size(), grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_EQ(back[k], grid[k]);
    EXPECT_EQ(read.r(grid[k]), p.generated.r(grid[k]));
    EXPECT_EQ(read.theta(grid[k]), p.generated.theta(grid[k]));
  }
  EXPECT_NEAR(read.theta(0.51), p.generated.theta(0.51), 1e-7);
}

TEST(FieldProfile, RejectsMalformedInput) {
  std::istringstream bad_header("time,r,theta,phi\n0,1,1,0\n");
  EXPECT_THROW(read_field_profile(bad_header, 1.0), ValidationError);
  std::istringstream not_increasing("t,r,theta,phi\n0,1,1,0\n0.5,1,1,0\n0.5,1,1,0\n1,1,1,0\n");
  EXPECT_THROW(read_field_profile(not_increasing, 1.0), ValidationError);
  std::istringstream short_row("t,r,theta,phi\n0,1,1\n");
  EXPECT_THROW(read_field_profile(short_row, 1.0), ValidationError);
  std::istringstream negative_r("t,r,theta,phi\n0,1,1,0\n1,-1,1,0\n2,1,1,0\n3,1,1,0\n");
  EXPECT_THROW(read_field_profile(negative_r, 1.0), ValidationError);
}

}  // namespace
}  // namespace apex
