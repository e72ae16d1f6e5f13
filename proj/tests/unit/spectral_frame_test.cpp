#include <gtest/gtest.h>

#include <cmath>

#include "apex/errors.hpp"
#include "apex/propagator.hpp"
#include "apex/spectral_frame.hpp"
#include "apex/spin_model.hpp"
#include "support.hpp"

namespace apex {
namespace {

using testing::kPi;

HamiltonianSource precession_source(double j, double theta0 = kPi / 3.0, double phi0 = 0.0) {
  return dipole_source(spin_matrices(j), FieldCurve::precession(5.0, 1.0, theta0, 1.0, phi0));
}

// Smooth non-degenerate 3-level family with generic complex couplings.
HamiltonianSource smooth_family(unsigned seed) {
  const ComplexMatrix a = testing::random_hermitian(3, seed);
  const ComplexMatrix b = testing::random_hermitian(3, seed + 100);
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d.diagonal() << -2.0, 0.0, 2.0;
  return HamiltonianSource(
      3, [=](double t) -> ComplexMatrix { return d + 0.3 * (std::cos(t) * a + std::sin(2 * t) * b); },
      [=](double t) -> ComplexMatrix { return 0.3 * (-std::sin(t) * a + 2 * std::cos(2 * t) * b); });
}

TEST(EigenFrame, StaticHamiltonianPhases) {
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h.diagonal() << -1.0, 0.5, 2.0;
  const auto grid = TimeGrid::uniform(3.0, 64);
  const auto frame = build_eigenframe(HamiltonianSource::constant(h), grid);
  for (int n = 0; n < 3; ++n) {
    EXPECT_NEAR(frame.dynamical_phase.back()(n), -h(n, n).real() * 3.0, 1e-13);
    EXPECT_NEAR(frame.geometric_phase.back()(n), 0.0, 1e-14);
  }
  EXPECT_NEAR(frame.min_gap, 1.5, 1e-14);
}

TEST(EigenFrame, TotalPhaseIsSumOfParts) {
  const auto frame = build_eigenframe(smooth_family(4), TimeGrid::uniform(4.0, 100));
  for (std::size_t k = 0; k < frame.size(); ++k) {
    EXPECT_EQ(frame.total_phase[k], frame.dynamical_phase[k] + frame.geometric_phase[k]);
    EXPECT_LE(unitarity_defect(frame.frames[k]), 1e-10);
  }
}

TEST(EigenFrame, SpinHalfLoopBerryPhase) {
  const double theta0 = kPi / 3.0;
  FrameOptions opt;
  opt.gauge = GaugePolicy::FirstComponentReal;
  const auto frame = build_eigenframe(precession_source(0.5, theta0), TimeGrid::uniform(2 * kPi, 512), opt);
  for (int a = 0; a < 2; ++a) {
    const double n = a - 0.5;
    const double expect = -n * 2.0 * kPi * (1.0 - std::cos(theta0));
    EXPECT_NEAR(std::remainder(frame.geometric_phase.back()(a) - expect, 2 * kPi), 0.0, 1e-8);
  }
}

TEST(EigenFrame, GaugePoliciesShareDynamicalPhaseAndU0) {
  const auto grid = TimeGrid::uniform(2 * kPi, 256);
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto src = smooth_family(seed);
    FrameOptions a, b;
    b.gauge = GaugePolicy::FirstComponentReal;
    const auto fa = build_eigenframe(src, grid, a);
    const auto fb = build_eigenframe(src, grid, b);
    for (std::size_t k = 0; k < grid.size(); k += 17) {
      EXPECT_LE((fa.dynamical_phase[k] - fb.dynamical_phase[k]).cwiseAbs().maxCoeff(), 1e-13);
      EXPECT_LE(max_abs(build_u0(fa, k) - build_u0(fb, k)), 1e-8);
    }
  }
}

TEST(EigenFrame, CrossingRaisesDegeneracyWithTime) {
  const HamiltonianSource crossing(2, [](double t) {
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h.diagonal() << t - 0.5, 0.5 - t;
    return h;
  });
  try {
    build_eigenframe(crossing, TimeGrid::uniform(1.0, 11));
    FAIL() << "expected DegeneracyError";
  } catch (const DegeneracyError& e) {
    EXPECT_NEAR(e.time(), 0.5, 1e-12);
  }
}

TEST(EigenFrame, AmbiguousMatchRaisesTrackingError) {
  // The eigenbasis jumps by 45 degrees between samples.
  const HamiltonianSource jump(2, [](double t) {
    ComplexMatrix h(2, 2);
    if (t < 0.25) {
      h << 1.0, 0.0, 0.0, -1.0;
    } else {
      h << 0.0, 1.0, 1.0, 0.0;
    }
    return h;
  });
  EXPECT_THROW(build_eigenframe(jump, TimeGrid({0.0, 1.0})), TrackingError);
}

TEST(ConnectionMatrix, VanishesForStaticAndRadialDrives) {
  const auto grid = TimeGrid::uniform(1.0, 32);
  const auto stat = HamiltonianSource::constant(testing::random_hermitian(3, 8));
  const auto fs = build_eigenframe(stat, grid);
  EXPECT_LE(connection_matrix(fs, stat, 5).norm(), 1e-12);

  FieldCurve::Functions f;
  f.r = [](double t) { return 1.0 + t * t; };
  f.theta = [](double) { return 0.7; };
  f.phi = [](double) { return 0.4; };
  const auto radial = dipole_source(spin_matrices(1.0), FieldCurve(1.0, f));
  const auto fr = build_eigenframe(radial, grid);
  for (std::size_t k : {0u, 9u, 31u}) {
    ComplexMatrix a = connection_matrix(fr, radial, k);
    a.diagonal().setZero();
    EXPECT_LE(a.norm(), 1e-9);
  }
}

TEST(ConnectionMatrix, OffDiagonalModuliMatchSpinClosedForm) {
  const auto rep = spin_matrices(1.0);
  const auto field = FieldCurve::precession(5.0, 1.0, kPi / 3.0, 1.0);
  const auto src = dipole_source(rep, field);
  const auto grid = TimeGrid::uniform(2 * kPi, 200);
  const auto frame = build_eigenframe(src, grid);
  for (std::size_t k : {0u, 50u, 123u, 199u}) {
    const ComplexMatrix generic = connection_matrix(frame, src, k);
    const ComplexMatrix closed = spin_connection(rep, field, grid[k]);
    for (int m = 0; m < 3; ++m) {
      for (int n = 0; n < 3; ++n) {
        if (m != n) {
          EXPECT_NEAR(std::abs(generic(m, n)), std::abs(closed(m, n)), 1e-8);
        }
      }
    }
  }
}

TEST(ConnectionMatrix, FormulaAgreesWithOverlapDifferences) {
  const auto src = smooth_family(6);
  const auto grid = TimeGrid::uniform(3.0, 120);
  const auto frame = build_eigenframe(src, grid);
  const double h = 1e-4;
  for (std::size_t k : {10u, 60u, 110u}) {
    const ComplexMatrix a = connection_matrix(frame, src, k);
    const ComplexMatrix& v = frame.frames[k];
    // Neighbouring eigenvectors aligned to the frame at t_k.
    auto aligned = [&](double t) {
      ComplexMatrix w = eigh(src(t)).vectors;
      for (int n = 0; n < 3; ++n) {
        const Complex o = v.col(n).dot(w.col(n));
        w.col(n) *= std::conj(o) / std::abs(o);
      }
      return w;
    };
    const ComplexMatrix d = (aligned(grid[k] + h) - aligned(grid[k] - h)) / (2 * h);
    const ComplexMatrix fd = v.adjoint() * d;
    for (int m = 0; m < 3; ++m) {
      for (int n = 0; n < 3; ++n) {
        if (m != n) {
          EXPECT_LE(std::abs(fd(m, n) - a(m, n)), 1e-6);
        }
      }
    }
    for (int n = 0; n < 3; ++n) EXPECT_LE(std::abs(a(n, n).real()), 1e-9);
  }
}

TEST(BuildU0, IdentityAtStartAndExactForStaticH) {
  const ComplexMatrix h = testing::random_hermitian(4, 12);
  const auto grid = TimeGrid::uniform(2.0, 40);
  const auto frame = build_eigenframe(HamiltonianSource::constant(h), grid);
  EXPECT_LE(op_distance(build_u0(frame, 0), ComplexMatrix::Identity(4, 4)), 1e-14);
  for (std::size_t k : {1u, 20u, 39u}) {
    EXPECT_LE(op_distance(build_u0(frame, k), expm_unitary(h, grid[k])), 1e-12);
  }
}

TEST(BuildU0, RadialDriveMatchesOracle) {
  FieldCurve::Functions f;
  f.r = [](double t) { return 1.0 + t * t; };
  f.theta = [](double) { return 1.1; };
  f.phi = [](double) { return -0.3; };
  f.r_dot = [](double t) { return 2.0 * t; };
  f.theta_dot = [](double) { return 0.0; };
  f.phi_dot = [](double) { return 0.0; };
  const auto src = dipole_source(spin_matrices(1.5), FieldCurve(2.0, f));
  const auto grid = TimeGrid::uniform(1.0, 128);
  const auto frame = build_eigenframe(src, grid);
  const auto oracle = propagate(src, grid, 1e-10);
  for (std::size_t k = 0; k < grid.size(); k += 31) {
    EXPECT_LE(op_distance(build_u0(frame, k), oracle.unitaries[k]), 1e-8);
  }
}

TEST(MovingFrame, IdentityFrameReturnsH) {
  const auto src = smooth_family(2);
  const auto grid = TimeGrid::uniform(1.0, 50);
  const std::vector<ComplexMatrix> id(grid.size(), ComplexMatrix::Identity(3, 3));
  EXPECT_LE(op_distance(moving_frame_hamiltonian(id, src, grid, 20), src(grid[20])), 1e-12);
}

TEST(MovingFrame, InteractionPictureOfStaticHVanishes) {
  const ComplexMatrix h0 = testing::random_hermitian(3, 21);
  const auto grid = TimeGrid::uniform(1.0, 200);
  std::vector<ComplexMatrix> family;
  for (std::size_t k = 0; k < grid.size(); ++k) family.push_back(expm_unitary(h0, grid[k]).adjoint());
  const auto src = HamiltonianSource::constant(h0);
  for (std::size_t k : {0u, 100u, 199u}) {
    EXPECT_LE(moving_frame_hamiltonian(family, src, grid, k).norm(), 1e-6);
  }
}

TEST(MovingFrame, AdjointU0FrameReproducesH1) {
  const auto src = precession_source(0.5);
  const auto grid = TimeGrid::uniform(2 * kPi, 512);
  const auto frame = build_eigenframe(src, grid);
  std::vector<ComplexMatrix> family;
  for (const auto& u : build_u0_family(frame)) family.push_back(u.adjoint());
  const auto h1 = build_h1(frame, src);
  for (std::size_t k : {0u, 100u, 300u, 511u}) {
    EXPECT_LE(op_distance(moving_frame_hamiltonian(family, src, grid, k), h1.samples[k]), 1e-6);
  }
}

TEST(BuildH1, StaticHamiltonianGivesZero) {
  const auto src = HamiltonianSource::constant(testing::random_hermitian(3, 30));
  const auto grid = TimeGrid::uniform(1.0, 20);
  const auto h1 = build_h1(build_eigenframe(src, grid), src);
  for (const auto& s : h1.samples) EXPECT_EQ(s.norm(), 0.0);
}

TEST(BuildH1, OffDiagonalInFrozenBasisAndHermitian) {
  for (unsigned seed : {1u, 5u, 9u}) {
    const auto src = smooth_family(seed);
    const auto grid = TimeGrid::uniform(3.0, 150);
    const auto h1 = build_h1(build_eigenframe(src, grid), src);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const ComplexMatrix& c = h1.frozen_samples[k];
      EXPECT_LE(c.diagonal().cwiseAbs().maxCoeff(), 1e-10 * c.norm());
      EXPECT_LE(hermiticity_defect(h1.samples[k]), 1e-9 * max_abs(h1.samples[k]));
      const ComplexMatrix lab = h1.frozen_basis * c * h1.frozen_basis.adjoint();
      EXPECT_LE(op_distance(lab, h1.samples[k]), 1e-12);
    }
  }
}

}  // namespace
}  // namespace apex
