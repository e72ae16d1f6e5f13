#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "apex/hamiltonian_source.hpp"
#include "apex/operator_core.hpp"

namespace apex {

enum class GaugePolicy {
  /// Each eigenvector is rephased so its overlap with the previous sample is
  /// real and positive (discrete parallel transport).
  PositiveOverlap,
  /// The largest-magnitude component of each eigenvector is made real positive.
  FirstComponentReal,
};

struct FrameOptions {
  GaugePolicy gauge = GaugePolicy::PositiveOverlap;
  /// Gap floor relative to the largest |E_n(t_k)| on the grid.
  double gap_relative = 1e-9;
  /// Two candidate overlaps closer than this make level matching ambiguous.
  double ambiguity = 1e-6;
  DerivativeOptions derivative;
};

/// Instantaneous eigen-decomposition of a Hamiltonian family, tracked and
/// gauge-fixed along a time grid.  Level label n is the ascending energy
/// index at t = 0 and is carried along by overlap matching.
///
/// Midpoint samples are kept alongside the grid samples: they feed the
/// Simpson rule for the dynamical phase and the Richardson step for the
/// geometric phase.
struct EigenFrame {
  TimeGrid grid{std::vector<double>{0.0, 1.0}};
  GaugePolicy gauge = GaugePolicy::PositiveOverlap;

  std::vector<RealVector> energies;        // [k](n)
  std::vector<ComplexMatrix> frames;       // [k] columns |n; t_k>
  std::vector<RealVector> mid_energies;    // [k] at (t_k + t_{k+1}) / 2
  std::vector<ComplexMatrix> mid_frames;

  std::vector<RealVector> dynamical_phase;  // delta_n(t_k)
  std::vector<RealVector> geometric_phase;  // gamma_n(t_k)
  std::vector<RealVector> total_phase;      // alpha_n = delta_n + gamma_n

  double min_gap = 0.0;
  double gap_floor = 0.0;

  int dim() const { return static_cast<int>(frames.front().cols()); }
  std::size_t size() const { return frames.size(); }
};

EigenFrame build_eigenframe(const HamiltonianSource& source, const TimeGrid& grid,
                            const FrameOptions& options = {});

/// A_mn(t_k) = <m; t_k| d/dt |n; t_k> in the frame's gauge.  Off-diagonal
/// entries come from <m|dH/dt|n> / (E_n - E_m); the diagonal from the
/// overlap phases of neighbouring frame samples.
ComplexMatrix connection_matrix(const EigenFrame& frame, const HamiltonianSource& source,
                                std::size_t k, const FrameOptions& options = {});

/// sum_n exp(i alpha_n(t_k)) |n; t_k><n; 0|
ComplexMatrix build_u0(const EigenFrame& frame, std::size_t k);

/// All of build_u0 along the grid.
std::vector<ComplexMatrix> build_u0_family(const EigenFrame& frame);

/// G H G^dagger - i G dG^dagger/dt at t_k for a unitary family G sampled on
/// `grid`.  The derivative uses a five-point finite-difference stencil
/// (fewer points near the ends of short grids).
ComplexMatrix moving_frame_hamiltonian(std::span<const ComplexMatrix> family,
                                       const HamiltonianSource& source, const TimeGrid& grid,
                                       std::size_t k);

/// Moving-frame Hamiltonian of the adiabatic frame, sampled on the grid.
struct TransformedHamiltonian {
  /// Cubic-spline source through `samples`.
  HamiltonianSource source;
  /// Matrices in the computational basis.
  std::vector<ComplexMatrix> samples;
  /// The same matrices in the frozen eigenbasis {|n; 0>}; strictly off-diagonal.
  std::vector<ComplexMatrix> frozen_samples;
  /// Columns |n; 0>.
  ComplexMatrix frozen_basis;
};

/// H1(t_k) = i sum_{m != n} exp(-i[alpha_m - alpha_n]) <m|dH/dt|n> / (E_m - E_n) |m;0><n;0|
TransformedHamiltonian build_h1(const EigenFrame& frame, const HamiltonianSource& source,
                                const FrameOptions& options = {});

}  // namespace apex
