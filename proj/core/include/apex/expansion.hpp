#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "apex/hamiltonian_source.hpp"
#include "apex/spectral_frame.hpp"

namespace apex {

struct ExpansionOptions {
  FrameOptions frame;
  /// A level whose sup norm is below exact_relative * sup ||H0|| counts as zero.
  double exact_relative = 1e-8;
  /// Largest order accepted by expand().
  int max_order = 4;
  /// Sampled levels whose interpolation_residual exceeds this are rejected.
  double resolution_tolerance = 1e-3;
};

struct ExpansionLevel {
  int index = 0;
  HamiltonianSource hamiltonian;
  std::vector<ComplexMatrix> samples;
  EigenFrame frame;
  /// U^(i)(t_k)
  std::vector<ComplexMatrix> factors;
  /// sup_k ||H^(i)(t_k)||_F
  double sup_norm = 0.0;
  /// interpolation_residual of the samples (0 for level 0).
  double interpolation_residual = 0.0;
};

/// Levels 0..N of the adiabatic product expansion with the residual level.
struct ExpansionChain {
  int requested_order = 0;
  TimeGrid grid{std::vector<double>{0.0, 1.0}};
  std::vector<ExpansionLevel> levels;
  /// H^(L)(t_k) where L = levels.size(), in the computational basis.
  std::vector<ComplexMatrix> residual_samples;
  /// Same, in the frozen eigenbasis of the last level.
  std::vector<ComplexMatrix> residual_frozen_samples;
  double residual = 0.0;
  /// Set when some H^(i), i <= N + 1, vanished and the chain stopped early.
  bool exact = false;
  std::optional<int> exact_level;

  /// Index of the last factor in the chain.
  int order() const { return static_cast<int>(levels.size()) - 1; }
};

ExpansionChain expand(const HamiltonianSource& source, const TimeGrid& grid, int order,
                      const ExpansionOptions& options = {});

/// U^(0)(t_k) U^(1)(t_k) ... U^(N)(t_k), left to right.
ComplexMatrix product_approximation(const ExpansionChain& chain, std::size_t k);

/// Product truncated after level `last_level` (clamped to the chain length).
ComplexMatrix product_approximation(const ExpansionChain& chain, std::size_t k, int last_level);

/// sup_k ||H^(N+1)(t_k)||_F
double residual_norm(const ExpansionChain& chain);

}  // namespace apex
