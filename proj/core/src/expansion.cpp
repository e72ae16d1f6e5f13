#include "apex/expansion.hpp"

#include <sstream>

#include "apex/errors.hpp"

namespace apex {

DegeneracyError DegeneracyError::at_expansion_level(int level) const {
  std::ostringstream msg;
  msg << "expansion level " << level << ": " << what();
  return DegeneracyError(msg.str(), time_, level_a_, level_b_, level);
}

namespace {

double sup_norm(const std::vector<ComplexMatrix>& samples) {
  double s = 0.0;
  for (const auto& m : samples) s = std::max(s, m.norm());
  return s;
}

}  // namespace

ExpansionChain expand(const HamiltonianSource& source, const TimeGrid& grid, int order,
                      const ExpansionOptions& options) {
  if (order < 0) throw ValidationError("expand: order must be non-negative");
  if (order > options.max_order) {
    std::ostringstream msg;
    msg << "expand: order " << order << " exceeds the cap of " << options.max_order;
    throw ValidationError(msg.str());
  }

  ExpansionChain chain;
  chain.requested_order = order;
  chain.grid = grid;

  HamiltonianSource current = source;
  std::vector<ComplexMatrix> samples;
  samples.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) samples.push_back(source(grid[k]));
  const double sup0 = sup_norm(samples);
  double interp_residual = 0.0;

  for (int i = 0; i <= order; ++i) {
    ExpansionLevel level;
    level.index = i;
    level.hamiltonian = current;
    level.sup_norm = sup_norm(samples);
    level.interpolation_residual = interp_residual;
    try {
      level.frame = build_eigenframe(current, grid, options.frame);
    } catch (const DegeneracyError& e) {
      throw e.at_expansion_level(i);
    }
    level.factors = build_u0_family(level.frame);

    TransformedHamiltonian next;
    try {
      next = build_h1(level.frame, current, options.frame);
    } catch (const DegeneracyError& e) {
      throw e.at_expansion_level(i);
    }
    level.samples = std::move(samples);
    chain.levels.push_back(std::move(level));

    const double next_sup = sup_norm(next.samples);
    chain.residual_samples = next.samples;
    chain.residual_frozen_samples = next.frozen_samples;
    chain.residual = next_sup;
    if (next_sup <= options.exact_relative * sup0) {
      chain.exact = true;
      chain.exact_level = i + 1;
      break;
    }
    if (i == order) break;

    interp_residual = interpolation_residual(grid, next.samples);
    if (interp_residual > options.resolution_tolerance) {
      std::ostringstream msg;
      msg << "expansion level " << i + 1 << ": grid too coarse, interpolation residual "
          << interp_residual << " exceeds " << options.resolution_tolerance;
      throw ResolutionError(msg.str());
    }
    current = next.source;
    samples = std::move(next.samples);
  }
  return chain;
}

ComplexMatrix product_approximation(const ExpansionChain& chain, std::size_t k, int last_level) {
  if (k >= chain.grid.size()) throw ValidationError("product_approximation: index out of range");
  const int top = std::min<int>(last_level, chain.order());
  ComplexMatrix p = chain.levels[0].factors[k];
  for (int i = 1; i <= top; ++i) p = p * chain.levels[static_cast<std::size_t>(i)].factors[k];
  return p;
}

ComplexMatrix product_approximation(const ExpansionChain& chain, std::size_t k) {
  return product_approximation(chain, k, chain.order());
}

double residual_norm(const ExpansionChain& chain) { return chain.residual; }

}  // namespace apex
