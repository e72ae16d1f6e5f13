#include "apex/spectral_frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "apex/errors.hpp"
#include "apex/interpolation.hpp"

namespace apex {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double phase_of(Complex z) { return std::arg(z); }

Complex unit_phase(Complex z) {
  const double m = std::abs(z);
  return m > 0.0 ? z / m : Complex(1.0, 0.0);
}

// Index of the largest-magnitude component; near-ties go to the lowest index
// so the choice does not flicker between samples.
Eigen::Index dominant_component(const Eigen::VectorXcd& v) {
  const double top = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= (1.0 - 1e-8) * top) return i;
  }
  return 0;
}

void make_dominant_real(Eigen::Ref<Eigen::VectorXcd> v) {
  const Eigen::Index i = dominant_component(v);
  v *= std::conj(unit_phase(v(i)));
}

double local_spacing(const TimeGrid& grid, std::size_t k) {
  if (k == 0) return grid.step(0);
  if (k + 1 == grid.size()) return grid.step(k - 1);
  return std::min(grid.step(k - 1), grid.step(k));
}

struct Sample {
  double t;
  RealVector values;
  ComplexMatrix vectors;
};

}  // namespace

EigenFrame build_eigenframe(const HamiltonianSource& source, const TimeGrid& grid,
                            const FrameOptions& options) {
  const std::size_t m = grid.size();
  const int dim = source.dim();

  // Interleaved samples: t_0, mid_0, t_1, mid_1, ..., t_{M-1}.
  std::vector<Sample> samples;
  samples.reserve(2 * m - 1);
  for (std::size_t k = 0; k < m; ++k) {
    const double t = grid[k];
    auto ed = eigh(source(t));
    if (ed.values.size() != dim) throw ValidationError("build_eigenframe: source dimension changed");
    samples.push_back({t, std::move(ed.values), std::move(ed.vectors)});
    if (k + 1 < m) {
      const double tm = grid.midpoint(k);
      auto mid = eigh(source(tm));
      samples.push_back({tm, std::move(mid.values), std::move(mid.vectors)});
    }
  }

  double emax = 0.0;
  for (const auto& s : samples) emax = std::max(emax, s.values.cwiseAbs().maxCoeff());
  const double floor = options.gap_relative * emax;
  double min_gap = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    for (int a = 0; a + 1 < dim; ++a) {
      const double gap = s.values(a + 1) - s.values(a);
      min_gap = std::min(min_gap, gap);
      if (gap <= floor) {
        std::ostringstream msg;
        msg << "levels " << a << " and " << a + 1 << " are degenerate at t=" << s.t
            << " (gap " << gap << ", floor " << floor << ")";
        throw DegeneracyError(msg.str(), s.t, a, a + 1);
      }
    }
  }

  // Track labels by maximum overlap and fix the gauge.
  std::vector<RealVector> energies(samples.size(), RealVector(dim));
  std::vector<ComplexMatrix> frames(samples.size(), ComplexMatrix(dim, dim));
  energies[0] = samples[0].values;
  frames[0] = samples[0].vectors;
  for (int n = 0; n < dim; ++n) make_dominant_real(frames[0].col(n));

  for (std::size_t s = 1; s < samples.size(); ++s) {
    const ComplexMatrix& prev = frames[s - 1];
    const ComplexMatrix overlaps = prev.adjoint() * samples[s].vectors;
    std::vector<bool> taken(dim, false);
    for (int n = 0; n < dim; ++n) {
      int best = -1;
      double best_val = -1.0;
      double second = -1.0;
      for (int j = 0; j < dim; ++j) {
        const double o = std::abs(overlaps(n, j));
        if (o > best_val) {
          second = best_val;
          best_val = o;
          best = j;
        } else if (o > second) {
          second = o;
        }
      }
      if (dim > 1 && best_val - second < options.ambiguity) {
        std::ostringstream msg;
        msg << "ambiguous level matching for level " << n << " at t=" << samples[s].t
            << " (overlaps " << best_val << " and " << second << ")";
        throw TrackingError(msg.str());
      }
      if (taken[best]) {
        std::ostringstream msg;
        msg << "two levels matched the same eigenvector at t=" << samples[s].t;
        throw TrackingError(msg.str());
      }
      taken[best] = true;
      energies[s](n) = samples[s].values(best);
      frames[s].col(n) = samples[s].vectors.col(best);
      if (options.gauge == GaugePolicy::PositiveOverlap) {
        frames[s].col(n) *= std::conj(unit_phase(overlaps(n, best)));
      } else {
        make_dominant_real(frames[s].col(n));
      }
    }
  }

  EigenFrame frame;
  frame.grid = grid;
  frame.gauge = options.gauge;
  frame.min_gap = dim > 1 ? min_gap : 0.0;
  frame.gap_floor = floor;
  for (std::size_t k = 0; k < m; ++k) {
    frame.energies.push_back(energies[2 * k]);
    frame.frames.push_back(frames[2 * k]);
    if (k + 1 < m) {
      frame.mid_energies.push_back(energies[2 * k + 1]);
      frame.mid_frames.push_back(frames[2 * k + 1]);
    }
  }

  // delta: composite Simpson.  gamma: overlap phases over the interval and
  // its two halves, Richardson-combined (the per-interval error is O(h^3)).
  frame.dynamical_phase.assign(m, RealVector::Zero(dim));
  frame.geometric_phase.assign(m, RealVector::Zero(dim));
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double h = grid.step(k);
    const auto& a = frame.frames[k];
    const auto& mid = frame.mid_frames[k];
    const auto& c = frame.frames[k + 1];
    for (int n = 0; n < dim; ++n) {
      const double e = (frame.energies[k](n) + 4.0 * frame.mid_energies[k](n) +
                        frame.energies[k + 1](n)) * h / 6.0;
      frame.dynamical_phase[k + 1](n) = frame.dynamical_phase[k](n) - e;

      const double fine = -(phase_of(a.col(n).dot(mid.col(n))) +
                            phase_of(mid.col(n).dot(c.col(n))));
      const double coarse = unwrap_near(-phase_of(a.col(n).dot(c.col(n))), fine, kTwoPi);
      frame.geometric_phase[k + 1](n) =
          frame.geometric_phase[k](n) + (4.0 * fine - coarse) / 3.0;
    }
  }
  frame.total_phase.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    frame.total_phase[k] = frame.dynamical_phase[k] + frame.geometric_phase[k];
  }
  return frame;
}

ComplexMatrix connection_matrix(const EigenFrame& frame, const HamiltonianSource& source,
                                std::size_t k, const FrameOptions& options) {
  if (k >= frame.size()) throw ValidationError("connection_matrix: grid index out of range");
  const int dim = frame.dim();
  const auto& grid = frame.grid;
  const ComplexMatrix& f = frame.frames[k];
  const RealVector& e = frame.energies[k];
  const ComplexMatrix hdot_eig =
      f.adjoint() * source.derivative(grid[k], local_spacing(grid, k), options.derivative) * f;

  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (int mm = 0; mm < dim; ++mm) {
    for (int n = 0; n < dim; ++n) {
      if (mm == n) continue;
      const double gap = e(n) - e(mm);
      if (std::abs(gap) <= frame.gap_floor) {
        throw DegeneracyError("connection_matrix: gap underflow", grid[k], mm, n);
      }
      a(mm, n) = hdot_eig(mm, n) / gap;
    }
  }

  // Diagonal from the overlap phase rate with the neighbouring half steps.
  for (int n = 0; n < dim; ++n) {
    double phase = 0.0;
    double span = 0.0;
    if (k > 0) {
      phase += phase_of(frame.mid_frames[k - 1].col(n).dot(f.col(n)));
      span += 0.5 * grid.step(k - 1);
    }
    if (k + 1 < frame.size()) {
      phase += phase_of(f.col(n).dot(frame.mid_frames[k].col(n)));
      span += 0.5 * grid.step(k);
    }
    a(n, n) = Complex(0.0, phase / span);
  }
  return a;
}

ComplexMatrix build_u0(const EigenFrame& frame, std::size_t k) {
  if (k >= frame.size()) throw ValidationError("build_u0: grid index out of range");
  const Eigen::VectorXcd phases =
      frame.total_phase[k].unaryExpr([](double x) { return std::polar(1.0, x); });
  return frame.frames[k] * phases.asDiagonal() * frame.frames[0].adjoint();
}

std::vector<ComplexMatrix> build_u0_family(const EigenFrame& frame) {
  std::vector<ComplexMatrix> out;
  out.reserve(frame.size());
  for (std::size_t k = 0; k < frame.size(); ++k) out.push_back(build_u0(frame, k));
  return out;
}

ComplexMatrix moving_frame_hamiltonian(std::span<const ComplexMatrix> family,
                                       const HamiltonianSource& source, const TimeGrid& grid,
                                       std::size_t k) {
  if (family.size() != grid.size()) {
    throw ValidationError("moving_frame_hamiltonian: family must be sampled on the grid");
  }
  if (k >= grid.size()) throw ValidationError("moving_frame_hamiltonian: index out of range");
  const std::size_t m = grid.size();
  const std::size_t width = std::min<std::size_t>(5, m);
  const std::size_t first =
      std::min(k >= width / 2 ? k - width / 2 : std::size_t{0}, m - width);
  std::vector<double> nodes(width);
  for (std::size_t j = 0; j < width; ++j) nodes[j] = grid[first + j];
  const auto w = finite_difference_weights(nodes, grid[k], 1);

  ComplexMatrix dg_dagger = ComplexMatrix::Zero(family[k].rows(), family[k].cols());
  for (std::size_t j = 0; j < width; ++j) dg_dagger += w[j] * family[first + j].adjoint();

  const ComplexMatrix& g = family[k];
  return g * source(grid[k]) * g.adjoint() - Complex(0.0, 1.0) * g * dg_dagger;
}

TransformedHamiltonian build_h1(const EigenFrame& frame, const HamiltonianSource& source,
                                const FrameOptions& options) {
  const int dim = frame.dim();
  const auto& grid = frame.grid;
  const ComplexMatrix& f0 = frame.frames[0];

  TransformedHamiltonian out;
  out.frozen_basis = f0;
  out.samples.reserve(frame.size());
  out.frozen_samples.reserve(frame.size());
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const ComplexMatrix& f = frame.frames[k];
    const RealVector& e = frame.energies[k];
    const RealVector& alpha = frame.total_phase[k];
    const ComplexMatrix hdot_eig =
        f.adjoint() * source.derivative(grid[k], local_spacing(grid, k), options.derivative) * f;

    ComplexMatrix c = ComplexMatrix::Zero(dim, dim);
    for (int mm = 0; mm < dim; ++mm) {
      for (int n = 0; n < dim; ++n) {
        if (mm == n) continue;
        const double gap = e(mm) - e(n);
        if (std::abs(gap) <= frame.gap_floor) {
          throw DegeneracyError("build_h1: gap underflow", grid[k], mm, n);
        }
        c(mm, n) = Complex(0.0, 1.0) * std::polar(1.0, -(alpha(mm) - alpha(n))) *
                   hdot_eig(mm, n) / gap;
      }
    }
    c = 0.5 * (c + c.adjoint()).eval();
    out.samples.push_back(f0 * c * f0.adjoint());
    out.frozen_samples.push_back(std::move(c));
  }
  out.source = HamiltonianSource::from_samples(grid, out.samples);
  return out;
}

}  // namespace apex
