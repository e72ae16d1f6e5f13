#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace apex {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// The pipeline never draws random numbers; `apex --seedless` checks this.
inline constexpr bool kUsesRandomNumbers = false;

/// Strictly increasing sample times starting at zero.
class TimeGrid {
 public:
  /// Throws ValidationError unless times[0] == 0, the sequence is strictly
  /// increasing and has at least two entries.
  explicit TimeGrid(std::vector<double> times);

  static TimeGrid uniform(double duration, std::size_t points);

  std::size_t size() const { return times_.size(); }
  double operator[](std::size_t k) const { return times_[k]; }
  double front() const { return times_.front(); }
  double back() const { return times_.back(); }
  std::span<const double> times() const { return times_; }

  /// Width of interval [t_k, t_{k+1}].
  double step(std::size_t k) const { return times_[k + 1] - times_[k]; }
  double midpoint(std::size_t k) const { return 0.5 * (times_[k] + times_[k + 1]); }
  double min_step() const;

  /// The sub-grid [t_0, t_k].
  TimeGrid prefix(std::size_t k) const;

 private:
  std::vector<double> times_;
};

struct EigenDecomposition {
  RealVector values;     // ascending
  ComplexMatrix vectors;  // orthonormal columns
};

/// max |M - M^dagger| over entries.
double hermiticity_defect(const ComplexMatrix& m);

/// Largest entry modulus.
double max_abs(const ComplexMatrix& m);

/// Hermitian check at 1e-12 relative to the largest entry.
bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-12);

EigenDecomposition eigh(const ComplexMatrix& h);

/// exp(-i h dt) through the eigen-decomposition of h (hbar = 1).
ComplexMatrix expm_unitary(const ComplexMatrix& h, double dt);

/// Frobenius norm of a - b.  No global phase is divided out.
double op_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// max-entry norm of u^dagger u - I.
double unitarity_defect(const ComplexMatrix& u);

double frobenius_norm(const ComplexMatrix& m);

}  // namespace apex
