#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace apex {

/// Root of every error thrown by the library.  `kind()` is a short stable
/// token that the command line runner echoes in its diagnostics.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

/// Bad input: wrong shape, non-Hermitian matrix, out-of-range parameter.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

class NumericalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numerical"; }
};

/// Two instantaneous levels came closer than the gap tolerance.
class DegeneracyError : public NumericalError {
 public:
  DegeneracyError(const std::string& what, double time, int level_a, int level_b,
                  int expansion_level = -1)
      : NumericalError(what),
        time_(time),
        level_a_(level_a),
        level_b_(level_b),
        expansion_level_(expansion_level) {}

  const char* kind() const noexcept override { return "degeneracy"; }
  double time() const { return time_; }
  int level_a() const { return level_a_; }
  int level_b() const { return level_b_; }
  /// Expansion level at which the degeneracy was hit, -1 when unknown.
  int expansion_level() const { return expansion_level_; }

  DegeneracyError at_expansion_level(int level) const;

 private:
  double time_;
  int level_a_;
  int level_b_;
  int expansion_level_;
};

/// Overlap matching between consecutive frames was ambiguous.
class TrackingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "tracking"; }
};

/// Step-halving did not reach the requested tolerance.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : NumericalError(what), achieved_(achieved) {}
  const char* kind() const noexcept override { return "convergence"; }
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// The time grid is too coarse for a sampled level Hamiltonian.
class ResolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "resolution"; }
};

/// A continuity-selected branch could not be resolved between two samples.
class RefinementError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "refinement"; }
};

/// Field direction hit the south pole where the eigenbasis is not single valued.
class GaugeSingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "gauge-singularity"; }
};

/// Closed-form level Hamiltonian disagrees with the generic construction.
class ClosedFormMismatchError : public NumericalError {
 public:
  ClosedFormMismatchError(const std::string& what, Eigen::MatrixXcd closed_form,
                          Eigen::MatrixXcd generic, double relative_distance)
      : NumericalError(what),
        closed_form_(std::move(closed_form)),
        generic_(std::move(generic)),
        relative_distance_(relative_distance) {}
  const char* kind() const noexcept override { return "closed-form-mismatch"; }
  const Eigen::MatrixXcd& closed_form() const { return closed_form_; }
  const Eigen::MatrixXcd& generic() const { return generic_; }
  double relative_distance() const { return relative_distance_; }

 private:
  Eigen::MatrixXcd closed_form_;
  Eigen::MatrixXcd generic_;
  double relative_distance_;
};

/// A generated driving profile has r(t) <= 0 somewhere.
class InfeasibleProfileError : public ValidationError {
 public:
  InfeasibleProfileError(const std::string& what, double t_begin, double t_end)
      : ValidationError(what), t_begin_(t_begin), t_end_(t_end) {}
  const char* kind() const noexcept override { return "infeasible-profile"; }
  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }

 private:
  double t_begin_;
  double t_end_;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "domain"; }
};

}  // namespace apex
