#include "apex/operator_core.hpp"

#include <cmath>
#include <sstream>

#include "apex/errors.hpp"

namespace apex {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw ValidationError("TimeGrid: need at least 2 points");
  if (times_.front() != 0.0) throw ValidationError("TimeGrid: first time must be 0");
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k] > times_[k - 1]) || !std::isfinite(times_[k])) {
      std::ostringstream msg;
      msg << "TimeGrid: times not strictly increasing at index " << k;
      throw ValidationError(msg.str());
    }
  }
}

TimeGrid TimeGrid::uniform(double duration, std::size_t points) {
  if (points < 2) throw ValidationError("TimeGrid::uniform: need at least 2 points");
  if (!(duration > 0.0)) throw ValidationError("TimeGrid::uniform: duration must be positive");
  std::vector<double> t(points);
  const double n = static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) t[k] = duration * static_cast<double>(k) / n;
  t.back() = duration;
  return TimeGrid(std::move(t));
}

double TimeGrid::min_step() const {
  double h = times_[1] - times_[0];
  for (std::size_t k = 1; k + 1 < times_.size(); ++k) h = std::min(h, step(k));
  return h;
}

TimeGrid TimeGrid::prefix(std::size_t k) const {
  if (k == 0 || k >= times_.size()) throw ValidationError("TimeGrid::prefix: index out of range");
  return TimeGrid(std::vector<double>(times_.begin(), times_.begin() + static_cast<long>(k) + 1));
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("hermiticity_defect: matrix not square");
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  return hermiticity_defect(m) <= rel_tol * max_abs(m);
}

EigenDecomposition eigh(const ComplexMatrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw ValidationError("eigh: expected a non-empty square matrix");
  }
  if (!h.allFinite()) throw ValidationError("eigh: matrix has non-finite entries");
  if (!is_hermitian(h)) {
    std::ostringstream msg;
    msg << "eigh: matrix is not Hermitian (defect " << hermiticity_defect(h) << ", scale "
        << max_abs(h) << ")";
    throw ValidationError(msg.str());
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigh: eigensolver did not converge (dim " << h.rows() << ", max|H| " << max_abs(h)
        << ", ||H||_F " << sym.norm() << ")";
    throw NumericalError(msg.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix expm_unitary(const ComplexMatrix& h, double dt) {
  const auto ed = eigh(h);
  const Eigen::VectorXcd phases =
      (ed.values * (-dt)).unaryExpr([](double x) { return std::polar(1.0, x); });
  return ed.vectors * phases.asDiagonal() * ed.vectors.adjoint();
}

double op_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError("op_distance: dimension mismatch");
  }
  return (a - b).norm();
}

double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) throw ValidationError("unitarity_defect: matrix not square");
  const ComplexMatrix d = u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols());
  return max_abs(d);
}

double frobenius_norm(const ComplexMatrix& m) { return m.norm(); }

}  // namespace apex
