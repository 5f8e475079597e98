#include "privgame/linalg.hpp"

#include <cmath>
#include <limits>

#include "privgame/errors.hpp"

namespace privgame {

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error([&] {
        std::string msg = "invalid model:";
        for (const auto& v : violations) msg += " " + v + ";";
        return msg;
      }()),
      violations_(std::move(violations)) {}

namespace linalg {

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

Matrix clip_to_psd(const Matrix& a) {
  if (a.size() == 0) return a;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  const Vector clipped = es.eigenvalues().cwiseMax(0.0);
  return symmetrize(es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose());
}

Matrix sqrtm_psd(const Matrix& a) {
  if (a.size() == 0) return a;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  Vector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return symmetrize(es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose());
}

Matrix inv_sqrtm_pd(const Matrix& a) {
  if (a.size() == 0) return a;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw ContractViolation("inv_sqrtm_pd: matrix is not positive definite");
  }
  Vector inv_roots = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return symmetrize(es.eigenvectors() * inv_roots.asDiagonal() * es.eigenvectors().transpose());
}

double min_eigenvalue(const Matrix& a) {
  if (a.size() == 0) return std::numeric_limits<double>::infinity();
  return Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(a), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

double max_eigenvalue(const Matrix& a) {
  if (a.size() == 0) return -std::numeric_limits<double>::infinity();
  return Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(a), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

bool is_psd(const Matrix& a, double tol) {
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
  return min_eigenvalue(a) >= -tol * scale;
}

void orient_columns(Matrix& columns, double eps) {
  for (Index j = 0; j < columns.cols(); ++j) {
    for (Index i = 0; i < columns.rows(); ++i) {
      if (std::abs(columns(i, j)) > eps) {
        if (columns(i, j) < 0.0) columns.col(j) *= -1.0;
        break;
      }
    }
  }
}

bool spd_solve(const Matrix& a, const Matrix& b, Matrix& x) {
  if (a.rows() == 0) {
    x = Matrix::Zero(0, b.cols());
    return true;
  }
  Eigen::LLT<Matrix> llt(symmetrize(a));
  if (llt.info() != Eigen::Success) return false;
  // Cholesky succeeds on some numerically singular inputs; reject those too.
  const Vector d = llt.matrixL().toDenseMatrix().diagonal();
  const double ratio = d.minCoeff() / d.maxCoeff();
  if (!(ratio * ratio > 1e-14)) return false;
  x = llt.solve(b);
  return true;
}

double condition_number(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  if (s(s.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

}  // namespace linalg
}  // namespace privgame
