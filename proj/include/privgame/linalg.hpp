#pragma once

#include <Eigen/Dense>

namespace privgame {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace linalg {

/// Symmetric (spectral) square root of a symmetric positive semidefinite
/// matrix. Negative eigenvalues from rounding are clipped to zero.
Matrix sqrtm_psd(const Matrix& a);

/// Inverse of the spectral square root; `a` must be positive definite.
Matrix inv_sqrtm_pd(const Matrix& a);

Matrix symmetrize(const Matrix& a);

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues set to zero).
Matrix clip_to_psd(const Matrix& a);

double min_eigenvalue(const Matrix& a);
double max_eigenvalue(const Matrix& a);

/// True when the smallest eigenvalue of the symmetric part is >= -tol * max(1, |largest diag|).
bool is_psd(const Matrix& a, double tol = 1e-10);

/// Flip the sign of each column so that its first entry with magnitude above
/// `eps` is positive. Makes eigenvector output reproducible.
void orient_columns(Matrix& columns, double eps = 1e-12);

/// Solve A X = B for symmetric positive definite A via Cholesky.
/// Returns false if A is not numerically positive definite.
bool spd_solve(const Matrix& a, const Matrix& b, Matrix& x);

/// Ratio of largest to smallest singular value; infinity for singular input.
double condition_number(const Matrix& a);

}  // namespace linalg
}  // namespace privgame
