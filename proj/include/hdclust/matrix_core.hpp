#pragma once

// Dense symmetric linear algebra kept in log-space. Determinants are never
// formed directly: at p in the thousands they overflow long before the
// exponents used by the marginal likelihoods are applied.

#include <Eigen/Dense>

namespace hdclust {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class SymMatrix {
 public:
  // Requires a square matrix with m(i,j) == m(j,i) bitwise.
  explicit SymMatrix(Matrix m);

  // Averages m with its transpose first; for products such as A^T A whose
  // rounding is not guaranteed symmetric.
  static SymMatrix symmetrized(const Matrix& m);
  static SymMatrix identity(Index dim);
  static SymMatrix scaled_identity(Index dim, double scale);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

class CholFactor {
 public:
  // Factor of the 0 x 0 matrix; grow it with extend().
  CholFactor() = default;

  Index dim() const { return l_.rows(); }
  const Matrix& lower() const { return l_; }

  // 2 * sum(log diag L)
  double log_det() const;

  // L^{-1} b
  Vector solve_lower(const Vector& b) const;
  // (L L^T)^{-1} b
  Vector solve(const Vector& b) const;
  Matrix reconstruct() const;

  // In-place factor of L L^T + sign * v v^T. Leaves the factor untouched and
  // throws DowndateBreaksPD if a downdate would lose positive definiteness.
  void update(const Vector& v, int sign);

  // Appends one row/column to the factored matrix: the new matrix is
  // [[A, b], [b^T, c]]. Throws NotPositiveDefinite if the Schur complement
  // is not positive.
  void extend(const Vector& b, double c);

 private:
  friend CholFactor cholesky(const SymMatrix& m);
  friend CholFactor cholesky_of(const Matrix& m);
  explicit CholFactor(Matrix l) : l_(std::move(l)) {}

  Matrix l_;
};

// Pivots below 1e-12 * max(diag) raise NotPositiveDefinite.
CholFactor cholesky(const SymMatrix& m);
// Same as cholesky() but reads only the lower triangle of m without the
// symmetry check. Used on internally assembled matrices.
CholFactor cholesky_of(const Matrix& m);

double log_det(const SymMatrix& m);

CholFactor rank1_update(CholFactor f, const Vector& v, int sign);

struct SpectralNorm {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Largest singular value by power iteration on m^T m. Relative tolerance
// 1e-8 on the eigenvalue estimate, at most 10 * cols iterations. When the
// cap is hit the best estimate is returned with converged == false.
SpectralNorm spectral_norm(const Matrix& m);

}  // namespace hdclust
