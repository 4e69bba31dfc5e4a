#include "hdclust/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdclust/errors.hpp"

namespace hdclust {

namespace {

constexpr double kPivotTolerance = 1e-12;

double max_abs_diagonal(const Matrix& m) {
  double d = 0.0;
  for (Index i = 0; i < m.rows(); ++i) d = std::max(d, std::abs(m(i, i)));
  return d;
}

Matrix factor_lower(const Matrix& m) {
  const Index n = m.rows();
  if (n == 0 || m.cols() != n) {
    throw Error(ErrorKind::DomainError, "cholesky needs a non-empty square matrix");
  }
  const double threshold = kPivotTolerance * max_abs_diagonal(m);
  Matrix l = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double pivot = m(j, j);
    if (j > 0) pivot -= l.row(j).head(j).squaredNorm();
    if (!(pivot > threshold) || !std::isfinite(pivot)) {
      throw Error(ErrorKind::NotPositiveDefinite,
                  "pivot " + std::to_string(pivot) + " at column " + std::to_string(j));
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      double s = m(i, j);
      if (j > 0) s -= l.row(i).head(j).dot(l.row(j).head(j));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

}  // namespace

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw Error(ErrorKind::DomainError, "SymMatrix must be square and non-empty");
  }
  for (Index i = 0; i < m_.rows(); ++i) {
    for (Index j = 0; j < i; ++j) {
      if (m_(i, j) != m_(j, i)) {
        throw Error(ErrorKind::DomainError, "SymMatrix entries are not symmetric");
      }
    }
  }
}

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DomainError, "matrix is not square");
  Matrix s = 0.5 * (m + m.transpose());
  return SymMatrix(std::move(s));
}

SymMatrix SymMatrix::identity(Index dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

SymMatrix SymMatrix::scaled_identity(Index dim, double scale) {
  return SymMatrix(scale * Matrix::Identity(dim, dim));
}

double CholFactor::log_det() const {
  double s = 0.0;
  for (Index i = 0; i < l_.rows(); ++i) s += std::log(l_(i, i));
  return 2.0 * s;
}

Vector CholFactor::solve_lower(const Vector& b) const {
  return l_.triangularView<Eigen::Lower>().solve(b);
}

Vector CholFactor::solve(const Vector& b) const {
  Vector y = solve_lower(b);
  return l_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix CholFactor::reconstruct() const { return l_ * l_.transpose(); }

void CholFactor::update(const Vector& v, int sign) {
  if (sign != 1 && sign != -1) throw Error(ErrorKind::DomainError, "sign must be +1 or -1");
  if (v.size() != dim()) throw Error(ErrorKind::DomainError, "update vector has wrong length");
  Matrix l = l_;
  Vector x = v;
  const Index n = dim();
  for (Index k = 0; k < n; ++k) {
    const double lkk = l(k, k);
    const double r2 = lkk * lkk + sign * x(k) * x(k);
    if (!(r2 > kPivotTolerance * lkk * lkk)) {
      throw Error(ErrorKind::DowndateBreaksPD, "downdate at column " + std::to_string(k));
    }
    const double r = std::sqrt(r2);
    const double c = r / lkk;
    const double s = x(k) / lkk;
    l(k, k) = r;
    if (k + 1 < n) {
      const Index m = n - k - 1;
      l.col(k).tail(m) = (l.col(k).tail(m) + sign * s * x.tail(m)) / c;
      x.tail(m) = c * x.tail(m) - s * l.col(k).tail(m);
    }
  }
  l_ = std::move(l);
}

void CholFactor::extend(const Vector& b, double c) {
  const Index n = dim();
  if (b.size() != n) throw Error(ErrorKind::DomainError, "extension column has wrong length");
  Vector x = n > 0 ? solve_lower(b) : Vector();
  const double pivot = c - x.squaredNorm();
  if (!(pivot > kPivotTolerance * std::abs(c)) || !std::isfinite(pivot)) {
    throw Error(ErrorKind::NotPositiveDefinite, "Schur complement " + std::to_string(pivot));
  }
  Matrix l = Matrix::Zero(n + 1, n + 1);
  l.topLeftCorner(n, n) = l_;
  l.row(n).head(n) = x.transpose();
  l(n, n) = std::sqrt(pivot);
  l_ = std::move(l);
}

CholFactor cholesky(const SymMatrix& m) { return CholFactor(factor_lower(m.matrix())); }

CholFactor cholesky_of(const Matrix& m) { return CholFactor(factor_lower(m)); }

double log_det(const SymMatrix& m) { return cholesky(m).log_det(); }

CholFactor rank1_update(CholFactor f, const Vector& v, int sign) {
  f.update(v, sign);
  return f;
}

SpectralNorm spectral_norm(const Matrix& m) {
  SpectralNorm out;
  const Index n = m.cols();
  if (n == 0 || m.rows() == 0) {
    out.converged = true;
    return out;
  }
  if (!m.allFinite()) throw Error(ErrorKind::DomainError, "spectral_norm of non-finite matrix");

  // Deterministic start with no special alignment to coordinate axes.
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = 1.0 + 0.01 * static_cast<double>(i % 7);
  v.normalize();

  const int cap = static_cast<int>(std::max<Index>(10 * n, 10));
  double lambda = 0.0;
  for (int it = 1; it <= cap; ++it) {
    Vector w = m.transpose() * (m * v);
    const double next = v.dot(w);
    const double norm_w = w.norm();
    out.iterations = it;
    if (norm_w == 0.0) {
      lambda = 0.0;
      out.converged = true;
      break;
    }
    if (it > 1 && std::abs(next - lambda) <= 1e-8 * std::abs(next)) {
      lambda = next;
      out.converged = true;
      break;
    }
    lambda = next;
    v = w / norm_w;
  }
  out.value = std::sqrt(std::max(lambda, 0.0));
  return out;
}

}  // namespace hdclust
