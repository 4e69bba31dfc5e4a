#include "hdclust/niw.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hdclust/errors.hpp"
#include "hdclust/special_fn.hpp"

namespace hdclust {

NiwPrior::NiwPrior(Vector mu0, double kappa0, double nu0, SymMatrix lambda0)
    : NiwPrior(std::move(mu0), kappa0, nu0, std::nullopt, std::move(lambda0)) {}

NiwPrior::NiwPrior(Vector mu0, double kappa0, double nu0, std::optional<double> scale,
                   std::optional<SymMatrix> dense)
    : mu0_(std::move(mu0)), kappa0_(kappa0), nu0_(nu0), scale_(scale), dense_(std::move(dense)) {
  validate();
  if (scale_) {
    log_det_lambda0_ = static_cast<double>(dim()) * std::log(*scale_);
  } else {
    log_det_lambda0_ = log_det(*dense_);
  }
}

NiwPrior NiwPrior::with_scalar_scale(Vector mu0, double kappa0, double nu0, double lambda_scale) {
  return NiwPrior(std::move(mu0), kappa0, nu0, lambda_scale, std::nullopt);
}

void NiwPrior::validate() const {
  const Index p = dim();
  if (p < 1) throw Error(ErrorKind::DomainError, "prior dimension must be positive");
  if (!(kappa0_ > 0.0) || !std::isfinite(kappa0_)) {
    throw Error(ErrorKind::DomainError, "kappa0 must be positive");
  }
  if (!(nu0_ > static_cast<double>(p) - 1.0) || !std::isfinite(nu0_)) {
    throw Error(ErrorKind::DomainError, "nu0 must exceed p - 1");
  }
  if (!mu0_.allFinite()) throw Error(ErrorKind::DomainError, "mu0 must be finite");
  if (scale_) {
    if (!(*scale_ > 0.0) || !std::isfinite(*scale_)) {
      throw Error(ErrorKind::NotPositiveDefinite, "Lambda0 scale must be positive");
    }
  } else if (dense_->dim() != p) {
    throw Error(ErrorKind::DomainError, "Lambda0 dimension does not match mu0");
  }
}

double NiwPrior::scalar_scale() const {
  if (!scale_) throw Error(ErrorKind::DomainError, "Lambda0 is not a scalar matrix");
  return *scale_;
}

SymMatrix NiwPrior::lambda0() const {
  if (scale_) return SymMatrix::scaled_identity(dim(), *scale_);
  return *dense_;
}

NiwPrior robust_prior(Index p, const RobustPriorSpec& spec) {
  if (p < 2) throw Error(ErrorKind::DomainError, "robust prior needs p >= 2");
  if (!(spec.c1 > 0.0)) throw Error(ErrorKind::DomainError, "c1 must be positive");
  if (!(spec.c2 > 1.0)) throw Error(ErrorKind::DomainError, "c2 must exceed 1");
  const double pd = static_cast<double>(p);
  return NiwPrior::with_scalar_scale(Vector::Zero(p), spec.c1 * std::sqrt(pd), spec.c2 * pd,
                                     pd * pd);
}

NiwPrior naive_prior(Index p) {
  return NiwPrior::with_scalar_scale(Vector::Zero(p), 1.0, static_cast<double>(p) + 2.0, 1.0);
}

Matrix transform_data(const Matrix& y, const NiwPrior& prior) {
  if (y.cols() != prior.dim()) throw Error(ErrorKind::DomainError, "data/prior dimension mismatch");
  Matrix centered = y.rowwise() - prior.mu0().transpose();
  if (prior.has_scalar_scale()) return centered / std::sqrt(prior.scalar_scale());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(prior.lambda0().matrix());
  const Vector& values = eig.eigenvalues();
  if (!(values.minCoeff() > 1e-12 * values.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::NotPositiveDefinite, "Lambda0 is not positive definite");
  }
  const Matrix inv_sqrt = eig.eigenvectors() * values.cwiseInverse().cwiseSqrt().asDiagonal() *
                          eig.eigenvectors().transpose();
  return centered * inv_sqrt;
}

Matrix row_standardize(const Matrix& y) {
  const Index p = y.cols();
  if (p < 2) throw Error(ErrorKind::DomainError, "row_standardize needs p >= 2");
  Matrix out(y.rows(), p);
  for (Index i = 0; i < y.rows(); ++i) {
    const double mean = y.row(i).mean();
    const auto centered = (y.row(i).array() - mean).matrix();
    const double ss = centered.squaredNorm();
    const double sd = std::sqrt(ss / static_cast<double>(p - 1));
    if (!(sd > 0.0) || !std::isfinite(sd)) {
      throw Error(ErrorKind::ConstantRow, "row " + std::to_string(i) + " has zero variance");
    }
    out.row(i) = centered / sd;
  }
  return out;
}

ClusterView::ClusterView(Matrix rows) : rows_(std::move(rows)) { compute_caches(); }

ClusterView::ClusterView(const Matrix& data, const std::vector<Index>& row_indices)
    : rows_(static_cast<Index>(row_indices.size()), data.cols()) {
  for (std::size_t k = 0; k < row_indices.size(); ++k) {
    rows_.row(static_cast<Index>(k)) = data.row(row_indices[k]);
  }
  compute_caches();
}

void ClusterView::compute_caches() {
  const Index n = size();
  const Index p = dim();
  mean_ = n > 0 ? Vector(rows_.colwise().mean().transpose()) : Vector::Zero(p);
  gram_ = rows_ * rows_.transpose();
  mode_ = p > 4 * n ? StatsMode::Gram : StatsMode::Scatter;
  if (mode_ == StatsMode::Scatter && n > 0) {
    const Matrix centered = rows_.rowwise() - mean_.transpose();
    scatter_ = centered.transpose() * centered;
  } else {
    scatter_.reset();
  }
}

Matrix ClusterView::scatter() const {
  if (scatter_) return *scatter_;
  if (empty()) return Matrix::Zero(dim(), dim());
  const Matrix centered = rows_.rowwise() - mean_.transpose();
  return centered.transpose() * centered;
}

double ClusterView::cache_discrepancy() const {
  ClusterView fresh(rows_);
  double d = 0.0;
  if (size() > 0) {
    d = std::max(d, (fresh.mean_ - mean_).cwiseAbs().maxCoeff());
    d = std::max(d, (fresh.gram_ - gram_).cwiseAbs().maxCoeff());
  }
  if (scatter_ && fresh.scatter_) {
    d = std::max(d, (*fresh.scatter_ - *scatter_).cwiseAbs().maxCoeff());
  }
  return d;
}

namespace {

// Terms shared by both forms: everything except the determinant of the
// posterior scale matrix.
double marginal_constant_part(Index n, const NiwPrior& prior) {
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(prior.dim());
  const double k0 = prior.kappa0();
  return -0.5 * nd * pd * std::log(std::numbers::pi) +
         log_multigamma_ratio({prior.dim(), prior.nu0(), n, 0}) +
         0.5 * pd * std::log(k0 / (k0 + nd));
}

void check_dims(const ClusterView& c, const NiwPrior& prior) {
  if (c.dim() != prior.dim()) throw Error(ErrorKind::DomainError, "cluster/prior dimension mismatch");
}

}  // namespace

double cluster_log_marginal(const ClusterView& c, const NiwPrior& prior) {
  check_dims(c, prior);
  if (c.empty()) return 0.0;
  const Index n = c.size();
  const double nd = static_cast<double>(n);
  const double k0 = prior.kappa0();
  const Vector d = c.mean() - prior.mu0();
  Matrix inner = prior.lambda0().matrix() + c.scatter();
  inner.noalias() += (nd * k0 / (nd + k0)) * d * d.transpose();
  const double log_det_inner = cholesky(SymMatrix::symmetrized(inner)).log_det();
  return marginal_constant_part(n, prior) + 0.5 * prior.nu0() * prior.log_det_lambda0() -
         0.5 * (prior.nu0() + nd) * log_det_inner;
}

Matrix transformed_gram(const ClusterView& c, const NiwPrior& prior) {
  check_dims(c, prior);
  if (prior.has_scalar_scale()) {
    const double scale = prior.scalar_scale();
    if (prior.mu0().isZero(0.0)) return c.gram() / scale;
    const Matrix centered = c.rows().rowwise() - prior.mu0().transpose();
    return centered * centered.transpose() / scale;
  }
  const Matrix z = transform_data(c.rows(), prior);
  return z * z.transpose();
}

DualDeterminants dual_determinants(const Matrix& transformed_gram, double kappa0) {
  const Index n = transformed_gram.rows();
  DualDeterminants out;
  if (n == 0) return out;
  Matrix m = transformed_gram;
  m.diagonal().array() += 1.0;
  const CholFactor f = cholesky_of(m);
  out.log_det_gram = f.log_det();
  const Vector w = f.solve_lower(Vector::Ones(n));
  // 1 - (n - 1^T (I + G)^{-1} 1) / (n + k0) = (k0 + q) / (n + k0)
  const double q = w.squaredNorm();
  out.log_scalar_factor = std::log((kappa0 + q) / (static_cast<double>(n) + kappa0));
  return out;
}

double cluster_log_marginal_dual(const ClusterView& c, const NiwPrior& prior) {
  check_dims(c, prior);
  if (!prior.has_scalar_scale()) {
    throw Error(ErrorKind::DomainError, "dual marginal requires a scalar Lambda0");
  }
  if (c.empty()) return 0.0;
  const Index n = c.size();
  const double nd = static_cast<double>(n);
  const DualDeterminants dd = dual_determinants(transformed_gram(c, prior), prior.kappa0());
  // |Lambda0 + ...| = |Lambda0| * scalar_factor * |I_n + G|; the |Lambda0|
  // powers are combined before multiplying so nothing of size nu0 * p log p
  // has to cancel.
  return marginal_constant_part(n, prior) - 0.5 * nd * prior.log_det_lambda0() -
         0.5 * (prior.nu0() + nd) * (dd.log_det_gram + dd.log_scalar_factor);
}

double cluster_log_marginal_auto(const ClusterView& c, const NiwPrior& prior) {
  if (prior.has_scalar_scale() && c.dim() > 4 * c.size()) return cluster_log_marginal_dual(c, prior);
  return cluster_log_marginal(c, prior);
}

}  // namespace hdclust
