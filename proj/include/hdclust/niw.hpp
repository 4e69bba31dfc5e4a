#pragma once

#include <optional>
#include <vector>

#include "hdclust/matrix_core.hpp"

namespace hdclust {

// Normal-Inverse-Wishart prior: Sigma ~ IW(nu0, Lambda0), mu | Sigma ~ N(mu0, Sigma / kappa0).
//
// Lambda0 is held either as a scalar multiple of the identity or as a dense
// SPD matrix. The scalar form never materializes a p x p matrix, which is
// what lets the dual evaluators run at p = 1e5.
class NiwPrior {
 public:
  NiwPrior(Vector mu0, double kappa0, double nu0, SymMatrix lambda0);
  static NiwPrior with_scalar_scale(Vector mu0, double kappa0, double nu0, double lambda_scale);

  Index dim() const { return mu0_.size(); }
  const Vector& mu0() const { return mu0_; }
  double kappa0() const { return kappa0_; }
  double nu0() const { return nu0_; }

  bool has_scalar_scale() const { return scale_.has_value(); }
  // Throws DomainError for a dense Lambda0.
  double scalar_scale() const;
  // Materializes Lambda0; p x p storage.
  SymMatrix lambda0() const;
  double log_det_lambda0() const { return log_det_lambda0_; }

 private:
  NiwPrior(Vector mu0, double kappa0, double nu0, std::optional<double> scale,
           std::optional<SymMatrix> dense);
  void validate() const;

  Vector mu0_;
  double kappa0_;
  double nu0_;
  std::optional<double> scale_;
  std::optional<SymMatrix> dense_;
  double log_det_lambda0_ = 0.0;
};

// kappa0 = c1 sqrt(p), nu0 = c2 p, Lambda0 = p^2 I, mu0 = 0.
struct RobustPriorSpec {
  double c1 = 1.0;
  double c2 = 2.0;
};

NiwPrior robust_prior(Index p, const RobustPriorSpec& spec);

// Fixed, dimension-agnostic choice: kappa0 = 1, nu0 = p + 2, Lambda0 = I, mu0 = 0.
NiwPrior naive_prior(Index p);

// y~_i = Lambda0^{-1/2} (y_i - mu0) with the symmetric square root, rows as observations.
Matrix transform_data(const Matrix& y, const NiwPrior& prior);

// Each row centered and scaled to unit sample variance (divisor p - 1).
Matrix row_standardize(const Matrix& y);

enum class StatsMode { Scatter, Gram };

// A cluster's rows plus cached sufficient statistics. The scatter matrix is
// cached only when p is small relative to n_h (see mode()); the n_h x n_h
// Gram matrix of the raw rows is always cached.
class ClusterView {
 public:
  ClusterView() = default;
  explicit ClusterView(Matrix rows);
  ClusterView(const Matrix& data, const std::vector<Index>& row_indices);

  Index size() const { return rows_.rows(); }
  Index dim() const { return rows_.cols(); }
  bool empty() const { return size() == 0; }
  const Matrix& rows() const { return rows_; }
  const Vector& mean() const { return mean_; }
  const Matrix& gram() const { return gram_; }
  StatsMode mode() const { return mode_; }

  // Returns the cached scatter when available, otherwise computes it.
  Matrix scatter() const;

  // Largest absolute deviation between cached statistics and a recomputation.
  double cache_discrepancy() const;

 private:
  void compute_caches();

  Matrix rows_;
  Vector mean_;
  Matrix gram_;
  std::optional<Matrix> scatter_;
  StatsMode mode_ = StatsMode::Gram;
};

// Log marginal likelihood of the cluster under the NIW prior, p x p form.
double cluster_log_marginal(const ClusterView& c, const NiwPrior& prior);

// Same quantity through n_h x n_h determinants. Requires a scalar Lambda0.
double cluster_log_marginal_dual(const ClusterView& c, const NiwPrior& prior);

// Dual when Lambda0 is scalar and p > 4 n_h, primal otherwise.
double cluster_log_marginal_auto(const ClusterView& c, const NiwPrior& prior);

// Pieces of the dual evaluation in transformed coordinates, where
//   |I + S~ + n k0/(n+k0) ybar~ ybar~^T| = scalar_factor * |I_n + Y~ Y~^T|.
struct DualDeterminants {
  double log_det_gram = 0.0;       // log |I_n + Y~ Y~^T|
  double log_scalar_factor = 0.0;  // log(1 - 1^T Y~ (I + Y~^T Y~)^{-1} Y~^T 1 / (n + k0))
};

// transformed_gram is Y~ Y~^T for the cluster's rows.
DualDeterminants dual_determinants(const Matrix& transformed_gram, double kappa0);

// Y~ Y~^T for a cluster under the prior's transformation (any SPD Lambda0).
Matrix transformed_gram(const ClusterView& c, const NiwPrior& prior);

}  // namespace hdclust
