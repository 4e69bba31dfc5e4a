#pragma once

#include "hdclust/matrix_core.hpp"
#include "hdclust/niw.hpp"
#include "hdclust/partition.hpp"

namespace hdclust {

// Log of Pi(Psi | Y) / Pi(Psi' | Y) for Psi' = merge(Psi, h1, h2), split into
// the factors of the Gaussian/NIW merge ratio. Every field is a natural log.
struct MergeRatioBreakdown {
  double term_gamma = 0.0;      // four multivariate-gamma factor
  double term_kappa = 0.0;      // (p/2) log[k0 (k0 + n') / ((k0 + n1)(k0 + n2))]
  double term_det_kappa = 0.0;  // exact data-dependent scalar-factor ratio
  double term_det_gram = 0.0;   // |I_n + Y~ Y~^T| powers across the merge
  double total_likelihood = 0.0;
  double eppf = 0.0;
  double total_posterior = 0.0;
  // The scalar-factor ratio with each factor replaced by its projector-limit
  // value k0 / (k0 + n_h). Reported beside the exact term so the gap is visible.
  double term_det_kappa_limit_form = 0.0;
};

MergeRatioBreakdown merge_log_ratio(const Matrix& data, const Partition& part, int h1, int h2,
                                    const NiwPrior& prior, const PartitionPrior& partition_prior);

// -(p/2) log(1 + n1 n2 / (k0^2 + (n1 + n2) k0))
double kappa_term_log(Index p, double kappa0, Index n1, Index n2);

// (1/2)[-n1 log(1 + n2/(k0 + n1)) - n2 log(1 + n1/(k0 + n2)) + nu0 log(1 + n1 n2/(k0^2 + k0 n'))].
// p does not enter the closed form; it is accepted for symmetry with the other term evaluators.
double det_kappa_term_log(Index p, double kappa0, double nu0, Index n1, Index n2);

struct TermLimits {
  double gamma_limit = 0.0;
  double kappa_limit = 0.0;
  double det_kappa_limit = 0.0;
  double det_gram_limit = 0.0;
  double total_limit = 0.0;
};

// Closed-form p -> infinity limits of each term under the robust prior.
TermLimits analytic_limits(const RobustPriorSpec& spec, Index n1, Index n2);

// ((nu0 + n_h)/2) log |I + Y~^T Y~| for one cluster, through the n_h x n_h dual.
double gram_log_det_power(const ClusterView& c, const NiwPrior& prior);

// Exact Gram-determinant term of merging a and b.
double det_gram_term_log(const ClusterView& a, const ClusterView& b, const NiwPrior& prior);

// ((nu0 + n_h)/2) log(1 + trace(Y~^T Y~)), the first-order replacement of
// gram_log_det_power. With Lambda0 = p^2 I and row-standardized rows the
// trace is (p - 1) n_h / p^2.
double trace_approx_log(const ClusterView& c, const NiwPrior& prior);

// || Y (I_p + Y^T Y)^{-1} Y^T - I_n ||_2, evaluated as || (I_n + Y Y^T)^{-1} ||_2.
double projector_residual(const Matrix& y);

}  // namespace hdclust
