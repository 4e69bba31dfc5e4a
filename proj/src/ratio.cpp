#include "hdclust/ratio.hpp"

#include <cmath>

#include "hdclust/errors.hpp"
#include "hdclust/special_fn.hpp"

namespace hdclust {

namespace {

struct ClusterDual {
  double n = 0.0;
  DualDeterminants det;
};

ClusterDual dual_of(const ClusterView& c, const NiwPrior& prior) {
  return {static_cast<double>(c.size()), dual_determinants(transformed_gram(c, prior), prior.kappa0())};
}

// (nu0 + n')/2 f(merged) - (nu0 + n1)/2 f(a) - (nu0 + n2)/2 f(b)
template <typename F>
double merge_power_difference(double nu0, const ClusterDual& a, const ClusterDual& b,
                              const ClusterDual& merged, F f) {
  return 0.5 * (nu0 + merged.n) * f(merged) - 0.5 * (nu0 + a.n) * f(a) - 0.5 * (nu0 + b.n) * f(b);
}

}  // namespace

MergeRatioBreakdown merge_log_ratio(const Matrix& data, const Partition& part, int h1, int h2,
                                    const NiwPrior& prior, const PartitionPrior& partition_prior) {
  if (data.rows() != part.n()) throw Error(ErrorKind::DomainError, "data rows do not match partition");
  if (data.cols() != prior.dim()) throw Error(ErrorKind::DomainError, "data/prior dimension mismatch");
  MergeRatioBreakdown out;
  out.eppf = partition_prior.eppf_log_ratio(part, h1, h2);

  const std::vector<Index> rows_a = part.members(h1);
  const std::vector<Index> rows_b = part.members(h2);
  std::vector<Index> rows_m = rows_a;
  rows_m.insert(rows_m.end(), rows_b.begin(), rows_b.end());

  const ClusterView a(data, rows_a);
  const ClusterView b(data, rows_b);
  const ClusterView m(data, rows_m);
  const Index p = prior.dim();
  const Index n1 = a.size();
  const Index n2 = b.size();
  const double k0 = prior.kappa0();
  const double nu0 = prior.nu0();

  out.term_gamma = gamma_term_log(p, nu0, n1, n2);
  out.term_kappa = kappa_term_log(p, k0, n1, n2);

  const ClusterDual da = dual_of(a, prior);
  const ClusterDual db = dual_of(b, prior);
  const ClusterDual dm = dual_of(m, prior);
  out.term_det_kappa = merge_power_difference(
      nu0, da, db, dm, [](const ClusterDual& c) { return c.det.log_scalar_factor; });
  out.term_det_gram = merge_power_difference(
      nu0, da, db, dm, [](const ClusterDual& c) { return c.det.log_det_gram; });
  out.term_det_kappa_limit_form = det_kappa_term_log(p, k0, nu0, n1, n2);

  out.total_likelihood = out.term_gamma + out.term_kappa + out.term_det_kappa + out.term_det_gram;
  out.total_posterior = out.eppf + out.total_likelihood;
  return out;
}

double kappa_term_log(Index p, double kappa0, Index n1, Index n2) {
  if (!(kappa0 > 0.0)) throw Error(ErrorKind::DomainError, "kappa0 must be positive");
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return -0.5 * static_cast<double>(p) * std::log1p(a * b / (kappa0 * kappa0 + (a + b) * kappa0));
}

double det_kappa_term_log(Index /*p*/, double kappa0, double nu0, Index n1, Index n2) {
  if (!(kappa0 > 0.0) || !(nu0 > 0.0)) throw Error(ErrorKind::DomainError, "kappa0 and nu0 must be positive");
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return 0.5 * (-a * std::log1p(b / (kappa0 + a)) - b * std::log1p(a / (kappa0 + b)) +
                nu0 * std::log1p(a * b / (kappa0 * kappa0 + kappa0 * (a + b))));
}

TermLimits analytic_limits(const RobustPriorSpec& spec, Index n1, Index n2) {
  if (!(spec.c1 > 0.0)) throw Error(ErrorKind::DomainError, "c1 must be positive");
  TermLimits out;
  const double nn = static_cast<double>(n1 * n2);
  const double c1sq = spec.c1 * spec.c1;
  out.gamma_limit = gamma_term_log_limit(spec.c2, n1, n2);
  out.kappa_limit = -nn / (2.0 * c1sq);
  out.det_kappa_limit = spec.c2 * nn / (2.0 * c1sq);
  out.det_gram_limit = 0.0;
  out.total_limit = out.gamma_limit + out.kappa_limit + out.det_kappa_limit + out.det_gram_limit;
  return out;
}

double gram_log_det_power(const ClusterView& c, const NiwPrior& prior) {
  if (c.empty()) return 0.0;
  const DualDeterminants d = dual_determinants(transformed_gram(c, prior), prior.kappa0());
  return 0.5 * (prior.nu0() + static_cast<double>(c.size())) * d.log_det_gram;
}

double det_gram_term_log(const ClusterView& a, const ClusterView& b, const NiwPrior& prior) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DomainError, "clusters differ in dimension");
  Matrix rows(a.size() + b.size(), a.dim());
  rows << a.rows(), b.rows();
  const ClusterView merged(std::move(rows));
  return gram_log_det_power(merged, prior) - gram_log_det_power(a, prior) -
         gram_log_det_power(b, prior);
}

double trace_approx_log(const ClusterView& c, const NiwPrior& prior) {
  if (c.empty()) return 0.0;
  const double trace = transformed_gram(c, prior).trace();
  return 0.5 * (prior.nu0() + static_cast<double>(c.size())) * std::log1p(trace);
}

double projector_residual(const Matrix& y) {
  const Index n = y.rows();
  if (n < 1) throw Error(ErrorKind::DomainError, "projector_residual needs at least one row");
  Matrix m = y * y.transpose();
  m.diagonal().array() += 1.0;
  const CholFactor f = cholesky_of(m);
  // (I + Y Y^T)^{-1}, symmetric positive definite with eigenvalues in (0, 1].
  Matrix inv(n, n);
  for (Index j = 0; j < n; ++j) inv.col(j) = f.solve(Vector::Unit(n, j));
  return spectral_norm(inv).value;
}

}  // namespace hdclust
