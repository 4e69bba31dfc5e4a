#include "hdclust/special_fn.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hdclust/errors.hpp"

namespace hdclust {

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorKind::DomainError, "log_gamma argument " + std::to_string(x));
  }
  return std::lgamma(x);
}

double log_multigamma(Index p, double a) {
  if (p < 1) throw Error(ErrorKind::DomainError, "log_multigamma needs p >= 1");
  if (!(a > 0.5 * static_cast<double>(p - 1))) {
    throw Error(ErrorKind::DomainError,
                "log_multigamma(" + std::to_string(p) + ", " + std::to_string(a) + ")");
  }
  const double pd = static_cast<double>(p);
  double s = pd * (pd - 1.0) / 4.0 * std::log(std::numbers::pi);
  for (Index j = 1; j <= p; ++j) s += log_gamma(a - 0.5 * static_cast<double>(j - 1));
  return s;
}

double log_multigamma_ratio(const GammaRatioSpec& spec) {
  const double pd = static_cast<double>(spec.p);
  if (spec.p < 1 || spec.m < 0 || spec.l < spec.m) {
    throw Error(ErrorKind::DomainError, "log_multigamma_ratio needs p >= 1 and l >= m >= 0");
  }
  if (!(spec.nu0 + static_cast<double>(spec.m) + 1.0 - pd > 0.0)) {
    throw Error(ErrorKind::DomainError, "nu0 + m + 1 - p must be positive");
  }
  double s = 0.0;
  for (Index j = spec.m + 1; j <= spec.l; ++j) {
    const double jd = static_cast<double>(j);
    s += log_gamma(0.5 * (spec.nu0 + jd)) - log_gamma(0.5 * (spec.nu0 + jd - pd));
  }
  return s;
}

double gamma_term_log(Index p, double nu0, Index n1, Index n2) {
  const double pd = static_cast<double>(p);
  if (p < 1 || n1 < 0 || n2 < 0) throw Error(ErrorKind::DomainError, "gamma_term_log sizes");
  if (!(nu0 + 1.0 - pd > 0.0)) throw Error(ErrorKind::DomainError, "nu0 + 1 - p must be positive");
  const double shift = static_cast<double>(n1);
  double s = 0.0;
  for (Index j = 1; j <= n2; ++j) {
    const double a = nu0 + static_cast<double>(j);
    s += log_gamma(0.5 * a) - log_gamma(0.5 * (a - pd)) + log_gamma(0.5 * (a + shift - pd)) -
         log_gamma(0.5 * (a + shift));
  }
  return s;
}

double gamma_term_log_limit(double c2, Index n1, Index n2) {
  if (!(c2 > 1.0)) throw Error(ErrorKind::DomainError, "c2 must exceed 1");
  if (n1 < 0 || n2 < 0) throw Error(ErrorKind::DomainError, "negative cluster size");
  return 0.5 * static_cast<double>(n1 * n2) * std::log1p(-1.0 / c2);
}

}  // namespace hdclust
