#pragma once

#include "hdclust/matrix_core.hpp"

namespace hdclust {

// log Gamma(x) for x > 0.
double log_gamma(double x);

// log Gamma_p(a) = p(p-1)/4 log(pi) + sum_{j=1..p} log Gamma(a - (j-1)/2).
// DomainError when a <= (p-1)/2.
double log_multigamma(Index p, double a);

// Parameters of log[Gamma_p((nu0+l)/2) / Gamma_p((nu0+m)/2)].
struct GammaRatioSpec {
  Index p = 1;
  double nu0 = 1.0;
  Index l = 0;
  Index m = 0;
};

// Evaluated as sum_{j=m+1..l} [log Gamma((nu0+j)/2) - log Gamma((nu0+j-p)/2)],
// so the cost is O(l - m) regardless of p. Requires nu0 + m + 1 - p > 0 and l >= m.
double log_multigamma_ratio(const GammaRatioSpec& spec);

// Log of the four-gamma factor of the merge ratio,
//   Gamma_p((nu0+n1)/2) Gamma_p((nu0+n2)/2) / (Gamma_p((nu0+n1+n2)/2) Gamma_p(nu0/2)),
// as 2*n2 univariate log-gamma differences. Requires nu0 + 1 - p > 0.
double gamma_term_log(Index p, double nu0, Index n1, Index n2);

// p -> infinity limit of gamma_term_log under nu0 = c2 * p:
// (n1 n2 / 2) log(1 - 1/c2). DomainError for c2 <= 1, where it diverges.
double gamma_term_log_limit(double c2, Index n1, Index n2);

}  // namespace hdclust
