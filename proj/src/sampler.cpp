#include "hdclust/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

#include "hdclust/errors.hpp"
#include "hdclust/special_fn.hpp"

namespace hdclust {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

SamplerState::SamplerState(std::shared_ptr<const Matrix> data, NiwPrior prior, CrpPrior crp,
                           std::uint64_t seed, InitMode init)
    : data_(std::move(data)), prior_(std::move(prior)), crp_(crp), rng_(seed) {
  if (!data_ || data_->rows() < 1) throw Error(ErrorKind::InvalidConfig, "sampler needs data");
  if (data_->cols() != prior_.dim()) {
    throw Error(ErrorKind::InvalidConfig, "data/prior dimension mismatch");
  }
  const Index n = data_->rows();
  const Index p = data_->cols();
  gram_backend_ = prior_.has_scalar_scale() && p > 4 * n;

  if (gram_backend_) {
    const Matrix z = transform_data(*data_, prior_);
    gram_ = z * z.transpose();
  } else {
    Matrix base = prior_.lambda0().matrix();
    base.noalias() += prior_.kappa0() * prior_.mu0() * prior_.mu0().transpose();
    empty_scatter_factor_ = cholesky_of(base);
  }

  const double pd = static_cast<double>(p);
  const double k0 = prior_.kappa0();
  constant_part_.resize(static_cast<std::size_t>(n) + 1);
  for (Index m = 0; m <= n; ++m) {
    const double md = static_cast<double>(m);
    constant_part_[static_cast<std::size_t>(m)] =
        -0.5 * md * pd * std::log(std::numbers::pi) +
        log_multigamma_ratio({p, prior_.nu0(), m, 0}) + 0.5 * pd * std::log(k0 / (k0 + md));
  }

  const Cluster empty = make_cluster({});
  singleton_score_.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) singleton_score_[static_cast<std::size_t>(i)] = score_with(empty, i);

  assignment_.assign(static_cast<std::size_t>(n), 0);
  if (init == InitMode::OneCluster) {
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    clusters_.push_back(make_cluster(all));
  } else {
    for (Index i = 0; i < n; ++i) {
      clusters_.push_back(make_cluster({i}));
      assignment_[static_cast<std::size_t>(i)] = static_cast<int>(i);
    }
  }
  canonicalize();
}

double SamplerState::log_marginal_from(Index n, double log_det_core) const {
  if (n == 0) return 0.0;
  const double nd = static_cast<double>(n);
  const double c = constant_part_[static_cast<std::size_t>(n)];
  if (gram_backend_) {
    return c - 0.5 * nd * prior_.log_det_lambda0() - 0.5 * (prior_.nu0() + nd) * log_det_core;
  }
  return c + 0.5 * prior_.nu0() * prior_.log_det_lambda0() -
         0.5 * (prior_.nu0() + nd) * log_det_core;
}

SamplerState::Cluster SamplerState::make_cluster(const std::vector<Index>& members) const {
  Cluster c;
  if (gram_backend_) {
    c.stats = GramStats{CholFactor(), Vector(), 0.0};
  } else {
    c.stats = ScatterStats{empty_scatter_factor_, prior_.kappa0() * prior_.mu0()};
  }
  for (Index i : members) add_member(c, i);
  c.log_marginal = log_marginal_of(c);
  return c;
}

double SamplerState::log_marginal_of(const Cluster& c) const {
  const Index n = static_cast<Index>(c.members.size());
  if (n == 0) return 0.0;
  const double nd = static_cast<double>(n);
  const double k0 = prior_.kappa0();
  return std::visit(
      Overloaded{
          [&](const GramStats& g) {
            const double q = g.w.squaredNorm();
            return log_marginal_from(n, g.log_det + std::log((k0 + q) / (nd + k0)));
          },
          [&](const ScatterStats& s) {
            const Vector u = s.chol.solve_lower(s.t);
            return log_marginal_from(n, s.chol.log_det() + std::log1p(-u.squaredNorm() / (k0 + nd)));
          }},
      c.stats);
}

double SamplerState::score_with(const Cluster& c, Index i) const {
  const Index n = static_cast<Index>(c.members.size());
  const double n1 = static_cast<double>(n + 1);
  const double k0 = prior_.kappa0();
  return std::visit(
      Overloaded{
          [&](const GramStats& g) {
            Vector b(n);
            for (Index r = 0; r < n; ++r) b(r) = gram_(c.members[static_cast<std::size_t>(r)], i);
            const Vector x = n > 0 ? g.chol.solve_lower(b) : Vector();
            const double d2 = 1.0 + gram_(i, i) - x.squaredNorm();
            if (!(d2 > 0.0)) throw Error(ErrorKind::NotPositiveDefinite, "Gram extension pivot");
            const double w_last = (1.0 - (n > 0 ? x.dot(g.w) : 0.0)) / std::sqrt(d2);
            const double q = g.w.squaredNorm() + w_last * w_last;
            const double log_det = g.log_det + std::log(d2);
            return log_marginal_from(n + 1, log_det + std::log((k0 + q) / (n1 + k0)));
          },
          [&](const ScatterStats& s) {
            const Vector y = data_->row(i).transpose();
            const CholFactor f = rank1_update(s.chol, y, +1);
            const Vector u = f.solve_lower(s.t + y);
            return log_marginal_from(n + 1, f.log_det() + std::log1p(-u.squaredNorm() / (k0 + n1)));
          }},
      c.stats);
}

void SamplerState::add_member(Cluster& c, Index i) const {
  std::visit(Overloaded{[&](GramStats& g) {
                          const Index n = static_cast<Index>(c.members.size());
                          Vector b(n);
                          for (Index r = 0; r < n; ++r) {
                            b(r) = gram_(c.members[static_cast<std::size_t>(r)], i);
                          }
                          g.chol.extend(b, 1.0 + gram_(i, i));
                          const Index m = n + 1;
                          g.w = g.chol.solve_lower(Vector::Ones(m));
                          g.log_det = g.chol.log_det();
                        },
                        [&](ScatterStats& s) {
                          const Vector y = data_->row(i).transpose();
                          s.chol.update(y, +1);
                          s.t += y;
                        }},
             c.stats);
  c.members.push_back(i);
  c.log_marginal = log_marginal_of(c);
}

void SamplerState::remove_member(Cluster& c, Index i) const {
  auto it = std::find(c.members.begin(), c.members.end(), i);
  if (it == c.members.end()) throw Error(ErrorKind::DomainError, "observation not in cluster");
  c.members.erase(it);
  if (gram_backend_) {
    // Row order inside the factor follows members; rebuild from scratch.
    const std::vector<Index> members = std::move(c.members);
    c.members.clear();
    c.stats = GramStats{CholFactor(), Vector(), 0.0};
    for (Index j : members) add_member(c, j);
  } else {
    auto& s = std::get<ScatterStats>(c.stats);
    const Vector y = data_->row(i).transpose();
    try {
      s.chol.update(y, -1);
      s.t -= y;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DowndateBreaksPD) throw;
      const std::vector<Index> members = std::move(c.members);
      c.members.clear();
      c.stats = ScatterStats{empty_scatter_factor_, prior_.kappa0() * prior_.mu0()};
      for (Index j : members) add_member(c, j);
    }
  }
  c.log_marginal = log_marginal_of(c);
}

void SamplerState::canonicalize() {
  // Clusters ordered by their smallest member, i.e. first appearance.
  std::vector<std::size_t> order(clusters_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *std::min_element(clusters_[a].members.begin(), clusters_[a].members.end()) <
           *std::min_element(clusters_[b].members.begin(), clusters_[b].members.end());
  });
  std::vector<Cluster> sorted;
  sorted.reserve(clusters_.size());
  for (std::size_t k : order) sorted.push_back(std::move(clusters_[k]));
  clusters_ = std::move(sorted);

  std::vector<int> labels(assignment_.size());
  for (std::size_t k = 0; k < clusters_.size(); ++k) {
    for (Index i : clusters_[k].members) {
      assignment_[static_cast<std::size_t>(i)] = static_cast<int>(k);
      labels[static_cast<std::size_t>(i)] = static_cast<int>(k) + 1;
    }
  }
  partition_ = Partition(labels);
}

void SamplerState::sweep_impl() {
  const Index n = data_->rows();
  const double log_alpha = std::log(crp_.alpha());
  std::vector<double> log_w;
  for (Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const int current = assignment_[ui];
    Cluster& home = clusters_[static_cast<std::size_t>(current)];
    if (home.members.size() == 1) {
      clusters_.erase(clusters_.begin() + current);
      for (int& a : assignment_) {
        if (a > current) --a;
      }
    } else {
      remove_member(home, i);
    }

    const std::size_t k = clusters_.size();
    log_w.assign(k + 1, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      const Cluster& c = clusters_[j];
      log_w[j] = std::log(static_cast<double>(c.members.size())) + score_with(c, i) - c.log_marginal;
    }
    log_w[k] = log_alpha + singleton_score_[ui];

    const double top = *std::max_element(log_w.begin(), log_w.end());
    if (!std::isfinite(top)) throw Error(ErrorKind::NotPositiveDefinite, "non-finite predictive weight");
    double total = 0.0;
    for (double& w : log_w) {
      w = std::exp(w - top);
      total += w;
    }
    const double u = rng_.uniform() * total;
    std::size_t pick = k;
    double cum = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
      cum += log_w[j];
      if (u < cum) {
        pick = j;
        break;
      }
    }

    if (pick == k) {
      clusters_.push_back(make_cluster({i}));
    } else {
      add_member(clusters_[pick], i);
    }
    assignment_[ui] = static_cast<int>(pick);
  }
  for (Cluster& c : clusters_) std::sort(c.members.begin(), c.members.end());
  // Member order changed; Gram factors must follow it.
  if (gram_backend_) {
    for (Cluster& c : clusters_) c = make_cluster(c.members);
  }
  canonicalize();
  ++sweep_index_;
}

void gibbs_sweep(SamplerState& state) {
  SamplerState backup = state;
  try {
    state.sweep_impl();
  } catch (...) {
    state = std::move(backup);
    throw;
  }
}

double SamplerState::cached_log_marginal(int label) const {
  if (!partition_.contains(label)) throw Error(ErrorKind::UnknownLabel, std::to_string(label));
  return clusters_[static_cast<std::size_t>(label - 1)].log_marginal;
}

std::vector<ClusterView> SamplerState::cluster_views() const {
  std::vector<ClusterView> out;
  out.reserve(clusters_.size());
  for (const Cluster& c : clusters_) out.emplace_back(*data_, c.members);
  return out;
}

double SamplerState::max_cache_discrepancy() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < clusters_.size(); ++k) {
    const auto& c = clusters_[k];
    const ClusterView view(*data_, c.members);
    worst = std::max(worst, view.cache_discrepancy());
    const double fresh = cluster_log_marginal_auto(view, prior_);
    worst = std::max(worst, std::abs(fresh - c.log_marginal) / std::max(1.0, std::abs(fresh)));
    if (partition_.members(static_cast<int>(k) + 1) != c.members) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

Partition threshold_partition(const Matrix& co_clustering, double threshold) {
  const Index n = co_clustering.rows();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (co_clustering(i, j) > threshold) {
        const int a = find(static_cast<int>(i));
        const int b = find(static_cast<int>(j));
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }
    }
  }
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = find(static_cast<int>(i));
  return Partition(labels);
}

PosteriorSummary run_chain(const Matrix& data, const NiwPrior& prior, const CrpPrior& crp,
                           const ChainConfig& config) {
  if (config.burnin < 0 || config.sweeps <= config.burnin) {
    throw Error(ErrorKind::InvalidConfig, "need sweeps > burnin >= 0");
  }
  SamplerState state(std::make_shared<const Matrix>(data), prior, crp, config.seed, config.init);
  const Index n = data.rows();
  PosteriorSummary out;
  out.co_clustering = Matrix::Zero(n, n);
  out.k_trace.reserve(static_cast<std::size_t>(config.sweeps));
  std::map<Index, Index> k_counts;

  for (Index s = 0; s < config.sweeps; ++s) {
    gibbs_sweep(state);
    const Partition& part = state.partition();
    out.k_trace.push_back(part.k());
    if (s < config.burnin) continue;
    ++k_counts[part.k()];
    const auto& labels = part.labels();
    for (Index i = 0; i < n; ++i) {
      for (Index j = i; j < n; ++j) {
        if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) {
          out.co_clustering(i, j) += 1.0;
        }
      }
    }
  }
  const double kept = static_cast<double>(config.sweeps - config.burnin);
  out.co_clustering /= kept;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) out.co_clustering(i, j) = out.co_clustering(j, i);
  }

  Index best = 0;
  for (const auto& [k, count] : k_counts) {
    if (count > best) {
      best = count;
      out.k_mode = k;
    }
  }
  out.point_estimate = threshold_partition(out.co_clustering, 0.5);
  out.final_partition = state.partition();
  return out;
}

}  // namespace hdclust
