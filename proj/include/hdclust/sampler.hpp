#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "hdclust/matrix_core.hpp"
#include "hdclust/niw.hpp"
#include "hdclust/partition.hpp"
#include "hdclust/rng.hpp"

namespace hdclust {

enum class InitMode { OneCluster, Singletons };

namespace detail {

struct GramStats {
  CholFactor chol;  // of I + G restricted to members
  Vector w;         // L^{-1} 1
  double log_det = 0.0;
};

struct ScatterStats {
  CholFactor chol;  // of Lambda0 + k0 mu0 mu0^T + sum y y^T
  Vector t;         // k0 mu0 + sum y
};

struct ClusterCache {
  std::vector<Index> members;
  std::variant<GramStats, ScatterStats> stats;
  double log_marginal = 0.0;
};

}  // namespace detail

// State of a collapsed Gibbs chain for a DP mixture of Gaussians with NIW
// base measure. Predictive weights are differences of cluster log marginals,
// maintained incrementally per cluster:
//  - Gram backend (scalar Lambda0, p > 4n): Cholesky of I + G_h on the
//    cluster's rows of the transformed Gram matrix, grown one row at a time.
//  - Scatter backend: Cholesky of Lambda0 + k0 mu0 mu0^T + sum y y^T with
//    rank-one updates/downdates, and t = k0 mu0 + sum y.
class SamplerState {
 public:
  SamplerState(std::shared_ptr<const Matrix> data, NiwPrior prior, CrpPrior crp,
               std::uint64_t seed, InitMode init = InitMode::OneCluster);

  const Matrix& data() const { return *data_; }
  const NiwPrior& prior() const { return prior_; }
  const CrpPrior& crp() const { return crp_; }
  const Partition& partition() const { return partition_; }
  Index sweep_index() const { return sweep_index_; }
  bool uses_gram_backend() const { return gram_backend_; }

  // Cached log marginal of cluster `label` (canonical, 1-based).
  double cached_log_marginal(int label) const;
  std::vector<ClusterView> cluster_views() const;

  // Largest relative gap between cached log marginals and a from-scratch
  // evaluation of each cluster's ClusterView.
  double max_cache_discrepancy() const;

  friend void gibbs_sweep(SamplerState& state);

 private:
  using GramStats = detail::GramStats;
  using ScatterStats = detail::ScatterStats;
  using Cluster = detail::ClusterCache;

  Cluster make_cluster(const std::vector<Index>& members) const;
  double log_marginal_of(const Cluster& c) const;
  double score_with(const Cluster& c, Index i) const;
  void add_member(Cluster& c, Index i) const;
  void remove_member(Cluster& c, Index i) const;
  void canonicalize();
  void sweep_impl();

  double log_marginal_from(Index n, double log_det_core) const;

  std::shared_ptr<const Matrix> data_;
  NiwPrior prior_;
  CrpPrior crp_;
  Rng rng_;
  bool gram_backend_ = false;
  Matrix gram_;                      // transformed Gram matrix (Gram backend)
  CholFactor empty_scatter_factor_;  // Lambda0 + k0 mu0 mu0^T (Scatter backend)
  std::vector<double> constant_part_;  // by cluster size
  std::vector<double> singleton_score_;

  std::vector<Cluster> clusters_;
  std::vector<int> assignment_;  // index into clusters_
  Partition partition_;
  Index sweep_index_ = 0;
};

// One index-order scan over all observations. On a numeric error the state
// is rolled back to its value before the sweep and the error rethrown.
void gibbs_sweep(SamplerState& state);

struct ChainConfig {
  Index sweeps = 1000;
  Index burnin = 100;
  std::uint64_t seed = 1;
  InitMode init = InitMode::OneCluster;
};

struct PosteriorSummary {
  Matrix co_clustering;        // over post-burnin sweeps
  std::vector<Index> k_trace;  // every sweep
  Index k_mode = 0;            // post-burnin; ties go to the smaller k
  Partition point_estimate;    // linkage of pairs with co-clustering > 0.5
  Partition final_partition;
};

// Throws InvalidConfig unless sweeps > burnin >= 0.
PosteriorSummary run_chain(const Matrix& data, const NiwPrior& prior, const CrpPrior& crp,
                           const ChainConfig& config);

// Connected components of the graph with edges where co_clustering > threshold.
Partition threshold_partition(const Matrix& co_clustering, double threshold);

}  // namespace hdclust
