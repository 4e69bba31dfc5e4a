#pragma once

#include <vector>

#include "hdclust/matrix_core.hpp"

namespace hdclust {

// Cluster labels c_1..c_n in canonical form: labels are 1..k in order of
// first appearance.
class Partition {
 public:
  Partition() = default;
  // Any integer labels; relabeled canonically.
  explicit Partition(const std::vector<int>& labels);

  Index n() const { return static_cast<Index>(labels_.size()); }
  int k() const { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<Index>& sizes() const { return sizes_; }
  // Throws UnknownLabel.
  Index size_of(int label) const;
  bool contains(int label) const { return label >= 1 && label <= k(); }
  std::vector<Index> members(int label) const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> labels_;
  std::vector<Index> sizes_;
};

// Union of clusters h1 and h2, canonically relabeled. Throws UnknownLabel or SameLabel.
Partition merge(const Partition& part, int h1, int h2);

// Anything that can score log[Pi(Psi) / Pi(Psi')] for Psi' = merge(Psi, h1, h2).
class PartitionPrior {
 public:
  virtual ~PartitionPrior() = default;
  virtual double eppf_log_ratio(const Partition& part, int h1, int h2) const = 0;
};

class CrpPrior : public PartitionPrior {
 public:
  explicit CrpPrior(double alpha);
  double alpha() const { return alpha_; }

  // log alpha + log Gamma(n1) + log Gamma(n2) - log Gamma(n1 + n2).
  double eppf_log_ratio(const Partition& part, int h1, int h2) const override;

  // log of alpha^k Gamma(alpha) / Gamma(alpha + n) * prod_h Gamma(n_h).
  double log_eppf(const Partition& part) const;

 private:
  double alpha_;
};

double eppf_log_ratio(const Partition& part, int h1, int h2, const CrpPrior& prior);

// Chance-corrected pair-counting agreement (Hubert & Arabie). Returns 1 when
// both partitions are identical trivial partitions.
double adjusted_rand_index(const Partition& a, const Partition& b);

}  // namespace hdclust
