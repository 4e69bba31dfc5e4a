#include "hdclust/partition.hpp"

#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "hdclust/errors.hpp"
#include "hdclust/special_fn.hpp"

namespace hdclust {

Partition::Partition(const std::vector<int>& labels) {
  std::unordered_map<int, int> canon;
  labels_.reserve(labels.size());
  for (int raw : labels) {
    auto [it, inserted] = canon.try_emplace(raw, static_cast<int>(canon.size()) + 1);
    if (inserted) sizes_.push_back(0);
    labels_.push_back(it->second);
    ++sizes_[static_cast<std::size_t>(it->second - 1)];
  }
}

Index Partition::size_of(int label) const {
  if (!contains(label)) throw Error(ErrorKind::UnknownLabel, "label " + std::to_string(label));
  return sizes_[static_cast<std::size_t>(label - 1)];
}

std::vector<Index> Partition::members(int label) const {
  if (!contains(label)) throw Error(ErrorKind::UnknownLabel, "label " + std::to_string(label));
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(size_of(label)));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) out.push_back(static_cast<Index>(i));
  }
  return out;
}

namespace {

void check_merge_labels(const Partition& part, int h1, int h2) {
  if (!part.contains(h1)) throw Error(ErrorKind::UnknownLabel, "label " + std::to_string(h1));
  if (!part.contains(h2)) throw Error(ErrorKind::UnknownLabel, "label " + std::to_string(h2));
  if (h1 == h2) throw Error(ErrorKind::SameLabel, "cannot merge a cluster with itself");
}

}  // namespace

Partition merge(const Partition& part, int h1, int h2) {
  check_merge_labels(part, h1, h2);
  std::vector<int> labels = part.labels();
  for (int& c : labels) {
    if (c == h2) c = h1;
  }
  return Partition(labels);
}

CrpPrior::CrpPrior(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::DomainError, "CRP concentration must be positive");
  }
}

double CrpPrior::eppf_log_ratio(const Partition& part, int h1, int h2) const {
  check_merge_labels(part, h1, h2);
  const double n1 = static_cast<double>(part.size_of(h1));
  const double n2 = static_cast<double>(part.size_of(h2));
  return std::log(alpha_) + log_gamma(n1) + log_gamma(n2) - log_gamma(n1 + n2);
}

double CrpPrior::log_eppf(const Partition& part) const {
  double s = static_cast<double>(part.k()) * std::log(alpha_) + log_gamma(alpha_) -
             log_gamma(alpha_ + static_cast<double>(part.n()));
  for (Index size : part.sizes()) s += log_gamma(static_cast<double>(size));
  return s;
}

double eppf_log_ratio(const Partition& part, int h1, int h2, const CrpPrior& prior) {
  return prior.eppf_log_ratio(part, h1, h2);
}

double adjusted_rand_index(const Partition& a, const Partition& b) {
  if (a.n() != b.n()) throw Error(ErrorKind::DomainError, "partitions differ in length");
  auto choose2 = [](double x) { return 0.5 * x * (x - 1.0); };

  std::map<std::pair<int, int>, double> table;
  for (Index i = 0; i < a.n(); ++i) {
    table[{a.labels()[static_cast<std::size_t>(i)], b.labels()[static_cast<std::size_t>(i)]}] += 1.0;
  }
  double index = 0.0;
  for (const auto& [cell, count] : table) index += choose2(count);
  double sum_a = 0.0;
  for (Index s : a.sizes()) sum_a += choose2(static_cast<double>(s));
  double sum_b = 0.0;
  for (Index s : b.sizes()) sum_b += choose2(static_cast<double>(s));

  const double total = choose2(static_cast<double>(a.n()));
  if (total == 0.0) return 1.0;
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace hdclust
