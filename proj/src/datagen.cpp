#include "hdclust/datagen.hpp"

#include <vector>

#include "hdclust/errors.hpp"
#include "hdclust/niw.hpp"
#include "hdclust/rng.hpp"

namespace hdclust {

GenKind parse_gen_kind(const std::string& name) {
  if (name == "single_gaussian") return GenKind::SingleGaussian;
  if (name == "two_cluster_mixture") return GenKind::TwoClusterMixture;
  if (name == "k_cluster_mixture") return GenKind::KClusterMixture;
  throw Error(ErrorKind::InvalidSpec, "unknown generator kind '" + name + "'");
}

const char* to_string(GenKind kind) {
  switch (kind) {
    case GenKind::SingleGaussian: return "single_gaussian";
    case GenKind::TwoClusterMixture: return "two_cluster_mixture";
    case GenKind::KClusterMixture: return "k_cluster_mixture";
  }
  return "unknown";
}

Dataset generate(const GenSpec& spec) {
  if (spec.n < 2 || spec.p < 2) throw Error(ErrorKind::InvalidSpec, "need n >= 2 and p >= 2");
  if (!(spec.separation >= 0.0)) throw Error(ErrorKind::InvalidSpec, "separation must be >= 0");
  int k = 1;
  if (spec.kind == GenKind::TwoClusterMixture) k = 2;
  if (spec.kind == GenKind::KClusterMixture) {
    if (spec.components < 1) throw Error(ErrorKind::InvalidSpec, "components must be >= 1");
    k = spec.components;
  }

  Rng rng(spec.seed);
  // Balanced labels, then a Fisher-Yates shuffle.
  std::vector<int> labels(static_cast<std::size_t>(spec.n));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % static_cast<std::size_t>(k));
  for (std::size_t i = labels.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(labels[i], labels[j]);
  }

  Dataset out;
  out.data.resize(spec.n, spec.p);
  const double centre = 0.5 * static_cast<double>(k - 1);
  for (Index i = 0; i < spec.n; ++i) {
    const int comp = labels[static_cast<std::size_t>(i)];
    const double mean = spec.separation * (static_cast<double>(comp) - centre);
    for (Index j = 0; j < spec.p; ++j) out.data(i, j) = mean + rng.normal();
  }
  if (spec.standardize) out.data = row_standardize(out.data);
  out.truth = Partition(labels);
  return out;
}

}  // namespace hdclust
