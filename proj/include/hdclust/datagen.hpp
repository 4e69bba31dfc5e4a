#pragma once

#include <cstdint>
#include <string>

#include "hdclust/matrix_core.hpp"
#include "hdclust/partition.hpp"

namespace hdclust {

enum class GenKind { SingleGaussian, TwoClusterMixture, KClusterMixture };

GenKind parse_gen_kind(const std::string& name);
const char* to_string(GenKind kind);

// separation is the distance between neighbouring component means along
// every coordinate, in units of the (unit) marginal sd. Two components sit
// at -separation/2 and +separation/2.
struct GenSpec {
  GenKind kind = GenKind::SingleGaussian;
  Index n = 2;
  Index p = 2;
  double separation = 2.0;
  std::uint64_t seed = 1;
  bool standardize = false;
  int components = 3;  // KClusterMixture only
};

struct Dataset {
  Matrix data;
  Partition truth;
};

// Component sizes are balanced (differ by at most one); the assignment of
// observations to components is a seeded random permutation.
Dataset generate(const GenSpec& spec);

}  // namespace hdclust
