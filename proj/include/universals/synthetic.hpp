#pragma once

// Seeded generators for simulation tests: random forests, ancestral samples
// and MCAR masking.

#include <cstddef>
#include <string>

#include "universals/corpus.hpp"
#include "universals/graph.hpp"

namespace universals {

class Rng;

struct ForestShape {
  std::size_t nodes = 10;
  double root_probability = 0.0;  // chance that a non-first node starts a new tree
  std::string prefix = "X";
};

// Node i > 0 attaches to a uniformly chosen earlier node unless it becomes a
// root. Ids are prefix + zero-padded index, so id order is node order.
ForestStructure random_forest(const ForestShape& shape, Rng& rng);

// CPT probabilities are drawn from [lo, hi] or mirrored to [1 - hi, 1 - lo];
// child rows take opposite sides, so every edge carries signal when lo > 0.5.
Network random_network(const ForestStructure& s, Rng& rng, double lo = 0.05, double hi = 0.95);

// Samples languages "L00000".. from n; every variable gets the given category.
FeatureMatrix sample_matrix(const Network& n, std::size_t languages, Rng& rng,
                            const std::string& category = "synthetic");

// Each cell independently hidden with probability rate.
FeatureMatrix mask_mcar(const FeatureMatrix& m, double rate, Rng& rng);

// Mutually independent Bernoulli columns with per-column rates in [0.2, 0.8].
FeatureMatrix independent_matrix(std::size_t variables, std::size_t languages, Rng& rng);

}  // namespace universals
