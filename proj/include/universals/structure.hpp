#pragma once

// Structure learning: PC-style skeleton search with G^2 conditional
// independence tests, then reduction to a maximum mutual-information spanning
// forest oriented away from a deterministic root per tree.

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "universals/graph.hpp"

namespace universals {

class FeatureMatrix;

enum class CiStatus {
  kOk,
  kInsufficient,  // too few complete cases; treated as independent
  kDegenerate,    // no stratum has both levels of both variables; removes an edge only unconditionally
};

struct CiTestResult {
  double statistic = 0.0;  // G^2
  int dof = 1;
  double p_value = 1.0;
  std::size_t n_effective = 0;
  CiStatus status = CiStatus::kOk;
};

inline constexpr std::size_t kMinCompleteCases = 25;

// G^2 test of i independent of j given cond on languages where i, j and every
// cond variable are observed. Each stratum of cond with both levels of i and
// of j present contributes one degree of freedom.
CiTestResult ci_test(const FeatureMatrix& m, std::size_t i, std::size_t j,
                     std::span<const std::size_t> cond,
                     std::size_t min_complete_cases = kMinCompleteCases);

// Closed-form G^2 of a 2x2 table {{n00, n01}, {n10, n11}}.
double g_squared_2x2(double n00, double n01, double n10, double n11);

using Edge = std::pair<std::size_t, std::size_t>;  // (min, max) variable index

struct Skeleton {
  std::size_t num_variables = 0;
  std::set<Edge> edges;
  std::map<Edge, std::vector<std::size_t>> sepsets;

  bool adjacent(std::size_t a, std::size_t b) const;
  std::vector<std::size_t> neighbors(std::size_t a) const;
};

inline Edge make_edge(std::size_t a, std::size_t b) { return {std::min(a, b), std::max(a, b)}; }

struct SkeletonOptions {
  double significance = 0.05;
  std::size_t max_cond = 2;
  std::size_t min_complete_cases = kMinCompleteCases;
  unsigned threads = 0;  // 0: default_threads()
};

// Order-independent (PC-stable) skeleton search. Adjacencies are frozen at
// the start of each conditioning-set size; candidates are enumerated in
// lexicographic order of variable id. Any test with p > significance removes
// the edge and records the separating set.
Skeleton learn_skeleton(const FeatureMatrix& m, const SkeletonOptions& options = {});

// Empirical mutual information (nats) of two variables on their complete cases.
double mutual_information(const FeatureMatrix& m, std::size_t i, std::size_t j);

// Keeps a maximum-MI spanning forest of the skeleton (ties broken by the
// lexicographic order of the edge's ids) and orients each tree away from its
// highest-degree node (ties: smallest id). Variables follow matrix order.
ForestStructure orient_and_forestify(const Skeleton& s, const FeatureMatrix& m);

// Same reduction with caller-supplied edge weights.
ForestStructure spanning_forest(const std::vector<std::string>& ids, const std::set<Edge>& edges,
                                const std::map<Edge, double>& weight);

}  // namespace universals
