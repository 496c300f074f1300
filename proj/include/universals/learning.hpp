#pragma once

// CPT estimation: add-alpha count-and-divide on complete data, and EM with
// belief-propagation pseudocounts when cells are missing.

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "json.hpp"

#include "universals/graph.hpp"

namespace universals {

class FeatureMatrix;

// Expected counts shaped like the CPTs: counts[i][parent_value][value].
struct SufficientStats {
  std::vector<std::vector<std::array<double, 2>>> counts;
};

struct FitReport {
  std::size_t iterations = 0;
  std::vector<double> log_posterior_trace;
  std::vector<double> held_out_trace;  // log-likelihood of options.held_out per iterate
  bool converged = false;
  bool stopped_early = false;
};

struct EmOptions {
  double tol = 1e-4;
  std::size_t max_iter = 100;
  unsigned threads = 0;
  // When set, EM stops (keeping the previous iterate) once the held-out
  // log-likelihood falls.
  const FeatureMatrix* held_out = nullptr;
};

// Column of m for each structure variable. Throws on unknown ids.
std::vector<std::size_t> column_map(const ForestStructure& s, const FeatureMatrix& m);

// (count + alpha) / (total + 2 alpha) from hard counts. Throws
// ValidationError if any structure variable has a missing cell.
Network map_fit_complete(const ForestStructure& s, const FeatureMatrix& m, const SmoothingPrior& prior);

struct EStep {
  SufficientStats stats;
  double log_likelihood = 0.0;  // sum over languages of log p(observed cells)
};

// Posterior family counts summed over languages. Languages are processed in
// fixed blocks whose partial sums are added in block order, so the result
// does not depend on the thread count.
EStep e_step(const Network& n, const FeatureMatrix& m, unsigned threads = 0);

std::vector<Cpt> m_step(const SufficientStats& stats, const SmoothingPrior& prior);

// sum over CPT cells of alpha * log(theta): the log density, up to a
// constant, of the Dirichlet whose MAP estimate is add-alpha smoothing.
double log_prior(const Network& n, const SmoothingPrior& prior);
double log_likelihood(const Network& n, const FeatureMatrix& m, unsigned threads = 0);

// Initializes from complete-case counts, then alternates e_step/m_step until
// the log-posterior changes by less than tol, max_iter M-steps have run, or
// the held-out log-likelihood drops.
std::pair<Network, FitReport> em_fit(const ForestStructure& s, const FeatureMatrix& m,
                                     const SmoothingPrior& prior, const EmOptions& options = {});

nlohmann::json fit_report_json(const FitReport& r);

}  // namespace universals
