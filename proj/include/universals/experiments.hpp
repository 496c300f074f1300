#pragma once

// Feature-prediction benchmark: per-category accuracy as the number of
// observed in-category implicants k grows, plus two count-based baselines.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "universals/graph.hpp"

namespace universals {

class FeatureMatrix;

struct GridOptions {
  std::size_t k_min = 2;
  std::size_t k_max = 6;
  std::size_t max_sets_per_cell = 200;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct GridCell {
  std::string category;
  std::size_t k = 0;
  std::size_t n_sets = 0;
  std::size_t correct = 0;
  std::size_t n_predictions = 0;
  double accuracy = 0.0;
};

struct CategoryAccuracy {
  std::string category;
  std::size_t correct = 0;
  std::size_t n_predictions = 0;
  double accuracy = 0.0;
};

struct ReportedBaseline {
  std::string name;
  double accuracy = 0.0;
};

struct PredictionReport {
  std::vector<std::string> categories;  // sorted
  std::vector<std::size_t> ks;
  std::vector<GridCell> cells;          // category-major, k ascending; omitted cells absent
  std::vector<std::string> notes;
  std::vector<CategoryAccuracy> most_frequent;
  std::vector<CategoryAccuracy> pairwise;

  const GridCell* cell(const std::string& category, std::size_t k) const;
  // Unweighted mean over categories that have the cell; empty if none do.
  std::optional<double> mean_accuracy(std::size_t k) const;
  // Baseline mean over the categories that have at least one grid cell, so
  // it averages the same categories as the grid means.
  double comparable_mean(const std::vector<CategoryAccuracy>& baseline) const;
};

// Reported elsewhere, shown for comparison only.
const std::vector<ReportedBaseline>& reported_baselines();

// For each category with n >= k + 1 network variables and each k: up to
// max_sets_per_cell implicant sets of size k (every set when C(n, k) fits
// under the cap, otherwise a seeded uniform sample without replacement).
// Per set and test language the evidence is the observed set members plus
// every observed variable of other categories; each remaining observed
// in-category variable is decoded. Set members sharing the target's source
// feature are withheld from that target's evidence.
PredictionReport run_prediction_grid(const Network& n, const FeatureMatrix& test, const GridOptions& options);

// Training-majority value per variable (ties and unseen variables predict 1).
std::vector<CategoryAccuracy> baseline_most_frequent(const FeatureMatrix& train, const FeatureMatrix& test);

// Per target, the single predictor whose conditional-majority rule scores
// best on train (ties: earliest variable); languages missing the predictor
// get the target's global majority.
std::vector<CategoryAccuracy> baseline_pairwise(const FeatureMatrix& train, const FeatureMatrix& test);

double mean_accuracy(const std::vector<CategoryAccuracy>& per_category);

// Rows: categories, Mean, then baselines; columns k.
void write_prediction_csv(const PredictionReport& r, std::ostream& out);
nlohmann::json prediction_json(const PredictionReport& r);

}  // namespace universals
