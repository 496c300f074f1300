#pragma once

// Run configuration shared by every pipeline command.

#include <cstddef>
#include <cstdint>
#include <string>

#include "json.hpp"

namespace universals {

struct RunConfig {
  // Inputs: a table directory (features.csv, categories.csv, optional
  // value_labels.csv) or a WALS CLDF export directory.
  std::string input;
  std::string cldf;
  std::string known_universals;

  std::uint64_t seed = 42;
  std::size_t min_langs = 100;
  double min_value_frac = 0.10;
  double alpha = 5.0;
  double pc_significance = 0.05;
  std::size_t max_cond = 2;
  double em_tol = 1e-4;
  std::size_t em_max_iter = 100;
  std::size_t k_min = 2;
  std::size_t k_max = 6;
  std::size_t max_sets_per_cell = 200;
  double level = 0.05;
  std::size_t max_implicants = 3;
  std::size_t min_support = 10;

  // Throws ValidationError naming the first out-of-range field.
  void validate() const;
};

nlohmann::json config_json(const RunConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
// Canonical text: config_json(c).dump(2) plus a newline.
std::string config_text(const RunConfig& c);
// FNV-1a of config_text, 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace universals
