#pragma once

// Typological feature tables: loading a WALS-style categorical table,
// frequency filtering, binarization, and the language split.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "universals/kernels/bitops.hpp"

namespace universals {

inline constexpr int kMissingCode = -1;
inline constexpr std::int8_t kMissing = -1;
inline constexpr std::string_view kUncategorized = "Uncategorized";

struct RawFeature {
  std::string id;
  std::string category;
  // Value codes, sorted (numerically when every code is an integer).
  std::vector<std::string> values;
  // Human-readable label per code; same length as values.
  std::vector<std::string> labels;
  // A 0/1 presence indicator: code 0 means "absent" rather than a named value.
  bool presence = false;
};

// Categorical table: one row per language, one column per feature. Cells hold
// an index into the feature's value list or kMissingCode.
struct RawTable {
  std::vector<std::string> languages;
  std::vector<RawFeature> features;
  std::vector<int> cells;  // row-major, languages x features

  std::size_t num_languages() const noexcept { return languages.size(); }
  std::size_t num_features() const noexcept { return features.size(); }
  int at(std::size_t language, std::size_t feature) const {
    return cells[language * features.size() + feature];
  }
  int& at(std::size_t language, std::size_t feature) {
    return cells[language * features.size() + feature];
  }

  // Throws ValidationError on duplicate ids, bad dimensions or out-of-domain codes.
  void validate() const;
};

struct TableSources {
  std::string features_csv;
  std::string categories_csv;    // optional: feature_id,category
  std::string value_labels_csv;  // optional: feature_id,code,label
};

// Reads the feature CSV (first column language_id, empty cell = missing).
RawTable load_table(const std::string& path);
RawTable load_table(const TableSources& sources);
struct FeatureInfo {
  std::string category;
  bool presence = false;
};
// feature_id,category[,kind] where kind is "presence" or "categorical"
// (default).
std::map<std::string, FeatureInfo> load_category_map(const std::string& path);
void apply_category_map(RawTable& table, const std::map<std::string, FeatureInfo>& categories);
void apply_value_labels(RawTable& table, const std::string& path);

// Drops features coded for fewer than min_langs languages; values held by
// fewer than min_value_frac of a feature's coded languages become missing.
// Unobserved values are removed from the domain. Idempotent.
RawTable filter_table(const RawTable& table, std::size_t min_langs = 100,
                      double min_value_frac = 0.10);

struct Variable {
  std::string id;
  std::string source_feature;
  std::string value_label;  // source value coded 1
  std::string category;
  // Source value coded 0 when the variable comes from a two-valued feature;
  // empty when 0 only means "some other value" or "absent".
  std::string zero_label = {};

  bool two_sided() const noexcept { return !zero_label.empty(); }
};

// Languages x binary variables with missing cells, plus per-variable language
// bitsets (value 1, value 0, observed) for counting kernels.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  // cells is row-major languages x variables with values 0, 1 or kMissing.
  FeatureMatrix(std::vector<std::string> languages, std::vector<Variable> variables,
                std::vector<std::int8_t> cells);

  std::size_t num_languages() const noexcept { return languages_.size(); }
  std::size_t num_variables() const noexcept { return variables_.size(); }
  const std::vector<std::string>& languages() const noexcept { return languages_; }
  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const Variable& variable(std::size_t v) const { return variables_[v]; }

  std::int8_t at(std::size_t language, std::size_t variable) const {
    return cells_[language * variables_.size() + variable];
  }
  std::span<const std::int8_t> row(std::size_t language) const {
    return {cells_.data() + language * variables_.size(), variables_.size()};
  }
  const std::vector<std::int8_t>& cells() const noexcept { return cells_; }

  std::optional<std::size_t> find_variable(std::string_view id) const;
  // Throws ValidationError naming the unknown id.
  std::size_t variable_index(std::string_view id) const;

  std::size_t words() const noexcept { return words_; }
  std::span<const kernels::Word> ones(std::size_t v) const { return mask(v, 0); }
  std::span<const kernels::Word> zeros(std::size_t v) const { return mask(v, 1); }
  std::span<const kernels::Word> observed(std::size_t v) const { return mask(v, 2); }
  // ones() for value 1, zeros() for value 0.
  std::span<const kernels::Word> level(std::size_t v, int value) const {
    return value ? ones(v) : zeros(v);
  }
  // All languages.
  std::span<const kernels::Word> all() const { return {all_.data(), words_}; }

  std::size_t count_observed(std::size_t v) const { return kernels::popcount(observed(v)); }
  std::size_t count_ones(std::size_t v) const { return kernels::popcount(ones(v)); }

  bool any_missing(std::span<const std::size_t> variables) const;

  FeatureMatrix select_languages(std::span<const std::size_t> rows) const;
  FeatureMatrix select_languages(const std::vector<std::string>& ids) const;

  // Sorted distinct categories.
  std::vector<std::string> categories() const;

 private:
  std::span<const kernels::Word> mask(std::size_t v, std::size_t kind) const {
    return {masks_.data() + (v * 3 + kind) * words_, words_};
  }
  void build_masks();

  std::vector<std::string> languages_;
  std::vector<Variable> variables_;
  std::vector<std::int8_t> cells_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::size_t words_ = 0;
  std::vector<kernels::Word> masks_;
  std::vector<kernels::Word> all_;
};

struct BinarizeLog {
  std::vector<std::string> warnings;
};

// Binary recoding: 2 values -> one variable (higher code = 1); 3..7 values ->
// one indicator per value ("feature=label"); more than 7 -> presence of any
// value other than the lowest code. Single-valued features are dropped with a
// warning. Language order is kept.
FeatureMatrix binarize(const RawTable& table, BinarizeLog* log = nullptr);

// Matrix CSV (0/1/empty) and JSON manifest.
void write_matrix_csv(const FeatureMatrix& m, std::ostream& out);
nlohmann::json manifest_json(const FeatureMatrix& m);
// Throws ValidationError when the CSV header does not match the manifest.
FeatureMatrix read_matrix(const std::string& csv_path, const std::string& manifest_path);

struct Split {
  std::vector<std::string> train;
  std::vector<std::string> dev;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
};

// Seeded 80/10/10 partition: |train| = ceil(0.8 N), |dev| = floor(0.1 N),
// test takes the rest. Each part keeps the matrix's language order.
Split split_languages(const FeatureMatrix& m, std::uint64_t seed);
nlohmann::json split_json(const Split& s);
Split split_from_json(const nlohmann::json& j);

// Converts a WALS CLDF export directory (languages.csv, parameters.csv,
// codes.csv, values.csv) into a RawTable. Categories come from the WALS
// chapter number of each parameter id.
RawTable load_wals_cldf(const std::string& directory);
std::string wals_area_for_chapter(int chapter);
// Writes features.csv, categories.csv and value_labels.csv into directory.
void write_table(const RawTable& table, const std::string& directory);

}  // namespace universals
