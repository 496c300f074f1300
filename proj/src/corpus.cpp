#include "universals/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "universals/csv.hpp"
#include "universals/error.hpp"
#include "universals/random.hpp"

namespace universals {
namespace {

std::optional<long long> parse_integer(std::string_view s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return v;
}

// Numeric order when every code is an integer, lexicographic otherwise.
void sort_codes(std::vector<std::string>& codes) {
  const bool numeric = std::all_of(codes.begin(), codes.end(),
                                   [](const std::string& c) { return parse_integer(c).has_value(); });
  if (numeric) {
    std::sort(codes.begin(), codes.end(), [](const std::string& a, const std::string& b) {
      return *parse_integer(a) < *parse_integer(b);
    });
  } else {
    std::sort(codes.begin(), codes.end());
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// RawTable

void RawTable::validate() const {
  if (cells.size() != languages.size() * features.size()) {
    throw ValidationError("table has " + std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(languages.size() * features.size()));
  }
  std::set<std::string_view> seen;
  for (const auto& l : languages) {
    if (!seen.insert(l).second) throw ValidationError("duplicate language id '" + l + "'");
  }
  seen.clear();
  for (const auto& f : features) {
    if (!seen.insert(f.id).second) throw ValidationError("duplicate feature id '" + f.id + "'");
    if (f.labels.size() != f.values.size()) {
      throw ValidationError("feature '" + f.id + "' has mismatched value labels");
    }
  }
  for (std::size_t l = 0; l < languages.size(); ++l) {
    for (std::size_t f = 0; f < features.size(); ++f) {
      const int c = at(l, f);
      if (c != kMissingCode && (c < 0 || static_cast<std::size_t>(c) >= features[f].values.size())) {
        throw ValidationError("cell (" + languages[l] + ", " + features[f].id +
                              ") holds a code outside the value domain");
      }
    }
  }
}

RawTable load_table(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw ParseError(path, 1, 1, "empty file; expected a header row");
  const auto& header = rows.front();
  if (header.empty() || trim(header[0]) != "language_id") {
    throw ParseError(path, 1, 1, "first header column must be 'language_id'");
  }

  RawTable t;
  const std::size_t nf = header.size() - 1;
  t.features.resize(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    t.features[f].id = trim(header[f + 1]);
    t.features[f].category = std::string(kUncategorized);
    if (t.features[f].id.empty()) throw ParseError(path, 1, f + 2, "empty feature id");
  }

  std::vector<std::vector<std::string>> raw(nf);
  std::set<std::string> seen_languages;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw ParseError(path, r + 1, std::min(row.size(), header.size()) + 1,
                       "expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(row.size()));
    }
    std::string lang = trim(row[0]);
    if (lang.empty()) throw ParseError(path, r + 1, 1, "empty language id");
    if (!seen_languages.insert(lang).second) {
      throw ValidationError(path + ":" + std::to_string(r + 1) + ": duplicate language id '" +
                            lang + "'");
    }
    t.languages.push_back(std::move(lang));
    for (std::size_t f = 0; f < nf; ++f) raw[f].push_back(trim(row[f + 1]));
  }

  const std::size_t nl = t.languages.size();
  t.cells.assign(nl * nf, kMissingCode);
  for (std::size_t f = 0; f < nf; ++f) {
    std::set<std::string> distinct;
    for (const auto& v : raw[f]) {
      if (!v.empty()) distinct.insert(v);
    }
    auto& feature = t.features[f];
    feature.values.assign(distinct.begin(), distinct.end());
    sort_codes(feature.values);
    feature.labels = feature.values;
    std::map<std::string_view, int> code;
    for (std::size_t i = 0; i < feature.values.size(); ++i) code[feature.values[i]] = static_cast<int>(i);
    for (std::size_t l = 0; l < nl; ++l) {
      if (!raw[f][l].empty()) t.at(l, f) = code.at(raw[f][l]);
    }
  }
  t.validate();
  return t;
}

std::map<std::string, FeatureInfo> load_category_map(const std::string& path) {
  const auto rows = csv::read_file(path);
  std::map<std::string, FeatureInfo> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 2 && row.size() != 3) {
      throw ParseError(path, r + 1, 1, "expected feature_id,category[,kind]");
    }
    if (r == 0 && trim(row[0]) == "feature_id") continue;
    FeatureInfo info{trim(row[1]), false};
    if (row.size() == 3) {
      const auto kind = trim(row[2]);
      if (kind == "presence") {
        info.presence = true;
      } else if (!kind.empty() && kind != "categorical") {
        throw ParseError(path, r + 1, 3, "kind must be 'presence' or 'categorical'");
      }
    }
    out[trim(row[0])] = std::move(info);
  }
  return out;
}

void apply_category_map(RawTable& table, const std::map<std::string, FeatureInfo>& categories) {
  for (auto& f : table.features) {
    if (auto it = categories.find(f.id); it != categories.end()) {
      f.category = it->second.category;
      f.presence = it->second.presence;
    }
  }
}

void apply_value_labels(RawTable& table, const std::string& path) {
  const auto rows = csv::read_file(path);
  std::map<std::string, std::size_t> index;
  for (std::size_t f = 0; f < table.features.size(); ++f) index[table.features[f].id] = f;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 3) throw ParseError(path, r + 1, 1, "expected 3 fields (feature_id,code,label)");
    if (r == 0 && trim(row[0]) == "feature_id") continue;
    auto it = index.find(trim(row[0]));
    if (it == index.end()) continue;
    auto& feature = table.features[it->second];
    const std::string code = trim(row[1]);
    for (std::size_t i = 0; i < feature.values.size(); ++i) {
      if (feature.values[i] == code) feature.labels[i] = trim(row[2]);
    }
  }
}

RawTable load_table(const TableSources& sources) {
  RawTable t = load_table(sources.features_csv);
  if (!sources.categories_csv.empty()) apply_category_map(t, load_category_map(sources.categories_csv));
  if (!sources.value_labels_csv.empty()) apply_value_labels(t, sources.value_labels_csv);
  return t;
}

RawTable filter_table(const RawTable& table, std::size_t min_langs, double min_value_frac) {
  if (min_value_frac < 0.0) throw ValidationError("min_value_frac must be nonnegative");
  const std::size_t nl = table.num_languages();
  const std::size_t nf = table.num_features();

  struct Kept {
    std::size_t source;
    std::vector<int> remap;  // old code -> new code or kMissingCode
    RawFeature feature;
  };
  std::vector<Kept> kept;

  for (std::size_t f = 0; f < nf; ++f) {
    const auto& feature = table.features[f];
    std::vector<std::size_t> counts(feature.values.size(), 0);
    std::size_t coded = 0;
    for (std::size_t l = 0; l < nl; ++l) {
      const int c = table.at(l, f);
      if (c != kMissingCode) {
        ++counts[c];
        ++coded;
      }
    }
    if (coded < min_langs) continue;

    Kept k{f, std::vector<int>(feature.values.size(), kMissingCode), {}};
    k.feature.id = feature.id;
    k.feature.category = feature.category;
    k.feature.presence = feature.presence;
    std::size_t remaining = 0;
    for (std::size_t v = 0; v < feature.values.size(); ++v) {
      const bool rare = static_cast<double>(counts[v]) < min_value_frac * static_cast<double>(coded);
      if (counts[v] == 0 || rare) continue;
      k.remap[v] = static_cast<int>(k.feature.values.size());
      k.feature.values.push_back(feature.values[v]);
      k.feature.labels.push_back(feature.labels[v]);
      remaining += counts[v];
    }
    // Re-coding rare values can push a feature under the language threshold.
    if (remaining < min_langs || k.feature.values.empty()) continue;
    kept.push_back(std::move(k));
  }

  RawTable out;
  out.languages = table.languages;
  out.features.reserve(kept.size());
  for (const auto& k : kept) out.features.push_back(k.feature);
  out.cells.assign(nl * kept.size(), kMissingCode);
  for (std::size_t l = 0; l < nl; ++l) {
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const int c = table.at(l, kept[i].source);
      if (c != kMissingCode) out.at(l, i) = kept[i].remap[c];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// FeatureMatrix

FeatureMatrix::FeatureMatrix(std::vector<std::string> languages, std::vector<Variable> variables,
                             std::vector<std::int8_t> cells)
    : languages_(std::move(languages)), variables_(std::move(variables)), cells_(std::move(cells)) {
  if (cells_.size() != languages_.size() * variables_.size()) {
    throw ValidationError("matrix has " + std::to_string(cells_.size()) + " cells, expected " +
                          std::to_string(languages_.size() * variables_.size()));
  }
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    if (!index_.emplace(variables_[v].id, v).second) {
      throw ValidationError("duplicate variable id '" + variables_[v].id + "'");
    }
  }
  for (auto c : cells_) {
    if (c != 0 && c != 1 && c != kMissing) throw ValidationError("matrix cell outside {0, 1, missing}");
  }
  build_masks();
}

void FeatureMatrix::build_masks() {
  const std::size_t nl = languages_.size();
  const std::size_t nv = variables_.size();
  words_ = kernels::words_for(nl);
  masks_.assign(nv * 3 * words_, 0);
  all_.assign(words_, 0);
  for (std::size_t l = 0; l < nl; ++l) {
    const std::size_t w = l / 64;
    const kernels::Word bit = kernels::Word{1} << (l % 64);
    all_[w] |= bit;
    for (std::size_t v = 0; v < nv; ++v) {
      const auto c = cells_[l * nv + v];
      if (c == kMissing) continue;
      masks_[(v * 3 + (c == 1 ? 0 : 1)) * words_ + w] |= bit;
      masks_[(v * 3 + 2) * words_ + w] |= bit;
    }
  }
}

std::optional<std::size_t> FeatureMatrix::find_variable(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FeatureMatrix::variable_index(std::string_view id) const {
  if (auto v = find_variable(id)) return *v;
  throw ValidationError("unknown variable '" + std::string(id) + "'");
}

bool FeatureMatrix::any_missing(std::span<const std::size_t> variables) const {
  for (auto v : variables) {
    if (count_observed(v) != num_languages()) return true;
  }
  return false;
}

FeatureMatrix FeatureMatrix::select_languages(std::span<const std::size_t> rows) const {
  const std::size_t nv = variables_.size();
  std::vector<std::string> langs;
  std::vector<std::int8_t> cells;
  langs.reserve(rows.size());
  cells.reserve(rows.size() * nv);
  for (auto r : rows) {
    if (r >= languages_.size()) throw ValidationError("language row out of range");
    langs.push_back(languages_[r]);
    cells.insert(cells.end(), cells_.begin() + static_cast<std::ptrdiff_t>(r * nv),
                 cells_.begin() + static_cast<std::ptrdiff_t>((r + 1) * nv));
  }
  return FeatureMatrix(std::move(langs), variables_, std::move(cells));
}

FeatureMatrix FeatureMatrix::select_languages(const std::vector<std::string>& ids) const {
  std::map<std::string_view, std::size_t> row_of;
  for (std::size_t l = 0; l < languages_.size(); ++l) row_of[languages_[l]] = l;
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = row_of.find(id);
    if (it == row_of.end()) throw ValidationError("unknown language '" + id + "'");
    rows.push_back(it->second);
  }
  return select_languages(rows);
}

std::vector<std::string> FeatureMatrix::categories() const {
  std::set<std::string> s;
  for (const auto& v : variables_) s.insert(v.category);
  return {s.begin(), s.end()};
}

// ---------------------------------------------------------------------------
// Binarization

FeatureMatrix binarize(const RawTable& table, BinarizeLog* log) {
  const std::size_t nl = table.num_languages();

  struct Derived {
    Variable variable;
    std::size_t feature;
    // Maps a source code to 0/1.
    std::vector<std::int8_t> value_of_code;
  };
  std::vector<Derived> derived;

  for (std::size_t f = 0; f < table.num_features(); ++f) {
    const auto& feature = table.features[f];
    const std::size_t k = feature.values.size();
    if (k <= 1) {
      if (log) {
        log->warnings.push_back("feature '" + feature.id + "' has " + std::to_string(k) +
                                " observed value(s); dropped");
      }
      continue;
    }
    if (k == 2) {
      derived.push_back({{feature.id, feature.id, feature.labels[1], feature.category,
                          feature.presence ? std::string{} : feature.labels[0]},
                         f,
                         {0, 1}});
    } else if (k <= 7) {
      for (std::size_t v = 0; v < k; ++v) {
        std::vector<std::int8_t> map(k, 0);
        map[v] = 1;
        derived.push_back({{feature.id + "=" + feature.labels[v], feature.id, feature.labels[v],
                            feature.category},
                           f,
                           std::move(map)});
      }
    } else {
      std::vector<std::int8_t> map(k, 1);
      map[0] = 0;
      derived.push_back({{feature.id, feature.id, "present", feature.category}, f, std::move(map)});
    }
  }

  std::vector<Variable> variables;
  variables.reserve(derived.size());
  for (const auto& d : derived) variables.push_back(d.variable);
  std::vector<std::int8_t> cells(nl * derived.size(), kMissing);
  for (std::size_t l = 0; l < nl; ++l) {
    for (std::size_t i = 0; i < derived.size(); ++i) {
      const int c = table.at(l, derived[i].feature);
      if (c != kMissingCode) cells[l * derived.size() + i] = derived[i].value_of_code[c];
    }
  }
  return FeatureMatrix(table.languages, std::move(variables), std::move(cells));
}

void write_matrix_csv(const FeatureMatrix& m, std::ostream& out) {
  csv::Row header{"language_id"};
  for (const auto& v : m.variables()) header.push_back(v.id);
  csv::write_row(out, header);
  for (std::size_t l = 0; l < m.num_languages(); ++l) {
    out << csv::escape(m.languages()[l]);
    for (std::size_t v = 0; v < m.num_variables(); ++v) {
      out << ',';
      const auto c = m.at(l, v);
      if (c != kMissing) out << static_cast<int>(c);
    }
    out << '\n';
  }
}

nlohmann::json manifest_json(const FeatureMatrix& m) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : m.variables()) {
    vars.push_back({{"id", v.id},
                    {"source_feature", v.source_feature},
                    {"value_label", v.value_label},
                    {"zero_label", v.zero_label},
                    {"category", v.category}});
  }
  return {{"languages", m.num_languages()}, {"variables", std::move(vars)}};
}

FeatureMatrix read_matrix(const std::string& csv_path, const std::string& manifest_path) {
  std::ifstream min(manifest_path);
  if (!min) throw ValidationError("cannot open manifest " + manifest_path);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(min);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(manifest_path + ": " + e.what());
  }
  if (!manifest.contains("variables") || !manifest["variables"].is_array()) {
    throw ValidationError(manifest_path + ": missing 'variables' array");
  }
  std::vector<Variable> variables;
  for (const auto& v : manifest["variables"]) {
    variables.push_back({v.at("id").get<std::string>(), v.at("source_feature").get<std::string>(),
                         v.at("value_label").get<std::string>(), v.at("category").get<std::string>(),
                         v.value("zero_label", std::string{})});
  }

  const auto rows = csv::read_file(csv_path);
  if (rows.empty()) throw ParseError(csv_path, 1, 1, "empty matrix file");
  const auto& header = rows.front();
  if (header.size() != variables.size() + 1 || header[0] != "language_id") {
    throw ValidationError(csv_path + ": header does not match manifest " + manifest_path);
  }
  for (std::size_t v = 0; v < variables.size(); ++v) {
    if (header[v + 1] != variables[v].id) {
      throw ValidationError(csv_path + ": column " + std::to_string(v + 2) + " is '" + header[v + 1] +
                            "', manifest says '" + variables[v].id + "'");
    }
  }
  std::vector<std::string> languages;
  std::vector<std::int8_t> cells;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw ParseError(csv_path, r + 1, 1, "expected " + std::to_string(header.size()) + " fields");
    }
    languages.push_back(row[0]);
    for (std::size_t v = 1; v < row.size(); ++v) {
      if (row[v].empty()) {
        cells.push_back(kMissing);
      } else if (row[v] == "0" || row[v] == "1") {
        cells.push_back(static_cast<std::int8_t>(row[v][0] - '0'));
      } else {
        throw ParseError(csv_path, r + 1, v + 1, "cell must be 0, 1 or empty");
      }
    }
  }
  return FeatureMatrix(std::move(languages), std::move(variables), std::move(cells));
}

// ---------------------------------------------------------------------------
// Split

Split split_languages(const FeatureMatrix& m, std::uint64_t seed) {
  const std::size_t n = m.num_languages();
  if (n < 10) {
    throw ValidationError("need at least 10 languages to split, have " + std::to_string(n));
  }
  const std::size_t n_train = (8 * n + 9) / 10;
  const std::size_t n_dev = n / 10;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, {0x5b117}));
  rng.shuffle(order);

  std::vector<int> part(n, 2);
  for (std::size_t i = 0; i < n_train; ++i) part[order[i]] = 0;
  for (std::size_t i = n_train; i < n_train + n_dev; ++i) part[order[i]] = 1;

  Split s;
  s.seed = seed;
  for (std::size_t l = 0; l < n; ++l) {
    auto& dst = part[l] == 0 ? s.train : part[l] == 1 ? s.dev : s.test;
    dst.push_back(m.languages()[l]);
  }
  return s;
}

nlohmann::json split_json(const Split& s) {
  return {{"seed", s.seed}, {"train", s.train}, {"dev", s.dev}, {"test", s.test}};
}

Split split_from_json(const nlohmann::json& j) {
  Split s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.train = j.at("train").get<std::vector<std::string>>();
  s.dev = j.at("dev").get<std::vector<std::string>>();
  s.test = j.at("test").get<std::vector<std::string>>();
  return s;
}

// ---------------------------------------------------------------------------
// WALS CLDF export

std::string wals_area_for_chapter(int chapter) {
  if (chapter >= 1 && chapter <= 19) return "Phonology";
  if (chapter <= 29 && chapter >= 20) return "Morphology";
  if (chapter <= 57 && chapter >= 30) return "Nominal Categories";
  if (chapter <= 64 && chapter >= 58) return "Nominal Syntax";
  if (chapter <= 80 && chapter >= 65) return "Verbal Categories";
  if (chapter <= 97 && chapter >= 81) return "Word Order";
  if (chapter <= 121 && chapter >= 98) return "Simple Clauses";
  if (chapter <= 128 && chapter >= 122) return "Complex Sentences";
  if (chapter <= 138 && chapter >= 129) return "Lexicon";
  if (chapter <= 140 && chapter >= 139) return "Sign Languages";
  if (chapter <= 142 && chapter >= 141) return "Other";
  if (chapter <= 144 && chapter >= 143) return "Word Order";
  return std::string(kUncategorized);
}

namespace {

struct CsvTable {
  std::string path;
  std::vector<csv::Row> rows;
  std::map<std::string, std::size_t> column;

  std::size_t col(const std::string& name) const {
    auto it = column.find(name);
    if (it == column.end()) throw ValidationError(path + ": missing column '" + name + "'");
    return it->second;
  }
  bool has(const std::string& name) const { return column.count(name) != 0; }
};

CsvTable read_with_header(const std::filesystem::path& p) {
  CsvTable t{p.string(), csv::read_file(p.string()), {}};
  if (t.rows.empty()) throw ParseError(t.path, 1, 1, "empty file");
  for (std::size_t c = 0; c < t.rows[0].size(); ++c) t.column[t.rows[0][c]] = c;
  return t;
}

int chapter_of(const std::string& parameter_id) {
  int chapter = 0;
  std::from_chars(parameter_id.data(), parameter_id.data() + parameter_id.size(), chapter);
  return chapter;
}

}  // namespace

RawTable load_wals_cldf(const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  const auto values = read_with_header(dir / "values.csv");
  const std::size_t c_lang = values.col("Language_ID");
  const std::size_t c_param = values.col("Parameter_ID");
  const std::size_t c_value = values.col("Value");

  std::set<std::string> languages;
  if (fs::exists(dir / "languages.csv")) {
    const auto langs = read_with_header(dir / "languages.csv");
    const std::size_t c_id = langs.col("ID");
    for (std::size_t r = 1; r < langs.rows.size(); ++r) languages.insert(langs.rows[r].at(c_id));
  }

  // parameter -> language -> code (first row wins)
  std::map<std::string, std::map<std::string, std::string>> cell;
  for (std::size_t r = 1; r < values.rows.size(); ++r) {
    const auto& row = values.rows[r];
    if (row.size() != values.rows[0].size()) {
      throw ParseError(values.path, r + 1, 1, "field count differs from header");
    }
    if (row[c_value].empty()) continue;
    languages.insert(row[c_lang]);
    cell[row[c_param]].emplace(row[c_lang], row[c_value]);
  }

  std::map<std::pair<std::string, std::string>, std::string> labels;
  if (fs::exists(dir / "codes.csv")) {
    const auto codes = read_with_header(dir / "codes.csv");
    const std::size_t c_p = codes.col("Parameter_ID");
    const std::size_t c_n = codes.col("Name");
    const bool has_number = codes.has("Number");
    for (std::size_t r = 1; r < codes.rows.size(); ++r) {
      const auto& row = codes.rows[r];
      std::string number;
      if (has_number) {
        number = row.at(codes.col("Number"));
      } else {
        const auto& id = row.at(codes.col("ID"));
        number = id.substr(id.rfind('-') + 1);
      }
      labels[{row.at(c_p), number}] = row.at(c_n);
    }
  }

  // Parameters sorted by chapter number then id (1A, 2A, ..., 10A, ...).
  std::vector<std::string> params;
  for (const auto& [p, _] : cell) params.push_back(p);
  std::sort(params.begin(), params.end(), [](const std::string& a, const std::string& b) {
    const int ca = chapter_of(a), cb = chapter_of(b);
    return ca != cb ? ca < cb : a < b;
  });

  RawTable t;
  t.languages.assign(languages.begin(), languages.end());
  std::map<std::string, std::size_t> row_of;
  for (std::size_t l = 0; l < t.languages.size(); ++l) row_of[t.languages[l]] = l;
  t.cells.assign(t.languages.size() * params.size(), kMissingCode);
  for (const auto& p : params) {
    RawFeature f;
    f.id = p;
    f.category = wals_area_for_chapter(chapter_of(p));
    std::set<std::string> distinct;
    for (const auto& [_, v] : cell[p]) distinct.insert(v);
    f.values.assign(distinct.begin(), distinct.end());
    sort_codes(f.values);
    for (const auto& v : f.values) {
      auto it = labels.find({p, v});
      f.labels.push_back(it != labels.end() ? it->second : v);
    }
    t.features.push_back(std::move(f));
  }
  for (std::size_t f = 0; f < params.size(); ++f) {
    const auto& feature = t.features[f];
    for (const auto& [lang, v] : cell[params[f]]) {
      const auto pos = std::find(feature.values.begin(), feature.values.end(), v) - feature.values.begin();
      t.at(row_of.at(lang), f) = static_cast<int>(pos);
    }
  }
  t.validate();
  return t;
}

void write_table(const RawTable& table, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  {
    std::ofstream out(fs::path(directory) / "features.csv", std::ios::binary);
    csv::Row header{"language_id"};
    for (const auto& f : table.features) header.push_back(f.id);
    csv::write_row(out, header);
    for (std::size_t l = 0; l < table.num_languages(); ++l) {
      csv::Row row{table.languages[l]};
      for (std::size_t f = 0; f < table.num_features(); ++f) {
        const int c = table.at(l, f);
        row.push_back(c == kMissingCode ? std::string() : table.features[f].values[c]);
      }
      csv::write_row(out, row);
    }
  }
  {
    std::ofstream out(fs::path(directory) / "categories.csv", std::ios::binary);
    csv::write_row(out, {"feature_id", "category", "kind"});
    for (const auto& f : table.features) {
      csv::write_row(out, {f.id, f.category, f.presence ? "presence" : "categorical"});
    }
  }
  {
    std::ofstream out(fs::path(directory) / "value_labels.csv", std::ios::binary);
    csv::write_row(out, {"feature_id", "code", "label"});
    for (const auto& f : table.features) {
      for (std::size_t v = 0; v < f.values.size(); ++v) csv::write_row(out, {f.id, f.values[v], f.labels[v]});
    }
  }
}

}  // namespace universals
