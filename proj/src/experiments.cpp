#include "universals/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "universals/corpus.hpp"
#include "universals/csv.hpp"
#include "universals/error.hpp"
#include "universals/inference.hpp"
#include "universals/parallel.hpp"
#include "universals/random.hpp"

namespace universals {
namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// C(n, k), saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t num = n - k + i;
    if (r > std::numeric_limits<std::size_t>::max() / num) return std::numeric_limits<std::size_t>::max();
    r = r * num / i;
  }
  return r;
}

// Positions into a pool of size n.
std::vector<std::vector<std::size_t>> implicant_sets(std::size_t n, std::size_t k, std::size_t cap,
                                                     std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> out;
  if (binomial(n, k) <= cap) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
      out.push_back(idx);
      std::size_t t = k;
      while (t > 0 && idx[t - 1] == n - k + (t - 1)) --t;
      if (t == 0) break;
      ++idx[t - 1];
      for (std::size_t u = t; u < k; ++u) idx[u] = idx[u - 1] + 1;
    }
    return out;
  }
  Rng rng(seed);
  std::set<std::vector<std::size_t>> drawn;
  std::vector<std::size_t> pool(n);
  while (drawn.size() < cap) {
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.uniform_index(n - i)]);
    std::vector<std::size_t> s(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(s.begin(), s.end());
    drawn.insert(std::move(s));
  }
  return {drawn.begin(), drawn.end()};
}

int majority(std::size_t ones, std::size_t zeros) { return ones >= zeros ? 1 : 0; }

std::vector<CategoryAccuracy> finish(std::map<std::string, CategoryAccuracy>& acc) {
  std::vector<CategoryAccuracy> out;
  for (auto& [c, a] : acc) {
    a.category = c;
    a.accuracy = a.n_predictions ? static_cast<double>(a.correct) / static_cast<double>(a.n_predictions) : 0.0;
    out.push_back(a);
  }
  return out;
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace

const GridCell* PredictionReport::cell(const std::string& category, std::size_t k) const {
  for (const auto& c : cells) {
    if (c.category == category && c.k == k) return &c;
  }
  return nullptr;
}

std::optional<double> PredictionReport::mean_accuracy(std::size_t k) const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& c : cells) {
    if (c.k != k) continue;
    sum += c.accuracy;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

double PredictionReport::comparable_mean(const std::vector<CategoryAccuracy>& baseline) const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& a : baseline) {
    const bool in_grid = std::any_of(cells.begin(), cells.end(), [&](const GridCell& c) { return c.category == a.category; });
    if (!in_grid) continue;
    sum += a.accuracy;
    ++count;
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

const std::vector<ReportedBaseline>& reported_baselines() {
  static const std::vector<ReportedBaseline> rows{{"PRA", 0.81}, {"Language embeddings", 0.85}};
  return rows;
}

PredictionReport run_prediction_grid(const Network& n, const FeatureMatrix& test, const GridOptions& options) {
  if (options.k_min == 0 || options.k_min > options.k_max) throw ValidationError("invalid k range");
  if (options.max_sets_per_cell == 0) throw ValidationError("max_sets_per_cell must be positive");
  const ForestEngine engine(n);
  const std::size_t nv = n.size();
  std::vector<std::size_t> col(nv);
  std::vector<std::string> category(nv), source(nv);
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < nv; ++i) {
    col[i] = test.variable_index(n.name(i));
    const auto& var = test.variable(col[i]);
    category[i] = var.category;
    source[i] = var.source_feature;
    members[var.category].push_back(i);
  }

  PredictionReport report;
  for (const auto& [c, _] : members) report.categories.push_back(c);
  for (std::size_t k = options.k_min; k <= options.k_max; ++k) report.ks.push_back(k);

  const std::size_t nl = test.num_languages();
  for (const auto& c : report.categories) {
    const auto& vars = members[c];
    for (std::size_t k : report.ks) {
      if (vars.size() < k + 1) {
        report.notes.push_back(c + " k=" + std::to_string(k) + ": omitted, only " +
                               std::to_string(vars.size()) + " variables");
        continue;
      }
      const auto sets = implicant_sets(vars.size(), k, options.max_sets_per_cell,
                                       derive_seed(options.seed, {fnv1a(c), k}));
      std::vector<std::size_t> correct(sets.size(), 0), total(sets.size(), 0);
      parallel_for(
          sets.size(),
          [&](std::size_t s) {
            std::vector<char> in_set(vars.size(), 0);
            for (auto p : sets[s]) in_set[p] = 1;
            std::vector<std::int8_t> ev(nv);
            Posterior post;
            ForestEngine::Workspace ws;
            std::map<std::uint64_t, std::vector<double>> by_key;
            for (std::size_t l = 0; l < nl; ++l) {
              const auto row = test.row(l);
              for (std::size_t i = 0; i < nv; ++i) ev[i] = category[i] == c ? kMissing : row[col[i]];
              for (auto p : sets[s]) ev[vars[p]] = row[col[vars[p]]];
              by_key.clear();
              for (std::size_t t = 0; t < vars.size(); ++t) {
                const std::size_t target = vars[t];
                const auto truth = row[col[target]];
                if (in_set[t] || truth == kMissing) continue;
                std::uint64_t key = 0;
                for (std::size_t q = 0; q < k; ++q) {
                  if (source[vars[sets[s][q]]] == source[target]) key |= std::uint64_t{1} << q;
                }
                auto it = by_key.find(key);
                if (it == by_key.end()) {
                  auto withheld = ev;
                  for (std::size_t q = 0; q < k; ++q) {
                    if (key >> q & 1U) withheld[vars[sets[s][q]]] = kMissing;
                  }
                  engine.run(withheld, post, ws);
                  it = by_key.emplace(key, post.p1).first;
                }
                total[s] += 1;
                correct[s] += decode_marginal(it->second[target]) == truth ? 1 : 0;
              }
            }
          },
          options.threads);

      GridCell cell;
      cell.category = c;
      cell.k = k;
      cell.n_sets = sets.size();
      for (std::size_t s = 0; s < sets.size(); ++s) {
        cell.correct += correct[s];
        cell.n_predictions += total[s];
      }
      if (cell.n_predictions == 0) {
        report.notes.push_back(c + " k=" + std::to_string(k) + ": omitted, no observed targets");
        continue;
      }
      cell.accuracy = static_cast<double>(cell.correct) / static_cast<double>(cell.n_predictions);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

std::vector<CategoryAccuracy> baseline_most_frequent(const FeatureMatrix& train, const FeatureMatrix& test) {
  std::map<std::string, CategoryAccuracy> acc;
  for (std::size_t v = 0; v < test.num_variables(); ++v) {
    int guess = 1;
    if (auto tv = train.find_variable(test.variable(v).id)) {
      const std::size_t ones = train.count_ones(*tv);
      guess = majority(ones, train.count_observed(*tv) - ones);
    }
    auto& a = acc[test.variable(v).category];
    a.correct += kernels::popcount(test.level(v, guess));
    a.n_predictions += test.count_observed(v);
  }
  return finish(acc);
}

std::vector<CategoryAccuracy> baseline_pairwise(const FeatureMatrix& train, const FeatureMatrix& test) {
  struct Rule {
    std::optional<std::size_t> predictor;  // index into train
    int fallback = 1;
    int given[2] = {1, 1};
  };
  // Correct predictions of rule r for target t on matrix m (predictor at p).
  auto score = [](const FeatureMatrix& m, std::size_t t, std::optional<std::size_t> p, const Rule& r) {
    std::size_t correct = kernels::popcount(m.level(t, r.fallback));
    if (!p) return correct;
    correct -= kernels::and_popcount(m.level(t, r.fallback), m.observed(*p));
    for (int v = 0; v < 2; ++v) correct += kernels::and_popcount(m.level(*p, v), m.level(t, r.given[v]));
    return correct;
  };

  std::map<std::string, CategoryAccuracy> acc;
  for (std::size_t v = 0; v < test.num_variables(); ++v) {
    const auto& target = test.variable(v);
    Rule best;
    std::optional<std::size_t> best_test_predictor;
    if (auto tt = train.find_variable(target.id)) {
      const std::size_t ones = train.count_ones(*tt);
      best.fallback = majority(ones, train.count_observed(*tt) - ones);
      std::size_t best_score = score(train, *tt, std::nullopt, best);
      for (std::size_t p = 0; p < train.num_variables(); ++p) {
        const auto& pv = train.variable(p);
        if (p == *tt || pv.source_feature == target.source_feature) continue;
        const auto tp = test.find_variable(pv.id);
        if (!tp) continue;
        Rule r;
        r.predictor = p;
        r.fallback = best.fallback;
        for (int x = 0; x < 2; ++x) {
          const std::size_t k1 = kernels::and_popcount(train.level(p, x), train.ones(*tt));
          const std::size_t k0 = kernels::and_popcount(train.level(p, x), train.zeros(*tt));
          r.given[x] = k0 + k1 == 0 ? best.fallback : majority(k1, k0);
        }
        const std::size_t sc = score(train, *tt, p, r);
        if (sc > best_score) {
          best_score = sc;
          best = r;
          best_test_predictor = tp;
        }
      }
    }
    auto& a = acc[target.category];
    a.correct += score(test, v, best_test_predictor, best);
    a.n_predictions += test.count_observed(v);
  }
  return finish(acc);
}

double mean_accuracy(const std::vector<CategoryAccuracy>& per_category) {
  if (per_category.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& a : per_category) sum += a.accuracy;
  return sum / static_cast<double>(per_category.size());
}

void write_prediction_csv(const PredictionReport& r, std::ostream& out) {
  std::vector<std::string> header{"row"};
  for (auto k : r.ks) header.push_back("k=" + std::to_string(k));
  header.push_back("all");
  header.push_back("note");
  csv::write_row(out, header);

  const std::size_t width = header.size();
  for (const auto& c : r.categories) {
    std::vector<std::string> row{c};
    for (auto k : r.ks) {
      const auto* cell = r.cell(c, k);
      row.push_back(cell ? fixed(cell->accuracy) : "");
    }
    row.resize(width);
    csv::write_row(out, row);
  }
  std::vector<std::string> mean{"Mean"};
  for (auto k : r.ks) {
    const auto m = r.mean_accuracy(k);
    mean.push_back(m ? fixed(*m) : "");
  }
  mean.resize(width);
  csv::write_row(out, mean);

  auto spanning = [&](const std::string& name, double value, const std::string& note) {
    std::vector<std::string> row{name};
    row.resize(width - 2);
    row.push_back(fixed(value));
    row.push_back(note);
    csv::write_row(out, row);
  };
  spanning("Most freq.", r.comparable_mean(r.most_frequent), "");
  spanning("Pairwise", r.comparable_mean(r.pairwise), "");
  for (const auto& b : reported_baselines()) spanning(b.name, b.accuracy, "reported, not reproduced");
}

nlohmann::json prediction_json(const PredictionReport& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"category", c.category},
                     {"k", c.k},
                     {"n_sets", c.n_sets},
                     {"correct", c.correct},
                     {"n_predictions", c.n_predictions},
                     {"accuracy", c.accuracy}});
  }
  nlohmann::json mean = nlohmann::json::object();
  for (auto k : r.ks) {
    if (const auto m = r.mean_accuracy(k)) mean[std::to_string(k)] = *m;
  }
  auto per_category = [](const std::vector<CategoryAccuracy>& v) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& a : v) {
      j.push_back({{"category", a.category},
                   {"correct", a.correct},
                   {"n_predictions", a.n_predictions},
                   {"accuracy", a.accuracy}});
    }
    return j;
  };
  nlohmann::json reported = nlohmann::json::array();
  for (const auto& b : reported_baselines()) {
    reported.push_back({{"name", b.name}, {"accuracy", b.accuracy}, {"note", "reported, not reproduced"}});
  }
  return {{"categories", r.categories},
          {"ks", r.ks},
          {"cells", std::move(cells)},
          {"mean", std::move(mean)},
          {"notes", r.notes},
          {"baselines",
           {{"most_frequent", {{"per_category", per_category(r.most_frequent)}, {"mean", r.comparable_mean(r.most_frequent)}, {"mean_all_categories", mean_accuracy(r.most_frequent)}}},
            {"pairwise", {{"per_category", per_category(r.pairwise)}, {"mean", r.comparable_mean(r.pairwise)}, {"mean_all_categories", mean_accuracy(r.pairwise)}}},
            {"reported", std::move(reported)}}}};
}

}  // namespace universals
