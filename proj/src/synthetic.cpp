#include "universals/synthetic.hpp"

#include <cstdio>

#include "universals/error.hpp"
#include "universals/random.hpp"

namespace universals {
namespace {

std::string padded(const std::string& prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, i);
  return prefix + buf;
}

int width_for(std::size_t n) {
  int w = 2;
  for (std::size_t x = 100; x <= n; x *= 10) ++w;
  return w;
}

}  // namespace

ForestStructure random_forest(const ForestShape& shape, Rng& rng) {
  ForestStructure s;
  const int w = width_for(shape.nodes);
  for (std::size_t i = 0; i < shape.nodes; ++i) {
    s.variables.push_back(padded(shape.prefix, i, w));
    if (i == 0 || rng.bernoulli(shape.root_probability)) {
      s.parent.emplace_back(std::nullopt);
    } else {
      s.parent.emplace_back(rng.uniform_index(i));
    }
  }
  return s;
}

Network random_network(const ForestStructure& s, Rng& rng, double lo, double hi) {
  if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) throw ValidationError("need 0 <= lo <= hi <= 1");
  auto draw = [&](bool high) {
    const double p = lo + (hi - lo) * rng.uniform01();
    return high ? p : 1.0 - p;
  };
  std::vector<Cpt> cpts(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool high = rng.bernoulli(0.5);
    const double a = draw(high);
    cpts[i].rows.push_back({1.0 - a, a});
    if (s.parent[i]) {
      const double b = draw(!high);
      cpts[i].rows.push_back({1.0 - b, b});
    }
  }
  return Network(s, std::move(cpts), SmoothingPrior{}.alpha);
}

FeatureMatrix sample_matrix(const Network& n, std::size_t languages, Rng& rng, const std::string& category) {
  std::vector<std::string> langs;
  const int w = width_for(languages) + 1;
  for (std::size_t l = 0; l < languages; ++l) langs.push_back(padded("L", l, w));
  std::vector<Variable> vars;
  for (const auto& id : n.variables()) vars.push_back({id, id, "1", category});
  std::vector<std::int8_t> cells;
  cells.reserve(languages * n.size());
  for (std::size_t l = 0; l < languages; ++l) {
    for (auto x : sample_assignment(n, rng)) cells.push_back(static_cast<std::int8_t>(x));
  }
  return FeatureMatrix(std::move(langs), std::move(vars), std::move(cells));
}

FeatureMatrix mask_mcar(const FeatureMatrix& m, double rate, Rng& rng) {
  auto cells = m.cells();
  for (auto& c : cells) {
    if (rng.bernoulli(rate)) c = kMissing;
  }
  return FeatureMatrix(m.languages(), m.variables(), std::move(cells));
}

FeatureMatrix independent_matrix(std::size_t variables, std::size_t languages, Rng& rng) {
  std::vector<double> rate(variables);
  for (auto& r : rate) r = 0.2 + 0.6 * rng.uniform01();
  std::vector<std::string> langs;
  const int lw = width_for(languages) + 1;
  for (std::size_t l = 0; l < languages; ++l) langs.push_back(padded("L", l, lw));
  std::vector<Variable> vars;
  const int vw = width_for(variables);
  for (std::size_t v = 0; v < variables; ++v) {
    const auto id = padded("V", v, vw);
    vars.push_back({id, id, "1", "synthetic"});
  }
  std::vector<std::int8_t> cells;
  cells.reserve(languages * variables);
  for (std::size_t l = 0; l < languages; ++l) {
    for (std::size_t v = 0; v < variables; ++v) cells.push_back(rng.bernoulli(rate[v]) ? 1 : 0);
  }
  return FeatureMatrix(std::move(langs), std::move(vars), std::move(cells));
}

}  // namespace universals
