#include "universals/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "universals/corpus.hpp"
#include "universals/error.hpp"
#include "universals/parallel.hpp"

namespace universals {
namespace {

using kernels::Word;

double xlogx_ratio(double o, double e) { return o > 0.0 ? o * std::log(o / e) : 0.0; }

// counts[a][b] of (i = a, j = b) within the given stratum mask.
std::array<std::array<double, 2>, 2> table_2x2(const FeatureMatrix& m, std::size_t i, std::size_t j,
                                               std::span<const Word> stratum) {
  std::array<std::array<double, 2>, 2> n{};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      n[a][b] = static_cast<double>(
          stratum.empty() ? kernels::and_popcount(m.level(i, a), m.level(j, b))
                          : kernels::and_popcount(m.level(i, a), m.level(j, b), stratum));
    }
  }
  return n;
}

// Calls fn(combo) for every size-k subset of pool in lexicographic order until
// fn returns true. Returns whether fn returned true.
template <class Fn>
bool for_each_combination(const std::vector<std::size_t>& pool, std::size_t k, Fn&& fn) {
  if (k > pool.size()) return false;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::size_t> combo(k);
  for (;;) {
    for (std::size_t t = 0; t < k; ++t) combo[t] = pool[idx[t]];
    if (fn(std::as_const(combo))) return true;
    std::size_t t = k;
    while (t > 0 && idx[t - 1] == pool.size() - k + (t - 1)) --t;
    if (t == 0) return false;
    ++idx[t - 1];
    for (std::size_t u = t; u < k; ++u) idx[u] = idx[u - 1] + 1;
  }
}

}  // namespace

double g_squared_2x2(double n00, double n01, double n10, double n11) {
  const double n = n00 + n01 + n10 + n11;
  if (n <= 0.0) return 0.0;
  const double r0 = n00 + n01, r1 = n10 + n11, c0 = n00 + n10, c1 = n01 + n11;
  return 2.0 * (xlogx_ratio(n00, r0 * c0 / n) + xlogx_ratio(n01, r0 * c1 / n) +
                xlogx_ratio(n10, r1 * c0 / n) + xlogx_ratio(n11, r1 * c1 / n));
}

CiTestResult ci_test(const FeatureMatrix& m, std::size_t i, std::size_t j,
                     std::span<const std::size_t> cond, std::size_t min_complete_cases) {
  if (i == j) throw ValidationError("ci_test needs two distinct variables");
  for (auto c : cond) {
    if (c == i || c == j) throw ValidationError("conditioning set contains a tested variable");
  }
  if (cond.size() > 16) throw ValidationError("conditioning set too large");

  CiTestResult r;
  double g2 = 0.0;
  int dof = 0;
  std::size_t n_eff = 0;
  std::vector<Word> stratum(cond.empty() ? 0 : m.words());
  const std::size_t strata = std::size_t{1} << cond.size();
  for (std::size_t s = 0; s < strata; ++s) {
    if (!cond.empty()) {
      const auto first = m.level(cond[0], static_cast<int>(s & 1U));
      std::copy(first.begin(), first.end(), stratum.begin());
      for (std::size_t t = 1; t < cond.size(); ++t) {
        kernels::and_into(stratum, stratum, m.level(cond[t], static_cast<int>((s >> t) & 1U)));
      }
    }
    const auto n = table_2x2(m, i, j, stratum);
    const double total = n[0][0] + n[0][1] + n[1][0] + n[1][1];
    n_eff += static_cast<std::size_t>(total);
    const bool rows_ok = n[0][0] + n[0][1] > 0 && n[1][0] + n[1][1] > 0;
    const bool cols_ok = n[0][0] + n[1][0] > 0 && n[0][1] + n[1][1] > 0;
    if (!rows_ok || !cols_ok) continue;
    ++dof;
    g2 += g_squared_2x2(n[0][0], n[0][1], n[1][0], n[1][1]);
  }

  r.n_effective = n_eff;
  if (n_eff < min_complete_cases) {
    r.status = CiStatus::kInsufficient;
    return r;
  }
  if (dof == 0) {
    r.status = CiStatus::kDegenerate;
    return r;
  }
  r.statistic = std::max(0.0, g2);
  r.dof = dof;
  const boost::math::chi_squared dist(static_cast<double>(dof));
  r.p_value = std::clamp(boost::math::cdf(boost::math::complement(dist, r.statistic)), 0.0, 1.0);
  return r;
}

bool Skeleton::adjacent(std::size_t a, std::size_t b) const { return edges.count(make_edge(a, b)) != 0; }

std::vector<std::size_t> Skeleton::neighbors(std::size_t a) const {
  std::vector<std::size_t> out;
  for (const auto& [x, y] : edges) {
    if (x == a) out.push_back(y);
    if (y == a) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Skeleton learn_skeleton(const FeatureMatrix& m, const SkeletonOptions& options) {
  const std::size_t nv = m.num_variables();
  Skeleton s;
  s.num_variables = nv;
  if (nv < 2) return s;

  // Lexicographic rank of each variable id.
  std::vector<std::size_t> by_id(nv);
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return m.variable(a).id < m.variable(b).id; });
  std::vector<std::size_t> rank(nv);
  for (std::size_t r = 0; r < nv; ++r) rank[by_id[r]] = r;

  std::vector<std::vector<char>> adj(nv, std::vector<char>(nv, 1));
  for (std::size_t v = 0; v < nv; ++v) adj[v][v] = 0;

  for (std::size_t level = 0; level <= options.max_cond; ++level) {
    const auto frozen = adj;
    // Edges as (lower rank, higher rank) in lexicographic order.
    std::vector<Edge> work;
    bool any_testable = false;
    for (std::size_t ra = 0; ra < nv; ++ra) {
      for (std::size_t rb = ra + 1; rb < nv; ++rb) {
        const std::size_t a = by_id[ra], b = by_id[rb];
        if (!frozen[a][b]) continue;
        work.emplace_back(a, b);
      }
    }
    auto pool_of = [&](std::size_t x, std::size_t y) {
      std::vector<std::size_t> pool;
      for (std::size_t r = 0; r < nv; ++r) {
        const std::size_t v = by_id[r];
        if (v != y && frozen[x][v]) pool.push_back(v);
      }
      return pool;
    };
    for (const auto& [a, b] : work) {
      if (pool_of(a, b).size() >= level || pool_of(b, a).size() >= level) {
        any_testable = true;
        break;
      }
    }
    if (!any_testable) break;

    std::vector<std::optional<std::vector<std::size_t>>> removed(work.size());
    parallel_for(
        work.size(),
        [&](std::size_t e) {
          const auto [a, b] = work[e];
          for (const auto& [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
            const auto pool = pool_of(x, y);
            const bool hit = for_each_combination(pool, level, [&](const std::vector<std::size_t>& c) {
              const auto r = ci_test(m, a, b, c, options.min_complete_cases);
              // A conditional test with no informative stratum says nothing about independence.
              if (r.status == CiStatus::kDegenerate && !c.empty()) return false;
              if (r.p_value > options.significance || r.status != CiStatus::kOk) {
                removed[e] = c;
                return true;
              }
              return false;
            });
            if (hit) return;
          }
        },
        options.threads);

    for (std::size_t e = 0; e < work.size(); ++e) {
      if (!removed[e]) continue;
      const auto [a, b] = work[e];
      adj[a][b] = adj[b][a] = 0;
      s.sepsets[make_edge(a, b)] = *removed[e];
    }
  }

  for (std::size_t a = 0; a < nv; ++a) {
    for (std::size_t b = a + 1; b < nv; ++b) {
      if (adj[a][b]) s.edges.insert({a, b});
    }
  }
  return s;
}

double mutual_information(const FeatureMatrix& m, std::size_t i, std::size_t j) {
  const auto n = table_2x2(m, i, j, {});
  const double total = n[0][0] + n[0][1] + n[1][0] + n[1][1];
  if (total <= 0.0) return 0.0;
  const double r[2] = {n[0][0] + n[0][1], n[1][0] + n[1][1]};
  const double c[2] = {n[0][0] + n[1][0], n[0][1] + n[1][1]};
  double mi = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      if (n[a][b] > 0.0) mi += n[a][b] / total * std::log(n[a][b] * total / (r[a] * c[b]));
    }
  }
  return std::max(0.0, mi);
}

ForestStructure spanning_forest(const std::vector<std::string>& ids, const std::set<Edge>& edges,
                                const std::map<Edge, double>& weight) {
  const std::size_t nv = ids.size();
  auto key = [&](const Edge& e) {
    const auto& a = ids[e.first];
    const auto& b = ids[e.second];
    return a < b ? std::pair{a, b} : std::pair{b, a};
  };
  std::vector<Edge> order(edges.begin(), edges.end());
  std::sort(order.begin(), order.end(), [&](const Edge& x, const Edge& y) {
    const double wx = weight.at(x), wy = weight.at(y);
    if (wx != wy) return wx > wy;
    return key(x) < key(y);
  });

  std::vector<std::size_t> root(nv);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](std::size_t v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  std::vector<std::vector<std::size_t>> tree(nv);
  for (const auto& e : order) {
    const auto ra = find(e.first), rb = find(e.second);
    if (ra == rb) continue;
    root[ra] = rb;
    tree[e.first].push_back(e.second);
    tree[e.second].push_back(e.first);
  }

  ForestStructure out;
  out.variables = ids;
  out.parent.assign(nv, std::nullopt);
  std::vector<char> seen(nv, 0);
  // Components in order of their smallest id; each rooted at max degree.
  std::vector<std::size_t> by_id(nv);
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  for (auto start : by_id) {
    if (seen[start]) continue;
    std::vector<std::size_t> component{start};
    seen[start] = 1;
    for (std::size_t h = 0; h < component.size(); ++h) {
      for (auto nb : tree[component[h]]) {
        if (!seen[nb]) {
          seen[nb] = 1;
          component.push_back(nb);
        }
      }
    }
    std::size_t best = component.front();
    for (auto v : component) {
      if (tree[v].size() > tree[best].size() ||
          (tree[v].size() == tree[best].size() && ids[v] < ids[best])) {
        best = v;
      }
    }
    std::vector<std::size_t> queue{best};
    std::vector<char> placed(nv, 0);
    placed[best] = 1;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      for (auto nb : tree[queue[h]]) {
        if (placed[nb]) continue;
        placed[nb] = 1;
        out.parent[nb] = queue[h];
        queue.push_back(nb);
      }
    }
  }
  return out;
}

ForestStructure orient_and_forestify(const Skeleton& s, const FeatureMatrix& m) {
  if (s.num_variables != m.num_variables()) {
    throw ValidationError("skeleton and matrix disagree on the number of variables");
  }
  std::vector<std::string> ids;
  ids.reserve(m.num_variables());
  for (const auto& v : m.variables()) ids.push_back(v.id);
  std::map<Edge, double> weight;
  for (const auto& e : s.edges) weight[e] = mutual_information(m, e.first, e.second);
  return spanning_forest(ids, s.edges, weight);
}

}  // namespace universals
