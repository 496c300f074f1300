#include <cmath>
#include <sstream>

#include "doctest.h"

#include "support.hpp"
#include "tmpdir.hpp"
#include "universals/error.hpp"
#include "universals/implications.hpp"
#include "universals/inference.hpp"
#include "universals/learning.hpp"
#include "universals/random.hpp"
#include "universals/structure.hpp"
#include "universals/synthetic.hpp"

using namespace universals;

namespace {

// Student t two-sided tail by Simpson integration of the density on [0, |t|].
double t_two_sided(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
  auto f = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const int n = 20000;
  const double h = std::abs(t) / n;
  double s = f(0) + f(std::abs(t));
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4 : 2);
  return 1.0 - 2.0 * s * h / 3.0;
}

struct WelchOracle {
  double t, df;
};

// Textbook Welch statistic with sample variances of 0/1 data.
WelchOracle welch_oracle(double na, double ka, double nb, double kb) {
  auto var = [](double n, double k) {
    const double mean = k / n;
    return (k * (1 - mean) * (1 - mean) + (n - k) * mean * mean) / (n - 1);
  };
  const double sa = var(na, ka) / na, sb = var(nb, kb) / nb;
  return {(ka / na - kb / nb) / std::sqrt(sa + sb),
          (sa + sb) * (sa + sb) / (sa * sa / (na - 1) + sb * sb / (nb - 1))};
}

// Fit a network (learned structure) to m.
Network fit(const FeatureMatrix& m) {
  const auto s = orient_and_forestify(learn_skeleton(m), m);
  return em_fit(s, m, SmoothingPrior(5.0)).first;
}

}  // namespace

TEST_CASE("Welch test agrees with the textbook statistic and an integrated tail") {
  const std::array<std::array<std::size_t, 4>, 5> cases{{
      {40, 30, 200, 100}, {12, 3, 500, 260}, {100, 50, 100, 45}, {25, 20, 60, 20}, {300, 160, 1000, 510}}};
  for (const auto& c : cases) {
    const auto r = welch_binary(c[0], c[1], c[2], c[3]);
    const auto o = welch_oracle(c[0], c[1], c[2], c[3]);
    CHECK(r.t == doctest::Approx(o.t).epsilon(1e-12));
    CHECK(r.df == doctest::Approx(o.df).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(t_two_sided(o.t, o.df)).epsilon(1e-7));
  }
  CHECK(welch_binary(10, 10, 20, 20).p_value == 1.0);
  CHECK(welch_binary(10, 10, 20, 0).p_value == 0.0);
  CHECK_THROWS_AS(welch_binary(1, 1, 20, 3), ValidationError);
}

TEST_CASE("literals") {
  CHECK(parse_literal("OV").variable == "OV");
  CHECK(parse_literal("OV").value == 1);
  CHECK(parse_literal("!OV").value == 0);
  CHECK(literal_text(parse_literal("!x=y")) == "!x=y");
  CHECK_THROWS_AS(parse_literal(""), ValidationError);
  CHECK_THROWS_AS(parse_literal("!"), ValidationError);
}

TEST_CASE("empirical_conditional") {
  const auto m = test_support::matrix({"j", "i"}, {"11", "11", "10", "1.", "01", "0."});
  CHECK(empirical_conditional(m, {"j"}, "i") == doctest::Approx(2.0 / 3.0));
  CHECK(empirical_conditional(m, {"j"}, "!i") == doctest::Approx(1.0 / 3.0));
  CHECK(empirical_conditional(m, {"!j"}, "i") == doctest::Approx(1.0));
  const auto none = test_support::matrix({"j", "i"}, {"0.", "01"});
  CHECK_THROWS_AS(empirical_conditional(none, {"j"}, "i"), UndefinedError);
}

TEST_CASE("deterministic implication is highly significant") {
  Rng rng(1);
  std::vector<std::string> rows;
  for (int l = 0; l < 500; ++l) {
    const int j = rng.bernoulli(0.4);
    const int i = j ? 1 : rng.bernoulli(0.3);
    rows.push_back(std::string{static_cast<char>('0' + j), static_cast<char>('0' + i)});
  }
  const auto m = test_support::matrix({"j", "i"}, rows);
  const auto n = fit(m);
  const auto imp = test_implication(n, m, {"j"}, "i");
  CHECK(imp.p_raw < 1e-6);
  CHECK(imp.p_cond > imp.p_prior);
  CHECK(imp.n_b == 500);
  CHECK(imp.n_a == static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](auto& r) { return r[0] == '1'; })));
  CHECK_THROWS_AS(test_implication(n, m, {"i"}, "!i"), ValidationError);
  CHECK_THROWS_AS(test_implication(n, m, {"zz"}, "i"), ValidationError);
}

TEST_CASE("disconnected trees give zero effect and a null test") {
  Rng rng(2);
  std::vector<std::string> rows;
  for (int l = 0; l < 400; ++l) {
    rows.push_back(std::string{static_cast<char>('0' + rng.bernoulli(0.5)), static_cast<char>('0' + rng.bernoulli(0.5))});
  }
  const auto m = test_support::matrix({"a", "b"}, rows);
  const ForestStructure s{{"a", "b"}, {std::nullopt, std::nullopt}};
  const auto n = map_fit_complete(s, m, SmoothingPrior(5.0));
  const auto imp = test_implication(n, m, {"a"}, "b");
  CHECK(imp.effect == 0.0);
  CHECK(imp.p_raw > 0.01);
}

TEST_CASE("small implicant group is never significant") {
  std::vector<std::string> rows(100, "00");
  for (int l = 0; l < 9; ++l) rows[l] = "11";
  const auto m = test_support::matrix({"j", "i"}, rows);
  const auto imp = test_implication(fit(m), m, {"j"}, "i");
  CHECK(imp.n_a == 9);
  CHECK(imp.p_raw == 1.0);
}

TEST_CASE("single-variable network yields no implications") {
  const auto m = test_support::matrix({"a"}, {"0", "1", "1"});
  const Network n(ForestStructure{{"a"}, {std::nullopt}}, {Cpt{{{0.5, 0.5}}}}, 5.0);
  DiscoveryOptions o;
  o.max_implicants = 1;
  o.min_support = 1;
  const auto d = discover(n, m, o);
  CHECK(d.implications.empty());
  CHECK(d.n_tests == 0);
}

TEST_CASE("discovery: Bonferroni soundness, ordering and determinism (property)") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Rng rng(70 + seed);
    const auto truth = random_network(random_forest({8, 0.2, "X"}, rng), rng, 0.7, 0.95);
    const auto m = mask_mcar(sample_matrix(truth, 600, rng), 0.2, rng);
    const auto n = fit(m);
    DiscoveryOptions o;
    o.max_implicants = 2;
    const auto d = discover(n, m, o);
    CHECK(!d.implications.empty());
    for (const auto& imp : d.implications) {
      CHECK(imp.p_raw <= o.level / static_cast<double>(d.n_tests));
      CHECK(imp.p_corrected < o.level);
      CHECK(imp.n_tests == d.n_tests);
      CHECK(std::is_sorted(imp.implicants.begin(), imp.implicants.end()));
      // the reported p_raw is reproducible one implication at a time
      const auto single = test_implication(n, m, imp.implicants, imp.implicand);
      CHECK(single.p_raw == imp.p_raw);
      CHECK(single.p_cond == doctest::Approx(imp.p_cond).epsilon(1e-12));
    }
    for (std::size_t k = 1; k < d.implications.size(); ++k) {
      CHECK(d.implications[k - 1].effect >= d.implications[k].effect);
    }
    o.threads = 3;
    const auto again = discover(n, m, o);
    std::ostringstream a, b;
    write_implications_csv(d.implications, a);
    write_implications_csv(again.implications, b);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("discovery counts tests over supported implicant sets") {
  // 3 independent-ish variables, all sets supported: 3 singletons x 2 implicands + 3 pairs x 1
  Rng rng(5);
  std::vector<std::string> rows;
  for (int l = 0; l < 400; ++l) {
    std::string r;
    for (int v = 0; v < 3; ++v) r += static_cast<char>('0' + rng.bernoulli(0.5));
    rows.push_back(r);
  }
  const auto m = test_support::matrix({"a", "b", "c"}, rows);
  const auto n = fit(m);
  DiscoveryOptions o;
  o.max_implicants = 3;
  const auto d = discover(n, m, o);
  CHECK(d.n_implicant_sets == 7);
  CHECK(d.n_tests == 9);
  o.min_support = 1000;
  CHECK(discover(n, m, o).n_implicant_sets == 0);
}

TEST_CASE("two-sided variables: negative literals and implicand polarity") {
  Rng rng(8);
  std::vector<Variable> vars{{"A", "A", "VO", "c", "OV"}, {"B", "B", "Prep", "c", "Postp"}};
  std::vector<std::string> langs;
  std::vector<std::int8_t> cells;
  for (int l = 0; l < 400; ++l) {
    langs.push_back("L" + std::to_string(l));
    const int a = rng.bernoulli(0.5);
    cells.push_back(static_cast<std::int8_t>(a));
    cells.push_back(static_cast<std::int8_t>(rng.bernoulli(a ? 0.1 : 0.9)));
  }
  const FeatureMatrix m(langs, vars, cells);
  const auto n = fit(m);
  const auto d = discover(n, m, {});
  bool saw_negative_implicant = false;
  for (const auto& imp : d.implications) {
    // reported polarity is the one the implicants raise
    CHECK(imp.p_cond > imp.p_prior);
    saw_negative_implicant = saw_negative_implicant || imp.implicants.front().front() == '!';
  }
  CHECK(saw_negative_implicant);
  // "A" (VO) lowers B, so the implicand comes out as !B
  bool found = false;
  for (const auto& imp : d.implications) {
    if (imp.implicants == std::vector<std::string>{"A"}) {
      CHECK(imp.implicand == "!B");
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("model and empirical conditionals agree on adjacent pairs") {
  Rng rng(13);
  const auto truth = random_network(random_forest({8, 0.0, "X"}, rng), rng, 0.7, 0.95);
  const auto m = mask_mcar(sample_matrix(truth, 2000, rng), 0.2, rng);
  const auto n = fit(m);
  for (std::size_t i = 0; i < n.size(); ++i) {
    const auto p = n.parent(i);
    if (!p) continue;
    for (auto [a, b] : {std::pair{i, *p}, std::pair{*p, i}}) {
      const auto ip = implication_conditional(n, n.name(a), n.name(b));
      CHECK(std::abs(ip.p_cond - empirical_conditional(m, {n.name(b)}, n.name(a))) < 0.1);
    }
  }
}

TEST_CASE("transitivity along a path keeps the sign") {
  Rng rng(19);
  const auto truth = random_network(random_forest({6, 0.0, "X"}, rng), rng, 0.75, 0.95);
  const auto m = sample_matrix(truth, 1500, rng);
  const auto n = fit(m);
  DiscoveryOptions o;
  o.max_implicants = 1;
  const auto d = discover(n, m, o);
  std::map<std::pair<std::string, std::string>, double> effect;
  for (const auto& imp : d.implications) {
    if (imp.implicand.front() == '!') continue;
    effect[{imp.implicants.front(), imp.implicand}] = imp.p_cond - imp.p_prior;
  }
  auto up = [&](std::size_t x) {
    std::vector<std::size_t> out{x};
    while (n.parent(x)) out.push_back(x = *n.parent(x));
    return out;
  };
  // b strictly inside the tree path from a to c
  auto on_path = [&](std::size_t a, std::size_t b, std::size_t c) {
    const auto ua = up(a), uc = up(c);
    const std::set<std::size_t> sc(uc.begin(), uc.end());
    std::set<std::size_t> path;
    std::optional<std::size_t> lca;
    for (auto x : ua) {
      path.insert(x);
      if (sc.count(x)) {
        lca = x;
        break;
      }
    }
    if (!lca) return false;
    for (auto x : uc) {
      if (x == *lca) break;
      path.insert(x);
    }
    return b != a && b != c && path.count(b) != 0;
  };
  int checked = 0;
  for (const auto& [ab, e1] : effect) {
    for (const auto& [bc, e2] : effect) {
      if (ab.second != bc.first || ab.first == bc.second) continue;
      if (e1 < 0.3 || e2 < 0.3) continue;
      const auto a = n.index_of(ab.first), b = n.index_of(ab.second), c = n.index_of(bc.second);
      if (!on_path(a, b, c)) continue;
      const auto ip = implication_conditional(n, n.name(c), n.name(a));
      CHECK(ip.p_cond - ip.p_prior > 0.0);
      ++checked;
    }
  }
  MESSAGE("transitive triples checked: " << checked);
}

TEST_CASE("known universals: load, match and table annotation") {
  test_support::TempDir dir;
  const auto path = dir.write("k.csv", "implicants,implicand,label\nb;a,c,Rule X\nd,!e,Rule Y\n");
  const auto known = load_known_universals(path);
  REQUIRE(known.size() == 2);
  CHECK(known[0].implicants == std::vector<std::string>{"a", "b"});
  Implication imp;
  imp.implicants = {"b", "a"};
  imp.implicand = "c";
  REQUIRE(match_known(imp, known) != nullptr);
  CHECK(match_known(imp, known)->label == "Rule X");
  imp.implicand = "!c";
  CHECK(match_known(imp, known) == nullptr);

  std::vector<Implication> imps(3);
  for (std::size_t k = 0; k < 3; ++k) {
    imps[k].implicants = {"x" + std::to_string(k)};
    imps[k].implicand = "y";
  }
  imps[2].implicants = {"d"};
  imps[2].implicand = "!e";
  const auto table = format_implication_table(imps, known, 1);
  CHECK(table.rfind("3 implications, 2 shown", 0) == 0);
  CHECK(table.find("(Rule Y)") != std::string::npos);
  CHECK(table.find("x1") == std::string::npos);
}

TEST_CASE("implications JSON is valid and carries the meta keys") {
  Discovery d;
  d.n_tests = 4;
  d.n_implicant_sets = 2;
  Implication imp;
  imp.implicants = {"a", "!b"};
  imp.implicand = "c";
  imp.p_cond = 0.9;
  d.implications = {imp, imp};
  std::ostringstream out;
  write_implications_json(d, out, {{"config_hash", "abc"}});
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["config_hash"] == "abc");
  CHECK(j["n_tests"] == 4);
  CHECK(j["implications"].size() == 2);
  CHECK(j["implications"][0]["implicants"][1] == "!b");
  std::ostringstream empty;
  write_implications_json(Discovery{}, empty);
  CHECK(nlohmann::json::parse(empty.str())["implications"].empty());

  std::ostringstream csv_out;
  write_implications_csv(d.implications, csv_out);
  CHECK(csv_out.str().find("a;!b,c,0.90000000000000002") != std::string::npos);
}

TEST_CASE("literal_for_value resolves one-hot, two-sided and one-sided variables") {
  std::vector<Variable> vars{{"83A", "83A", "VO", "w", "OV"},
                             {"81A=SOV", "81A", "SOV", "w"},
                             {"81A=SVO", "81A", "SVO", "w"},
                             {"P", "P", "1", "w"}};
  const FeatureMatrix m({"L0"}, vars, {1, 0, 1, 1});
  CHECK(literal_for_value(m, "83A", "VO") == "83A");
  CHECK(literal_for_value(m, "83A", "OV") == "!83A");
  CHECK(literal_for_value(m, "81A", "SVO") == "81A=SVO");
  CHECK(literal_for_value(m, "P", "1") == "P");
  CHECK(!literal_for_value(m, "P", "0"));
  CHECK(!literal_for_value(m, "81A", "VSO"));
}

TEST_CASE("hypergeometric p-value matches a log-gamma enumeration") {
  auto log_choose = [](double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); };
  auto oracle = [&](double na, double ka, double nb, double kb) {
    const double lo = std::max(0.0, na + kb - nb), hi = std::min(na, kb);
    auto pmf = [&](double x) {
      return std::exp(log_choose(kb, x) + log_choose(nb - kb, na - x) - log_choose(nb, na));
    };
    const double obs = pmf(ka);
    double p = 0.0;
    for (double x = lo; x <= hi; ++x) {
      if (pmf(x) <= obs * (1 + 1e-7)) p += pmf(x);
    }
    return std::min(1.0, p);
  };
  const std::array<std::array<std::size_t, 4>, 6> cases{{
      {10, 5, 100, 20}, {36, 1, 1000, 243}, {12, 12, 40, 30}, {50, 25, 100, 50}, {20, 0, 300, 150}, {30, 3, 60, 6}}};
  for (const auto& c : cases) {
    CHECK(hypergeometric_p(c[0], c[1], c[2], c[3]) == doctest::Approx(oracle(c[0], c[1], c[2], c[3])).epsilon(1e-9));
  }
  CHECK(hypergeometric_p(10, 5, 20, 10) == doctest::Approx(1.0));
  CHECK_THROWS_AS(hypergeometric_p(10, 11, 20, 12), ValidationError);
}

TEST_CASE("p_raw is never below the Welch p-value") {
  Rng rng(23);
  std::vector<std::string> rows;
  for (int l = 0; l < 300; ++l) {
    const int j = rng.bernoulli(0.3);
    rows.push_back(std::string{static_cast<char>('0' + j), static_cast<char>('0' + rng.bernoulli(j ? 0.7 : 0.4))});
  }
  const auto m = test_support::matrix({"j", "i"}, rows);
  const auto imp = test_implication(fit(m), m, {"j"}, "i");
  const auto w = welch_binary(imp.n_a, static_cast<std::size_t>(std::lround(empirical_conditional(m, {"j"}, "i") * imp.n_a)),
                              imp.n_b, m.count_ones(1));
  CHECK(imp.p_raw >= w.p_value);
  CHECK(imp.p_raw == doctest::Approx(std::max(w.p_value, hypergeometric_p(imp.n_a, std::lround(empirical_conditional(m, {"j"}, "i") * imp.n_a), imp.n_b, m.count_ones(1)))));
}
