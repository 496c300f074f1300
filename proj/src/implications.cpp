#include "universals/implications.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "universals/corpus.hpp"
#include "universals/csv.hpp"
#include "universals/error.hpp"
#include "universals/inference.hpp"
#include "universals/parallel.hpp"

namespace universals {
namespace {

using kernels::Word;

struct GroupCounts {
  std::size_t n_a = 0, k_a = 0, n_b = 0, k_b = 0;
};

// Group A: languages in implicant_mask; group B: all languages. Both keep
// only languages with t observed; k counts languages with t == value.
GroupCounts group_counts(const FeatureMatrix& m, std::span<const Word> implicant_mask, std::size_t t,
                         int value) {
  GroupCounts g;
  g.n_a = kernels::and_popcount(implicant_mask, m.observed(t));
  g.k_a = kernels::and_popcount(implicant_mask, m.level(t, value));
  g.n_b = m.count_observed(t);
  g.k_b = kernels::popcount(m.level(t, value));
  return g;
}

bool testable(const GroupCounts& g) { return g.n_a >= kMinGroupSize && g.n_b >= kMinGroupSize; }

double group_p_value(const GroupCounts& g) {
  if (!testable(g)) return 1.0;
  return std::max(welch_binary(g.n_a, g.k_a, g.n_b, g.k_b).p_value, hypergeometric_p(g.n_a, g.k_a, g.n_b, g.k_b));
}

struct Resolved {
  std::size_t column;
  int value;
};

std::vector<Word> implicant_mask(const FeatureMatrix& m, std::span<const Resolved> lits) {
  std::vector<Word> mask(m.all().begin(), m.all().end());
  for (const auto& l : lits) kernels::and_into(mask, mask, m.level(l.column, l.value));
  return mask;
}

std::vector<Resolved> resolve(const FeatureMatrix& m, const std::vector<std::string>& texts) {
  std::vector<Resolved> out;
  for (const auto& t : texts) {
    const auto l = parse_literal(t);
    out.push_back({m.variable_index(l.variable), l.value});
  }
  return out;
}

bool ranked_before(const Implication& a, const Implication& b) {
  if (a.effect != b.effect) return a.effect > b.effect;
  if (a.implicants != b.implicants) return a.implicants < b.implicants;
  return a.implicand < b.implicand;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

WelchResult welch_binary(std::size_t n_a, std::size_t k_a, std::size_t n_b, std::size_t k_b) {
  if (n_a < 2 || n_b < 2) throw ValidationError("Welch test needs at least two samples per group");
  const double na = static_cast<double>(n_a), nb = static_cast<double>(n_b);
  const double ma = static_cast<double>(k_a) / na, mb = static_cast<double>(k_b) / nb;
  const double va = static_cast<double>(k_a) * (na - static_cast<double>(k_a)) / (na * (na - 1.0));
  const double vb = static_cast<double>(k_b) * (nb - static_cast<double>(k_b)) / (nb * (nb - 1.0));
  const double sa = va / na, sb = vb / nb;
  const double se2 = sa + sb;
  WelchResult r;
  if (se2 <= 0.0) {
    // Both groups constant.
    r.t = ma == mb ? 0.0 : std::copysign(INFINITY, ma - mb);
    r.df = na + nb - 2.0;
    r.p_value = ma == mb ? 1.0 : 0.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  const boost::math::students_t dist(r.df);
  r.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))), 0.0, 1.0);
  return r;
}

double hypergeometric_p(std::size_t n_a, std::size_t k_a, std::size_t n_b, std::size_t k_b) {
  if (n_a > n_b || k_b > n_b || k_a > n_a || k_a > k_b || n_a - k_a > n_b - k_b) {
    throw ValidationError("hypergeometric counts are inconsistent");
  }
  const std::size_t lo = n_a + k_b > n_b ? n_a + k_b - n_b : 0;
  const std::size_t hi = std::min(n_a, k_b);
  // Weights relative to the mode, built outward with the pmf ratio
  // P(x + 1) / P(x) = (K - x)(n - x) / ((x + 1)(N - K - n + x + 1)).
  const double N = static_cast<double>(n_b), K = static_cast<double>(k_b), n = static_cast<double>(n_a);
  auto ratio = [&](double x) { return (K - x) * (n - x) / ((x + 1.0) * (N - K - n + x + 1.0)); };
  const auto mode = std::clamp(static_cast<std::size_t>((n + 1.0) * (K + 1.0) / (N + 2.0)), lo, hi);
  std::vector<double> w(hi - lo + 1, 0.0);
  w[mode - lo] = 1.0;
  for (std::size_t x = mode; x < hi; ++x) {
    w[x + 1 - lo] = w[x - lo] * ratio(static_cast<double>(x));
    if (w[x + 1 - lo] == 0.0) break;
  }
  for (std::size_t x = mode; x > lo; --x) {
    w[x - 1 - lo] = w[x - lo] / ratio(static_cast<double>(x - 1));
    if (w[x - 1 - lo] == 0.0) break;
  }
  const double observed = w[k_a - lo] * (1.0 + 1e-7);
  double total = 0.0, tail = 0.0;
  for (double v : w) {
    total += v;
    if (v <= observed) tail += v;
  }
  return std::clamp(tail / total, 0.0, 1.0);
}

Literal parse_literal(std::string_view text) {
  Literal l;
  if (!text.empty() && text.front() == '!') {
    l.value = 0;
    text.remove_prefix(1);
  }
  if (text.empty()) throw ValidationError("empty literal");
  l.variable = std::string(text);
  return l;
}

std::string literal_text(const Literal& l) { return (l.value ? "" : "!") + l.variable; }

std::optional<std::string> literal_for_value(const FeatureMatrix& m, std::string_view feature,
                                             std::string_view value) {
  for (const auto& v : m.variables()) {
    if (v.source_feature != feature) continue;
    if (v.value_label == value) return literal_text({v.id, 1});
    if (v.two_sided() && v.zero_label == value) return literal_text({v.id, 0});
  }
  return std::nullopt;
}

Implication test_implication(const Network& n, const FeatureMatrix& m,
                             const std::vector<std::string>& implicants, const std::string& implicand) {
  if (implicants.empty()) throw ValidationError("an implication needs at least one implicant");
  const auto target = parse_literal(implicand);
  Evidence given;
  for (const auto& text : implicants) {
    const auto l = parse_literal(text);
    if (l.variable == target.variable) {
      throw ValidationError("implicand '" + target.variable + "' is also an implicant");
    }
    given.set(l.variable, l.value);
  }
  const auto lits = resolve(m, implicants);
  const std::size_t t = m.variable_index(target.variable);

  auto prob = [&](const Evidence& e) {
    const double p1 = bp_marginal(n, e, target.variable).p1;
    return target.value ? p1 : 1.0 - p1;
  };
  Implication imp;
  imp.implicants = implicants;
  std::sort(imp.implicants.begin(), imp.implicants.end());
  imp.implicand = implicand;
  imp.p_cond = prob(given);
  imp.p_prior = prob({});
  imp.effect = std::abs(imp.p_cond - imp.p_prior);
  const auto g = group_counts(m, implicant_mask(m, lits), t, target.value);
  imp.n_a = g.n_a;
  imp.n_b = g.n_b;
  imp.p_raw = group_p_value(g);
  imp.p_corrected = imp.p_raw;
  imp.n_tests = 1;
  return imp;
}

Discovery discover(const Network& n, const FeatureMatrix& m, const DiscoveryOptions& options) {
  const std::size_t nv = n.size();
  const ForestEngine engine(n);
  std::vector<std::size_t> col(nv);
  std::vector<std::string> source(nv);
  std::vector<char> two_sided(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    col[i] = m.variable_index(n.name(i));
    source[i] = m.variable(col[i]).source_feature;
    two_sided[i] = m.variable(col[i]).two_sided();
  }

  // Literal pool in network order, value 1 before value 0.
  struct Lit {
    std::size_t var;
    int value;
  };
  std::vector<Lit> pool;
  for (std::size_t i = 0; i < nv; ++i) {
    pool.push_back({i, 1});
    if (two_sided[i]) pool.push_back({i, 0});
  }

  // Implicant sets, level by level; each survivor keeps its language mask so
  // the next level only ANDs one more column.
  struct Candidate {
    std::vector<std::size_t> members;  // pool positions, ascending
    std::vector<Word> mask;
  };
  std::vector<std::vector<std::size_t>> sets;
  std::vector<Candidate> frontier;
  for (std::size_t p = 0; p < pool.size(); ++p) {
    const auto level = m.level(col[pool[p].var], pool[p].value);
    Candidate c{{p}, std::vector<Word>(level.begin(), level.end())};
    if (kernels::popcount(c.mask) < options.min_support) continue;
    sets.push_back(c.members);
    frontier.push_back(std::move(c));
  }
  for (std::size_t size = 2; size <= options.max_implicants && !frontier.empty(); ++size) {
    std::vector<std::vector<Candidate>> grown(frontier.size());
    const bool keep_masks = size < options.max_implicants;
    parallel_for(
        frontier.size(),
        [&](std::size_t f) {
          const auto& base = frontier[f];
          std::vector<Word> mask(m.words());
          for (std::size_t p = base.members.back() + 1; p < pool.size(); ++p) {
            bool clash = false;
            for (auto u : base.members) clash = clash || source[pool[u].var] == source[pool[p].var];
            if (clash) continue;
            kernels::and_into(mask, base.mask, m.level(col[pool[p].var], pool[p].value));
            if (kernels::popcount(mask) < options.min_support) continue;
            Candidate c{base.members, keep_masks ? mask : std::vector<Word>{}};
            c.members.push_back(p);
            grown[f].push_back(std::move(c));
          }
        },
        options.threads);
    std::vector<Candidate> next;
    for (auto& g : grown) {
      for (auto& c : g) {
        sets.push_back(c.members);
        if (keep_masks) next.push_back(std::move(c));
      }
    }
    frontier = std::move(next);
  }

  auto eligible = [&](const std::vector<std::size_t>& s, std::size_t t) {
    for (auto u : s) {
      if (source[pool[u].var] == source[t]) return false;
    }
    return true;
  };

  Discovery out;
  out.n_implicant_sets = sets.size();
  for (const auto& s : sets) {
    for (std::size_t t = 0; t < nv; ++t) out.n_tests += eligible(s, t) ? 1 : 0;
  }
  if (out.n_tests == 0) return out;
  const double n_tests = static_cast<double>(out.n_tests);

  const auto prior = engine.run(std::vector<std::int8_t>(nv, kMissing));

  std::vector<std::vector<Implication>> found(sets.size());
  parallel_for(
      sets.size(),
      [&](std::size_t k) {
        const auto& s = sets[k];
        std::vector<std::int8_t> ev(nv, kMissing);
        std::vector<Resolved> lits;
        for (auto u : s) {
          ev[pool[u].var] = static_cast<std::int8_t>(pool[u].value);
          lits.push_back({col[pool[u].var], pool[u].value});
        }
        const auto post = engine.run(ev);
        const auto mask = implicant_mask(m, lits);
        for (std::size_t t = 0; t < nv; ++t) {
          if (!eligible(s, t)) continue;
          const auto g = group_counts(m, mask, col[t], 1);
          if (!testable(g)) continue;
          // The Welch p-value is a lower bound on p_raw, so it screens first.
          const double p_welch = welch_binary(g.n_a, g.k_a, g.n_b, g.k_b).p_value;
          if (!(std::min(1.0, p_welch * n_tests) < options.level)) continue;
          const double p_raw = std::max(p_welch, hypergeometric_p(g.n_a, g.k_a, g.n_b, g.k_b));
          const double p_corr = std::min(1.0, p_raw * n_tests);
          if (!(p_corr < options.level)) continue;
          const bool flip = two_sided[t] && post.p1[t] < prior.p1[t];
          Implication imp;
          for (auto u : s) imp.implicants.push_back(literal_text({n.name(pool[u].var), pool[u].value}));
          std::sort(imp.implicants.begin(), imp.implicants.end());
          imp.implicand = literal_text({n.name(t), flip ? 0 : 1});
          imp.p_cond = flip ? 1.0 - post.p1[t] : post.p1[t];
          imp.p_prior = flip ? 1.0 - prior.p1[t] : prior.p1[t];
          imp.effect = std::abs(imp.p_cond - imp.p_prior);
          imp.p_raw = p_raw;
          imp.p_corrected = p_corr;
          imp.n_tests = out.n_tests;
          imp.n_a = g.n_a;
          imp.n_b = g.n_b;
          found[k].push_back(std::move(imp));
        }
      },
      options.threads);

  for (auto& f : found) {
    for (auto& imp : f) out.implications.push_back(std::move(imp));
  }
  std::sort(out.implications.begin(), out.implications.end(), ranked_before);
  return out;
}

double empirical_conditional(const FeatureMatrix& m, const std::vector<std::string>& implicants,
                             const std::string& implicand) {
  const auto target = parse_literal(implicand);
  const std::size_t t = m.variable_index(target.variable);
  const auto mask = implicant_mask(m, resolve(m, implicants));
  const std::size_t n = kernels::and_popcount(mask, m.observed(t));
  if (n == 0) {
    throw UndefinedError("no language satisfies every implicant with '" + target.variable + "' observed");
  }
  return static_cast<double>(kernels::and_popcount(mask, m.level(t, target.value))) / static_cast<double>(n);
}

std::vector<KnownUniversal> load_known_universals(const std::string& path) {
  const auto rows = csv::read_file(path);
  std::vector<KnownUniversal> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 3) throw ParseError(path, r + 1, 1, "expected implicants,implicand,label");
    if (r == 0 && row[0] == "implicants") continue;
    KnownUniversal k;
    std::stringstream ss(row[0]);
    for (std::string part; std::getline(ss, part, ';');) {
      if (!part.empty()) k.implicants.push_back(part);
    }
    std::sort(k.implicants.begin(), k.implicants.end());
    k.implicand = row[1];
    k.label = row[2];
    out.push_back(std::move(k));
  }
  return out;
}

const KnownUniversal* match_known(const Implication& imp, const std::vector<KnownUniversal>& known) {
  auto sorted = imp.implicants;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& k : known) {
    if (k.implicand == imp.implicand && k.implicants == sorted) return &k;
  }
  return nullptr;
}

void write_implications_csv(const std::vector<Implication>& imps, std::ostream& out) {
  csv::write_row(out, {"implicants", "implicand", "p_cond", "p_prior", "effect", "p_raw", "p_corrected",
                       "n_tests", "n_a", "n_b"});
  std::ostringstream num;
  num << std::setprecision(17);
  auto fmt = [&](double x) {
    num.str("");
    num << x;
    return num.str();
  };
  for (const auto& i : imps) {
    csv::write_row(out, {join(i.implicants, ";"), i.implicand, fmt(i.p_cond), fmt(i.p_prior), fmt(i.effect),
                         fmt(i.p_raw), fmt(i.p_corrected), std::to_string(i.n_tests), std::to_string(i.n_a),
                         std::to_string(i.n_b)});
  }
}

void write_implications_json(const Discovery& d, std::ostream& out, const nlohmann::json& meta) {
  out << "{\n";
  if (meta.is_object()) {
    for (const auto& [key, value] : meta.items()) out << "  " << nlohmann::json(key).dump() << ": " << value.dump() << ",\n";
  }
  out << "  \"n_implicant_sets\": " << d.n_implicant_sets << ",\n  \"n_tests\": " << d.n_tests
      << ",\n  \"implications\": [";
  for (std::size_t k = 0; k < d.implications.size(); ++k) {
    const auto& i = d.implications[k];
    const nlohmann::json rec{{"implicants", i.implicants},
                             {"implicand", i.implicand},
                             {"p_cond", i.p_cond},
                             {"p_prior", i.p_prior},
                             {"effect", i.effect},
                             {"p_raw", i.p_raw},
                             {"p_corrected", i.p_corrected},
                             {"n_tests", i.n_tests},
                             {"n_a", i.n_a},
                             {"n_b", i.n_b}};
    out << (k ? ",\n    " : "\n    ") << rec.dump();
  }
  out << (d.implications.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

std::string format_implication_table(const std::vector<Implication>& imps,
                                     const std::vector<KnownUniversal>& known, std::size_t max_rows) {
  std::vector<std::size_t> shown;
  for (std::size_t k = 0; k < imps.size(); ++k) {
    if (k < max_rows || match_known(imps[k], known)) shown.push_back(k);
  }
  std::ostringstream out;
  std::size_t width = 9;
  for (auto k : shown) width = std::max(width, join(imps[k].implicants, ", ").size());
  out << imps.size() << " implications, " << shown.size() << " shown\n";
  out << std::left << std::setw(6) << "#" << std::setw(static_cast<int>(width)) << "Implicant"
      << "  >  " << "Implicand\n";
  for (auto k : shown) {
    const auto& i = imps[k];
    out << std::left << std::setw(6) << (k + 1) << std::setw(static_cast<int>(width))
        << join(i.implicants, ", ") << "  >  " << i.implicand;
    if (const auto* m = match_known(i, known)) out << "  (" << m->label << ")";
    out << std::fixed << std::setprecision(3) << "   p=" << i.p_cond << " prior=" << i.p_prior
        << " effect=" << i.effect << std::scientific << std::setprecision(2) << " p_corr=" << i.p_corrected
        << std::defaultfloat << '\n';
  }
  return out.str();
}

}  // namespace universals
