#pragma once

// Probabilistic implications: model effect |p(i | implicants) - p(i)| with an
// empirical Welch t-test for significance and Bonferroni correction over the
// whole enumeration.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "universals/graph.hpp"

namespace universals {

class FeatureMatrix;

// A variable held at one value. Written "id" for 1 and "!id" for 0.
struct Literal {
  std::string variable;
  int value = 1;
};
// Throws ValidationError on an empty id.
Literal parse_literal(std::string_view text);
std::string literal_text(const Literal& l);
// Literal for "source feature holds value": the variable whose value_label
// is value ("id"), or a two-sided variable whose zero_label is ("!id").
std::optional<std::string> literal_for_value(const FeatureMatrix& m, std::string_view feature,
                                             std::string_view value);

// Implicants and implicand are literal texts. Discovery uses "!id" only for
// two-sided variables, where 0 is itself a named source value.
struct Implication {
  std::vector<std::string> implicants;  // sorted
  std::string implicand;
  double p_cond = 0.0;
  double p_prior = 0.0;
  double effect = 0.0;
  double p_raw = 1.0;
  double p_corrected = 1.0;
  std::size_t n_tests = 1;
  // Group sizes behind p_raw: A = all implicants observed 1, B = all
  // languages; both restricted to languages with the implicand observed.
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Two-sided Welch t-test between two samples of 0/1 indicators given as
// (size, number of ones). Requires both sizes >= 2.
WelchResult welch_binary(std::size_t n_a, std::size_t k_a, std::size_t n_b, std::size_t k_b);

// Two-sided exact test of group A, a subset of group B, against B's rate:
// given the margins, k_a is hypergeometric (n_b languages, k_b ones, n_a
// drawn). Sums the probabilities of every count no more likely than k_a.
double hypergeometric_p(std::size_t n_a, std::size_t k_a, std::size_t n_b, std::size_t k_b);

inline constexpr std::size_t kMinGroupSize = 10;

// Uncorrected (n_tests = 1, p_corrected = p_raw). Group A holds the languages
// satisfying every implicant literal, group B all languages; both are
// restricted to languages with the implicand observed and sampled as the
// indicator of the implicand literal. p_raw is the larger of the Welch and
// hypergeometric p-values, and 1 when either group has fewer than
// kMinGroupSize languages. Throws ValidationError on unknown ids
// or when the implicand variable is also an implicant.
Implication test_implication(const Network& n, const FeatureMatrix& m,
                             const std::vector<std::string>& implicants, const std::string& implicand);

struct DiscoveryOptions {
  std::size_t max_implicants = 3;
  double level = 0.05;
  std::size_t min_support = 10;  // languages with every implicant observed 1
  unsigned threads = 0;
};

struct Discovery {
  std::vector<Implication> implications;  // p_corrected < level, effect descending
  std::size_t n_tests = 0;
  std::size_t n_implicant_sets = 0;
};

// Enumerates implicant literal sets of size 1..max_implicants (sets whose
// support falls below min_support are pruned together with their supersets;
// at most one literal per source feature) against every implicand variable
// outside the set's source features. A two-sided implicand is reported with
// the polarity whose probability the implicants raise.
Discovery discover(const Network& n, const FeatureMatrix& m, const DiscoveryOptions& options = {});

// Among languages satisfying every implicant literal with the implicand
// observed, the fraction satisfying the implicand literal. Throws UndefinedError on an empty group.
double empirical_conditional(const FeatureMatrix& m, const std::vector<std::string>& implicants,
                             const std::string& implicand);

struct KnownUniversal {
  std::vector<std::string> implicants;
  std::string implicand;
  std::string label;
};

// CSV with columns implicants (';'-separated), implicand, label.
std::vector<KnownUniversal> load_known_universals(const std::string& path);
const KnownUniversal* match_known(const Implication& imp, const std::vector<KnownUniversal>& known);

void write_implications_csv(const std::vector<Implication>& imps, std::ostream& out);
// Streams {meta..., "n_implicant_sets", "n_tests", "implications": [...]}
// one record per line, so large result lists never sit in memory as JSON.
void write_implications_json(const Discovery& d, std::ostream& out, const nlohmann::json& meta = {});
// Plain-text table: "implicant, implicant > implicand  (label)". Shows the
// first max_rows implications plus any later one matching a known universal.
std::string format_implication_table(const std::vector<Implication>& imps,
                                     const std::vector<KnownUniversal>& known, std::size_t max_rows = 100);

}  // namespace universals
