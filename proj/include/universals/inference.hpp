#pragma once

// Exact inference on forest networks: two-pass sum-product belief
// propagation, a brute-force enumeration oracle, and argmax decoding.

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "universals/graph.hpp"

namespace universals {

// Partial assignment of variables (by id) to 0/1.
class Evidence {
 public:
  Evidence() = default;
  Evidence(std::initializer_list<std::pair<const std::string, int>> init);

  // Throws ValidationError on a non-binary value or a repeated variable.
  void set(const std::string& variable, int value);
  bool contains(std::string_view variable) const;
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  const std::map<std::string, int, std::less<>>& assignments() const noexcept { return values_; }

  // Dense form in network order (kMissing where unassigned). Throws on ids the
  // network does not have.
  std::vector<std::int8_t> dense(const Network& n) const;

 private:
  std::map<std::string, int, std::less<>> values_;
};

struct Marginal {
  std::string variable;
  double p0 = 0.0;
  double p1 = 0.0;
};

// Result of one calibration: every node's posterior p(x=1 | e), the family
// posterior p(x=u, parent=v | e) stored at [v * 2 + u] for non-roots, and
// log p(e).
struct Posterior {
  std::vector<double> p1;
  std::vector<std::array<double, 4>> family;
  double log_evidence = 0.0;
};

// Precomputed schedule for a fixed network. Thread-safe: run() keeps its
// scratch space in the caller-supplied Workspace.
class ForestEngine {
 public:
  struct Workspace {
    std::vector<std::array<double, 2>> lambda;
    std::vector<std::array<double, 2>> up;
    std::vector<std::array<double, 2>> pi;
  };

  // Throws ValidationError if the network is not a valid forest.
  explicit ForestEngine(const Network& n);

  const Network& network() const noexcept { return *net_; }

  // evidence is in network order with kMissing for unobserved variables.
  void run(std::span<const std::int8_t> evidence, Posterior& out, Workspace& ws,
           bool with_families = false) const;
  Posterior run(std::span<const std::int8_t> evidence, bool with_families = false) const;

 private:
  const Network* net_;
  std::vector<std::size_t> order_;  // parents before children
  std::vector<std::ptrdiff_t> parent_;
  // cpt_[i][v][u] = p(x_i = u | parent = v); roots use row 0 only.
  std::vector<std::array<std::array<double, 2>, 2>> cpt_;
};

// p(target | e) by belief propagation.
Marginal bp_marginal(const Network& n, const Evidence& e, std::string_view target);

// p(target | e) by summing the joint over every completion. Limited to
// networks with at most 20 variables.
inline constexpr std::size_t kMaxEnumerationVariables = 20;
Marginal enumerate_marginal(const Network& n, const Evidence& e, std::string_view target);

struct ImplicationProbabilities {
  double p_cond = 0.0;   // p(i = 1 | j = 1)
  double p_prior = 0.0;  // p(i = 1)
};
ImplicationProbabilities implication_conditional(const Network& n, std::string_view i,
                                                 std::string_view j);

// argmax over {0, 1} of p(target | e); an exact tie decodes to 1.
int decode(const Network& n, const Evidence& e, std::string_view target);
inline int decode_marginal(double p1) { return p1 >= 0.5 ? 1 : 0; }

}  // namespace universals
