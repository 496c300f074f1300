#pragma once

// Forest-structured Bayesian network over binary variables.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace universals {

class FeatureMatrix;
class Rng;

// Node set and parent map. parent[i] is empty for roots.
struct ForestStructure {
  std::vector<std::string> variables;
  std::vector<std::optional<std::size_t>> parent;

  std::size_t size() const noexcept { return variables.size(); }
  std::optional<std::size_t> find(std::string_view id) const;
  // Undirected edges (min index, max index), sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;
};

// rows[parent_value][value]; a root has a single row (its marginal).
struct Cpt {
  std::vector<std::array<double, 2>> rows;
};

struct SmoothingPrior {
  double alpha = 5.0;

  SmoothingPrior() = default;
  explicit SmoothingPrior(double a);
};

class Network {
 public:
  Network() = default;
  // No validation here; see validate().
  Network(ForestStructure structure, std::vector<Cpt> cpts, double alpha);

  std::size_t size() const noexcept { return structure_.size(); }
  const ForestStructure& structure() const noexcept { return structure_; }
  const std::vector<std::string>& variables() const noexcept { return structure_.variables; }
  const std::string& name(std::size_t i) const { return structure_.variables[i]; }
  std::optional<std::size_t> parent(std::size_t i) const { return structure_.parent[i]; }
  const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }
  const Cpt& cpt(std::size_t i) const { return cpts_[i]; }
  const std::vector<Cpt>& cpts() const noexcept { return cpts_; }
  double alpha() const noexcept { return alpha_; }

  std::optional<std::size_t> find(std::string_view id) const;
  // Throws ValidationError naming the unknown variable.
  std::size_t index_of(std::string_view id) const;

 private:
  ForestStructure structure_;
  std::vector<Cpt> cpts_;
  double alpha_ = 5.0;
  std::vector<std::vector<std::size_t>> children_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct Violation {
  std::string kind;  // cycle | unnormalized | dimension | range | parent
  std::string variable;
  std::string message;
};

// Checks the forest property, CPT shapes and row normalization. Never throws.
std::vector<Violation> validate(const Network& n);
// Same checks on a bare structure (forest property only).
std::vector<Violation> validate(const ForestStructure& s);

// Product of CPT entries for a complete 0/1 assignment in network order.
double joint_probability(const Network& n, std::span<const std::uint8_t> assignment);
// Assignment keyed by variable id; throws ValidationError listing missing ids.
double joint_probability(const Network& n, const std::map<std::string, int>& assignment);

nlohmann::json network_json(const Network& n);
Network network_from_json(const nlohmann::json& j);

// Ancestral sample of every variable, in network order.
std::vector<std::uint8_t> sample_assignment(const Network& n, Rng& rng);

}  // namespace universals
