#include "universals/graph.hpp"

#include <algorithm>
#include <cmath>

#include "universals/error.hpp"
#include "universals/random.hpp"

namespace universals {
namespace {

constexpr double kRowTolerance = 1e-12;

// Parents before children; empty when the parent map has a cycle.
std::optional<std::vector<std::size_t>> topological_order(const ForestStructure& s) {
  const std::size_t n = s.size();
  std::vector<std::vector<std::size_t>> children(n);
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (s.parent[i]) {
      if (*s.parent[i] >= n) return std::nullopt;
      children[*s.parent[i]].push_back(i);
    } else {
      order.push_back(i);
    }
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (auto c : children[order[head]]) order.push_back(c);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

}  // namespace

std::optional<std::size_t> ForestStructure::find(std::string_view id) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i] == id) return i;
  }
  return std::nullopt;
}

std::vector<std::pair<std::size_t, std::size_t>> ForestStructure::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (parent[i]) out.emplace_back(std::min(i, *parent[i]), std::max(i, *parent[i]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

SmoothingPrior::SmoothingPrior(double a) : alpha(a) {
  if (!(a > 0.0)) throw ValidationError("smoothing alpha must be > 0");
}

Network::Network(ForestStructure structure, std::vector<Cpt> cpts, double alpha)
    : structure_(std::move(structure)), cpts_(std::move(cpts)), alpha_(alpha) {
  if (structure_.parent.size() != structure_.variables.size()) {
    throw ValidationError("parent map and variable list differ in length");
  }
  if (cpts_.size() != structure_.size()) throw ValidationError("need one CPT per variable");
  children_.resize(structure_.size());
  for (std::size_t i = 0; i < structure_.size(); ++i) {
    if (const auto p = structure_.parent[i]; p && *p < structure_.size()) children_[*p].push_back(i);
    if (!index_.emplace(structure_.variables[i], i).second) {
      throw ValidationError("duplicate variable id '" + structure_.variables[i] + "'");
    }
  }
}

std::optional<std::size_t> Network::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Network::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw ValidationError("unknown variable '" + std::string(id) + "'");
}

std::vector<Violation> validate(const ForestStructure& s) {
  std::vector<Violation> out;
  const std::size_t n = s.size();
  if (s.parent.size() != n) {
    out.push_back({"dimension", "", "parent map and variable list differ in length"});
    return out;
  }
  bool bad_parent = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!s.parent[i]) continue;
    if (*s.parent[i] >= n) {
      out.push_back({"parent", s.variables[i], "parent index out of range"});
      bad_parent = true;
    } else if (*s.parent[i] == i) {
      out.push_back({"cycle", s.variables[i], "variable is its own parent"});
      bad_parent = true;
    }
  }
  if (!bad_parent && !topological_order(s)) {
    // Report each node that sits on a cycle.
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t cur = i;
      for (std::size_t steps = 0; steps <= n && s.parent[cur]; ++steps) {
        cur = *s.parent[cur];
        if (cur == i) {
          out.push_back({"cycle", s.variables[i], "parent chain returns to this variable"});
          break;
        }
      }
    }
  }
  return out;
}

std::vector<Violation> validate(const Network& n) {
  auto out = validate(n.structure());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const auto& rows = n.cpt(i).rows;
    const std::size_t expected = n.parent(i) ? 2 : 1;
    if (rows.size() != expected) {
      out.push_back({"dimension", n.name(i),
                     "CPT has " + std::to_string(rows.size()) + " rows, expected " +
                         std::to_string(expected)});
      continue;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (!(row[0] >= 0.0 && row[0] <= 1.0 && row[1] >= 0.0 && row[1] <= 1.0)) {
        out.push_back({"range", n.name(i), "CPT row " + std::to_string(r) + " outside [0, 1]"});
      }
      if (!(std::abs(row[0] + row[1] - 1.0) <= kRowTolerance)) {
        out.push_back({"unnormalized", n.name(i),
                       "CPT row " + std::to_string(r) + " sums to " + std::to_string(row[0] + row[1])});
      }
    }
  }
  return out;
}

double joint_probability(const Network& n, std::span<const std::uint8_t> assignment) {
  if (assignment.size() != n.size()) throw ValidationError("assignment does not cover the network");
  double p = 1.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::size_t row = n.parent(i) ? assignment[*n.parent(i)] : 0;
    p *= n.cpt(i).rows[row][assignment[i]];
  }
  return p;
}

double joint_probability(const Network& n, const std::map<std::string, int>& assignment) {
  std::vector<std::uint8_t> dense(n.size(), 0);
  std::string missing;
  for (std::size_t i = 0; i < n.size(); ++i) {
    auto it = assignment.find(n.name(i));
    if (it == assignment.end()) {
      missing += (missing.empty() ? "" : ", ") + n.name(i);
      continue;
    }
    if (it->second != 0 && it->second != 1) {
      throw ValidationError("variable '" + n.name(i) + "' assigned a non-binary value");
    }
    dense[i] = static_cast<std::uint8_t>(it->second);
  }
  if (!missing.empty()) throw ValidationError("assignment is missing variables: " + missing);
  return joint_probability(n, std::span<const std::uint8_t>(dense));
}

nlohmann::json network_json(const Network& n) {
  nlohmann::json vars = nlohmann::json::array();
  for (std::size_t i = 0; i < n.size(); ++i) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : n.cpt(i).rows) rows.push_back({r[0], r[1]});
    vars.push_back({{"id", n.name(i)},
                    {"parent", n.parent(i) ? nlohmann::json(n.name(*n.parent(i))) : nlohmann::json()},
                    {"cpt", std::move(rows)}});
  }
  return {{"alpha", n.alpha()}, {"variables", std::move(vars)}};
}

Network network_from_json(const nlohmann::json& j) {
  try {
    ForestStructure s;
    std::vector<Cpt> cpts;
    const auto& vars = j.at("variables");
    for (const auto& v : vars) s.variables.push_back(v.at("id").get<std::string>());
    for (const auto& v : vars) {
      const auto& p = v.at("parent");
      if (p.is_null()) {
        s.parent.emplace_back();
      } else {
        auto idx = s.find(p.get<std::string>());
        if (!idx) throw ValidationError("unknown parent '" + p.get<std::string>() + "'");
        s.parent.emplace_back(*idx);
      }
      Cpt c;
      for (const auto& r : v.at("cpt")) c.rows.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
      cpts.push_back(std::move(c));
    }
    return Network(std::move(s), std::move(cpts), j.at("alpha").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed network JSON: ") + e.what());
  }
}

std::vector<std::uint8_t> sample_assignment(const Network& n, Rng& rng) {
  const auto order = topological_order(n.structure());
  if (!order) throw ValidationError("cannot sample from a network with a cycle");
  std::vector<std::uint8_t> x(n.size(), 0);
  for (auto i : *order) {
    const std::size_t row = n.parent(i) ? x[*n.parent(i)] : 0;
    x[i] = rng.bernoulli(n.cpt(i).rows[row][1]) ? 1 : 0;
  }
  return x;
}

}  // namespace universals
