#include "universals/inference.hpp"

#include <cmath>

#include "universals/corpus.hpp"
#include "universals/error.hpp"

namespace universals {

// ---------------------------------------------------------------------------
// Evidence

Evidence::Evidence(std::initializer_list<std::pair<const std::string, int>> init) {
  for (const auto& [k, v] : init) set(k, v);
}

void Evidence::set(const std::string& variable, int value) {
  if (value != 0 && value != 1) {
    throw ValidationError("evidence for '" + variable + "' must be 0 or 1");
  }
  if (!values_.emplace(variable, value).second) {
    throw ValidationError("duplicate evidence for '" + variable + "'");
  }
}

bool Evidence::contains(std::string_view variable) const { return values_.find(variable) != values_.end(); }

std::vector<std::int8_t> Evidence::dense(const Network& n) const {
  std::vector<std::int8_t> out(n.size(), kMissing);
  for (const auto& [k, v] : values_) out[n.index_of(k)] = static_cast<std::int8_t>(v);
  return out;
}

// ---------------------------------------------------------------------------
// ForestEngine
//
// Upward pass (children before parents): lambda_i(u) = e_i(u) * prod over
// children of up_c(u), up_i(v) = sum_u p(u | v) lambda_i(u). Downward pass:
// pi_root = prior, pi_c(u) = sum_v p(u | v) pi_i(v) lambda_i(v) / up_c(v).
// Posterior of i is proportional to pi_i * lambda_i. Every message is
// normalized and the scale factors are summed in log space, which yields
// log p(e). With all CPT entries > 0 every up message is strictly positive,
// so the division is safe.

ForestEngine::ForestEngine(const Network& n) : net_(&n) {
  if (auto v = validate(n); !v.empty()) {
    throw ValidationError("invalid network (" + v.front().kind + " at '" + v.front().variable +
                          "'): " + v.front().message);
  }
  const std::size_t size = n.size();
  parent_.assign(size, -1);
  cpt_.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    const auto& rows = n.cpt(i).rows;
    if (auto p = n.parent(i)) {
      parent_[i] = static_cast<std::ptrdiff_t>(*p);
      cpt_[i] = {rows[0], rows[1]};
    } else {
      cpt_[i] = {rows[0], rows[0]};
      order_.push_back(i);
    }
  }
  for (std::size_t head = 0; head < order_.size(); ++head) {
    for (auto c : n.children(order_[head])) order_.push_back(c);
  }
}

void ForestEngine::run(std::span<const std::int8_t> evidence, Posterior& out, Workspace& ws,
                       bool with_families) const {
  const std::size_t size = order_.size();
  if (evidence.size() != size) throw ValidationError("evidence does not match network size");
  ws.lambda.resize(size);
  ws.up.resize(size);
  ws.pi.resize(size);
  out.p1.resize(size);
  if (with_families) out.family.resize(size);

  double log_z = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const auto e = evidence[i];
    ws.lambda[i] = {e == 1 ? 0.0 : 1.0, e == 0 ? 0.0 : 1.0};
  }

  for (std::size_t k = size; k-- > 0;) {
    const std::size_t i = order_[k];
    const auto& lam = ws.lambda[i];
    if (parent_[i] < 0) {
      const auto& prior = cpt_[i][0];
      log_z += std::log(prior[0] * lam[0] + prior[1] * lam[1]);
      continue;
    }
    const auto& t = cpt_[i];
    std::array<double, 2> m{t[0][0] * lam[0] + t[0][1] * lam[1], t[1][0] * lam[0] + t[1][1] * lam[1]};
    double s = m[0] + m[1];
    m[0] /= s;
    m[1] /= s;
    log_z += std::log(s);
    ws.up[i] = m;
    auto& plam = ws.lambda[static_cast<std::size_t>(parent_[i])];
    plam[0] *= m[0];
    plam[1] *= m[1];
    s = plam[0] + plam[1];
    plam[0] /= s;
    plam[1] /= s;
    log_z += std::log(s);
  }
  out.log_evidence = log_z;

  for (std::size_t k = 0; k < size; ++k) {
    const std::size_t i = order_[k];
    const auto& lam = ws.lambda[i];
    auto& pi = ws.pi[i];
    if (parent_[i] < 0) {
      pi = cpt_[i][0];
    } else {
      const auto p = static_cast<std::size_t>(parent_[i]);
      const auto& up = ws.up[i];
      const auto& ppi = ws.pi[p];
      const auto& plam = ws.lambda[p];
      // Parent belief with this child's own message divided out.
      const double c0 = ppi[0] * plam[0] / up[0];
      const double c1 = ppi[1] * plam[1] / up[1];
      const auto& t = cpt_[i];
      pi = {t[0][0] * c0 + t[1][0] * c1, t[0][1] * c0 + t[1][1] * c1};
      const double s = pi[0] + pi[1];
      pi[0] /= s;
      pi[1] /= s;
      if (with_families) {
        std::array<double, 4> f{c0 * t[0][0] * lam[0], c0 * t[0][1] * lam[1], c1 * t[1][0] * lam[0],
                                c1 * t[1][1] * lam[1]};
        const double z = f[0] + f[1] + f[2] + f[3];
        for (auto& x : f) x /= z;
        out.family[i] = f;
      }
    }
    const double b0 = pi[0] * lam[0];
    const double b1 = pi[1] * lam[1];
    out.p1[i] = b1 / (b0 + b1);
  }
}

Posterior ForestEngine::run(std::span<const std::int8_t> evidence, bool with_families) const {
  Posterior out;
  Workspace ws;
  run(evidence, out, ws, with_families);
  return out;
}

// ---------------------------------------------------------------------------
// Queries

Marginal bp_marginal(const Network& n, const Evidence& e, std::string_view target) {
  const std::size_t t = n.index_of(target);
  const ForestEngine engine(n);
  const auto dense = e.dense(n);
  const auto post = engine.run(dense);
  if (dense[t] != kMissing) {
    return {std::string(target), dense[t] == 0 ? 1.0 : 0.0, dense[t] == 1 ? 1.0 : 0.0};
  }
  return {std::string(target), 1.0 - post.p1[t], post.p1[t]};
}

Marginal enumerate_marginal(const Network& n, const Evidence& e, std::string_view target) {
  if (n.size() > kMaxEnumerationVariables) {
    throw ValidationError("enumeration is limited to " + std::to_string(kMaxEnumerationVariables) +
                          " variables, network has " + std::to_string(n.size()));
  }
  if (auto v = validate(n); !v.empty()) throw ValidationError("invalid network: " + v.front().message);
  const std::size_t t = n.index_of(target);
  const auto dense = e.dense(n);
  const std::size_t size = n.size();
  std::vector<std::uint8_t> x(size, 0);
  std::array<double, 2> mass{0.0, 0.0};
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << size); ++bits) {
    bool consistent = true;
    for (std::size_t i = 0; i < size; ++i) {
      x[i] = static_cast<std::uint8_t>((bits >> i) & 1U);
      if (dense[i] != kMissing && dense[i] != x[i]) {
        consistent = false;
        break;
      }
    }
    if (!consistent) continue;
    mass[x[t]] += joint_probability(n, std::span<const std::uint8_t>(x));
  }
  const double z = mass[0] + mass[1];
  return {std::string(target), mass[0] / z, mass[1] / z};
}

ImplicationProbabilities implication_conditional(const Network& n, std::string_view i,
                                                 std::string_view j) {
  if (i == j) throw ValidationError("implicand and implicant must differ");
  Evidence given;
  given.set(std::string(j), 1);
  return {bp_marginal(n, given, i).p1, bp_marginal(n, {}, i).p1};
}

int decode(const Network& n, const Evidence& e, std::string_view target) {
  if (e.contains(target)) {
    throw ValidationError("decode target '" + std::string(target) + "' is part of the evidence");
  }
  return decode_marginal(bp_marginal(n, e, target).p1);
}

}  // namespace universals
