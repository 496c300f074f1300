#include "universals/learning.hpp"

#include <cmath>

#include "universals/corpus.hpp"
#include "universals/error.hpp"
#include "universals/inference.hpp"
#include "universals/parallel.hpp"

namespace universals {
namespace {

constexpr std::size_t kBlockLanguages = 64;

SufficientStats zero_stats(const ForestStructure& s) {
  SufficientStats st;
  st.counts.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) st.counts[i].assign(s.parent[i] ? 2 : 1, {0.0, 0.0});
  return st;
}

void add_into(SufficientStats& dst, const SufficientStats& src) {
  for (std::size_t i = 0; i < dst.counts.size(); ++i) {
    for (std::size_t r = 0; r < dst.counts[i].size(); ++r) {
      dst.counts[i][r][0] += src.counts[i][r][0];
      dst.counts[i][r][1] += src.counts[i][r][1];
    }
  }
}

// Hard counts over languages where the family (node and parent) is observed.
SufficientStats family_counts(const ForestStructure& s, const FeatureMatrix& m,
                              const std::vector<std::size_t>& col) {
  auto st = zero_stats(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::size_t x = col[i];
    if (auto p = s.parent[i]) {
      const std::size_t y = col[*p];
      for (int v = 0; v < 2; ++v) {
        for (int u = 0; u < 2; ++u) {
          st.counts[i][v][u] = static_cast<double>(kernels::and_popcount(m.level(y, v), m.level(x, u)));
        }
      }
    } else {
      st.counts[i][0] = {static_cast<double>(kernels::popcount(m.zeros(x))),
                         static_cast<double>(kernels::popcount(m.ones(x)))};
    }
  }
  return st;
}

Network with_cpts(const ForestStructure& s, std::vector<Cpt> cpts, double alpha) {
  return Network(s, std::move(cpts), alpha);
}

}  // namespace

std::vector<std::size_t> column_map(const ForestStructure& s, const FeatureMatrix& m) {
  std::vector<std::size_t> col(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) col[i] = m.variable_index(s.variables[i]);
  return col;
}

std::vector<Cpt> m_step(const SufficientStats& stats, const SmoothingPrior& prior) {
  const double a = prior.alpha;
  std::vector<Cpt> cpts(stats.counts.size());
  for (std::size_t i = 0; i < stats.counts.size(); ++i) {
    for (const auto& c : stats.counts[i]) {
      const double total = c[0] + c[1];
      const double p1 = (c[1] + a) / (total + 2.0 * a);
      const double p0 = (c[0] + a) / (total + 2.0 * a);
      cpts[i].rows.push_back({p0, p1});
    }
  }
  return cpts;
}

Network map_fit_complete(const ForestStructure& s, const FeatureMatrix& m, const SmoothingPrior& prior) {
  if (auto v = validate(s); !v.empty()) throw ValidationError("invalid structure: " + v.front().message);
  const auto col = column_map(s, m);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (m.count_observed(col[i]) != m.num_languages()) {
      throw ValidationError("variable '" + s.variables[i] +
                            "' has missing cells; use em_fit for incomplete data");
    }
  }
  return with_cpts(s, m_step(family_counts(s, m, col), prior), prior.alpha);
}

EStep e_step(const Network& n, const FeatureMatrix& m, unsigned threads) {
  const ForestEngine engine(n);
  const auto col = column_map(n.structure(), m);
  const std::size_t nl = m.num_languages();
  const std::size_t blocks = (nl + kBlockLanguages - 1) / kBlockLanguages;

  std::vector<SufficientStats> partial(blocks);
  std::vector<double> partial_ll(blocks, 0.0);
  parallel_for(
      blocks,
      [&](std::size_t b) {
        auto st = zero_stats(n.structure());
        double ll = 0.0;
        std::vector<std::int8_t> ev(n.size());
        Posterior post;
        ForestEngine::Workspace ws;
        const std::size_t end = std::min(nl, (b + 1) * kBlockLanguages);
        for (std::size_t l = b * kBlockLanguages; l < end; ++l) {
          const auto row = m.row(l);
          for (std::size_t i = 0; i < n.size(); ++i) ev[i] = row[col[i]];
          engine.run(ev, post, ws, true);
          ll += post.log_evidence;
          for (std::size_t i = 0; i < n.size(); ++i) {
            auto& c = st.counts[i];
            if (n.parent(i)) {
              const auto& f = post.family[i];
              c[0][0] += f[0];
              c[0][1] += f[1];
              c[1][0] += f[2];
              c[1][1] += f[3];
            } else {
              c[0][0] += 1.0 - post.p1[i];
              c[0][1] += post.p1[i];
            }
          }
        }
        partial[b] = std::move(st);
        partial_ll[b] = ll;
      },
      threads);

  EStep out{zero_stats(n.structure()), 0.0};
  for (std::size_t b = 0; b < blocks; ++b) {
    add_into(out.stats, partial[b]);
    out.log_likelihood += partial_ll[b];
  }
  return out;
}

double log_prior(const Network& n, const SmoothingPrior& prior) {
  double lp = 0.0;
  for (const auto& cpt : n.cpts()) {
    for (const auto& r : cpt.rows) lp += prior.alpha * (std::log(r[0]) + std::log(r[1]));
  }
  return lp;
}

double log_likelihood(const Network& n, const FeatureMatrix& m, unsigned threads) {
  return e_step(n, m, threads).log_likelihood;
}

std::pair<Network, FitReport> em_fit(const ForestStructure& s, const FeatureMatrix& m,
                                     const SmoothingPrior& prior, const EmOptions& options) {
  if (auto v = validate(s); !v.empty()) throw ValidationError("invalid structure: " + v.front().message);
  const auto col = column_map(s, m);

  Network net = with_cpts(s, m_step(family_counts(s, m, col), prior), prior.alpha);
  FitReport report;
  auto step = e_step(net, m, options.threads);
  double previous = step.log_likelihood + log_prior(net, prior);
  report.log_posterior_trace.push_back(previous);
  if (options.held_out) report.held_out_trace.push_back(log_likelihood(net, *options.held_out, options.threads));

  for (std::size_t it = 0; it < options.max_iter; ++it) {
    Network next = with_cpts(s, m_step(step.stats, prior), prior.alpha);
    if (options.held_out) {
      const double h = log_likelihood(next, *options.held_out, options.threads);
      if (h < report.held_out_trace.back()) {
        report.stopped_early = true;
        break;
      }
      report.held_out_trace.push_back(h);
    }
    net = std::move(next);
    step = e_step(net, m, options.threads);
    const double current = step.log_likelihood + log_prior(net, prior);
    report.log_posterior_trace.push_back(current);
    report.iterations = it + 1;
    if (std::abs(current - previous) < options.tol) {
      report.converged = true;
      break;
    }
    previous = current;
  }
  return {std::move(net), std::move(report)};
}

nlohmann::json fit_report_json(const FitReport& r) {
  return {{"iterations", r.iterations},
          {"converged", r.converged},
          {"stopped_early", r.stopped_early},
          {"held_out_trace", r.held_out_trace},
          {"log_posterior_trace", r.log_posterior_trace}};
}

}  // namespace universals
