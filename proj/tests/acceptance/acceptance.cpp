// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only
//
// Exit status is 0 only when every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "universals/cli.hpp"
#include "universals/config.hpp"
#include "universals/corpus.hpp"
#include "universals/experiments.hpp"
#include "universals/implications.hpp"
#include "universals/inference.hpp"
#include "universals/learning.hpp"
#include "universals/random.hpp"
#include "universals/structure.hpp"
#include "universals/synthetic.hpp"

namespace fs = std::filesystem;
using namespace universals;

namespace {

// Tolerances and sizes, pinned.
constexpr double kBpTolerance = 1e-9;
constexpr std::size_t kBpForests = 500;
constexpr std::size_t kBpMaxNodes = 12;
constexpr std::size_t kBpMaxEvidence = 4;
constexpr double kBpSeconds = 30;

constexpr double kEmSlack = 1e-8;
constexpr double kRecoveryTolerance = 0.05;
constexpr double kEmSeconds = 120;

constexpr double kRecallTarget = 0.95;
constexpr double kStructureSeconds = 120;

constexpr double kSvGivenOv = 0.9844, kSvGivenOvTol = 0.02;
constexpr double kNounNumeral = 607, kNumeralNoun = 479, kCountTol = 0.05;
constexpr double kDegreeSingle = 0.79, kDegreeTriple = 0.91, kDegreeTol = 0.03;

constexpr double kDiscoverySeconds = 600;

constexpr double kGapOverMostFrequent = 0.15;
constexpr double kGridSeconds = 900;

constexpr std::size_t kNullMaxReported = 2;
constexpr double kNullSeconds = 120;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { lines.push_back("     " + what); }
};

std::string fmt(double x, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << x;
  return s.str();
}

fs::path data_dir() { return fs::path(UNIVERSALS_DATA_DIR); }

RawTable load_proxy() {
  const auto dir = data_dir() / "uriel_wals";
  return load_table(TableSources{(dir / "features.csv").string(), (dir / "categories.csv").string(), ""});
}

// Real WALS when UNIVERSALS_WALS_CLDF names an export, else the bundled proxy.
struct Corpus {
  RawTable raw;
  nlohmann::json landmarks;
  std::string name;
};

Corpus load_corpus() {
  Corpus c;
  if (const char* cldf = std::getenv("UNIVERSALS_WALS_CLDF"); cldf && *cldf) {
    c.raw = load_wals_cldf(cldf);
    c.landmarks = nlohmann::json::parse(std::ifstream(data_dir() / "wals_cldf" / "landmarks.json"));
    c.name = std::string("WALS CLDF at ") + cldf;
  } else {
    c.raw = load_proxy();
    c.landmarks = nlohmann::json::parse(std::ifstream(data_dir() / "uriel_wals" / "landmarks.json"));
    c.name = "bundled URIEL WALS-derived table";
  }
  return c;
}

// Literals of a landmark role on m; empty when any part is absent.
std::optional<std::vector<std::string>> role(const nlohmann::json& landmarks, const FeatureMatrix& m,
                                             const std::string& name) {
  std::vector<std::string> out;
  for (const auto& part : landmarks.at("roles").at(name)) {
    const auto lit = literal_for_value(m, part.at("feature").get<std::string>(), part.at("value").get<std::string>());
    if (!lit) return std::nullopt;
    out.push_back(*lit);
  }
  return out;
}

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " & ") + x;
  return s;
}

// The fit step of the pipeline with the default configuration.
struct Fitted {
  FeatureMatrix matrix, train, dev, test;
  Network network;
  FitReport report;
};

Fitted fit_default(const RawTable& raw) {
  const RunConfig config;
  Fitted f;
  f.matrix = binarize(filter_table(raw, config.min_langs, config.min_value_frac));
  const auto split = split_languages(f.matrix, config.seed);
  f.train = f.matrix.select_languages(split.train);
  f.dev = f.matrix.select_languages(split.dev);
  f.test = f.matrix.select_languages(split.test);
  SkeletonOptions so;
  so.significance = config.pc_significance;
  so.max_cond = config.max_cond;
  const auto structure = orient_and_forestify(learn_skeleton(f.train, so), f.train);
  EmOptions eo;
  eo.tol = config.em_tol;
  eo.max_iter = config.em_max_iter;
  eo.held_out = &f.dev;
  std::tie(f.network, f.report) = em_fit(structure, f.train, SmoothingPrior(config.alpha), eo);
  return f;
}

// ---------------------------------------------------------------------------

Outcome inference_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t marginals = 0;
  for (std::size_t rep = 0; rep < kBpForests; ++rep) {
    Rng rng(derive_seed(1, {rep}));
    const std::size_t nodes = 1 + rng.uniform_index(kBpMaxNodes);
    const auto net = random_network(random_forest({nodes, 0.2, "X"}, rng), rng, 0.01, 0.99);
    std::vector<std::size_t> order(nodes);
    for (std::size_t i = 0; i < nodes; ++i) order[i] = i;
    rng.shuffle(order);
    Evidence e;
    const std::size_t k = rng.uniform_index(std::min(kBpMaxEvidence, nodes) + 1);
    for (std::size_t i = 0; i < k; ++i) e.set(net.name(order[i]), static_cast<int>(rng.uniform_index(2)));
    for (const auto& id : net.variables()) {
      worst = std::max(worst, std::abs(bp_marginal(net, e, id).p1 - enumerate_marginal(net, e, id).p1));
      ++marginals;
    }
  }
  const double secs = seconds_since(t0);
  o.check(worst < kBpTolerance, "max |bp - enumeration| = " + fmt(worst, 3) + " over " + std::to_string(marginals) +
                                    " marginals of " + std::to_string(kBpForests) + " forests (< " +
                                    fmt(kBpTolerance) + ")");
  o.check(secs < kBpSeconds, "runtime " + fmt(secs, 3) + " s (< " + fmt(kBpSeconds) + " s)");
  return o;
}

double max_trace_drop(const std::vector<double>& trace) {
  double drop = 0.0;
  for (std::size_t t = 1; t < trace.size(); ++t) drop = std::max(drop, trace[t - 1] - trace[t]);
  return drop;
}

Outcome em_soundness() {
  Outcome o;
  const auto t0 = Clock::now();

  const auto wals = fit_default(load_proxy());
  const double wals_drop = max_trace_drop(wals.report.log_posterior_trace);
  o.check(wals_drop <= kEmSlack, "proxy WALS: " + std::to_string(wals.report.log_posterior_trace.size()) +
                                     " trace points, largest decrease " + fmt(wals_drop, 3) + " (<= " +
                                     fmt(kEmSlack) + ")");

  double synth_drop = 0.0, worst_error = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Rng rng(derive_seed(2, {seed}));
    const auto truth = random_network(random_forest({10, 0.0, "X"}, rng), rng);
    const auto m = mask_mcar(sample_matrix(truth, 5000, rng), 0.2, rng);
    EmOptions eo;
    const auto [fitted, report] = em_fit(truth.structure(), m, SmoothingPrior(5.0), eo);
    synth_drop = std::max(synth_drop, max_trace_drop(report.log_posterior_trace));
    for (std::size_t i = 0; i < truth.size(); ++i) {
      for (std::size_t r = 0; r < truth.cpt(i).rows.size(); ++r) {
        worst_error = std::max(worst_error, std::abs(truth.cpt(i).rows[r][1] - fitted.cpt(i).rows[r][1]));
      }
    }
  }
  o.check(synth_drop <= kEmSlack, "synthetic: largest decrease " + fmt(synth_drop, 3) + " (<= " + fmt(kEmSlack) + ")");
  o.check(worst_error < kRecoveryTolerance, "recovery, 10 nodes x 5000 languages x 20% MCAR, 3 seeds: max CPT error " +
                                                fmt(worst_error) + " (< " + fmt(kRecoveryTolerance) + ")");
  const double secs = seconds_since(t0);
  o.check(secs < kEmSeconds, "runtime " + fmt(secs, 3) + " s (< " + fmt(kEmSeconds) + " s)");
  return o;
}

Outcome structure_recovery() {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t true_edges = 0, recovered = 0, learned = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(3, {seed}));
    const auto truth = random_network(random_forest({10, 0.0, "X"}, rng), rng, 0.8, 0.95);
    const auto m = sample_matrix(truth, 2000, rng);
    const auto forest = orient_and_forestify(learn_skeleton(m), m);
    const auto want = truth.structure().edges();
    const auto got = forest.edges();
    true_edges += want.size();
    learned += got.size();
    for (const auto& e : want) recovered += std::count(got.begin(), got.end(), e);
  }
  const double recall = static_cast<double>(recovered) / static_cast<double>(true_edges);
  o.check(recall >= kRecallTarget, "undirected edge recall " + std::to_string(recovered) + "/" +
                                       std::to_string(true_edges) + " = " + fmt(recall) + " over 20 seeds (>= " +
                                       fmt(kRecallTarget) + ")");
  o.note("precision " + std::to_string(recovered) + "/" + std::to_string(learned));
  const double secs = seconds_since(t0);
  o.check(secs < kStructureSeconds, "runtime " + fmt(secs, 3) + " s (< " + fmt(kStructureSeconds) + " s)");
  return o;
}

Outcome wals_statistics() {
  Outcome o;
  const auto corpus = load_corpus();
  o.note("corpus: " + corpus.name + ", unfiltered");
  const auto m = binarize(corpus.raw);
  auto lit = [&](const std::string& name) { return role(corpus.landmarks, m, name); };
  auto within = [](double x, double target, double tol) { return std::abs(x - target) <= tol; };

  const auto ov = lit("OV"), sv = lit("SV");
  if (ov && sv) {
    const double p = empirical_conditional(m, *ov, sv->front());
    o.check(within(p, kSvGivenOv, kSvGivenOvTol),
            "SV among OV languages " + fmt(p) + " (" + fmt(kSvGivenOv) + " +- " + fmt(kSvGivenOvTol) + ")");
  } else {
    o.check(false, "OV or SV landmark missing from the table");
  }

  auto count = [&](const std::vector<std::string>& lits) {
    std::vector<kernels::Word> mask(m.all().begin(), m.all().end());
    for (const auto& t : lits) {
      const auto l = parse_literal(t);
      kernels::and_into(mask, mask, m.level(m.variable_index(l.variable), l.value));
    }
    return static_cast<double>(kernels::popcount(mask));
  };
  const auto nn = lit("Noun-Numeral"), numn = lit("Numeral-Noun");
  if (nn && numn) {
    const double a = count(*nn), b = count(*numn);
    o.check(within(a, kNounNumeral, kCountTol * kNounNumeral),
            "Noun-Numeral languages " + fmt(a, 6) + " (" + fmt(kNounNumeral) + " +- 5%)");
    o.check(within(b, kNumeralNoun, kCountTol * kNumeralNoun),
            "Numeral-Noun languages " + fmt(b, 6) + " (" + fmt(kNumeralNoun) + " +- 5%)");
  } else {
    o.check(false, "numeral-order landmarks missing from the table");
  }

  const auto degree = lit("Degree word-Adjective"), vo_nrel = lit("VO and Noun-Relative clause"), svo = lit("SVO");
  if (degree && numn) {
    const double p = empirical_conditional(m, *degree, numn->front());
    o.check(within(p, kDegreeSingle, kDegreeTol), "Numeral-Noun given Degree word-Adjective " + fmt(p) + " (" +
                                                      fmt(kDegreeSingle) + " +- " + fmt(kDegreeTol) + ")");
  } else {
    o.check(false, "degree-word landmark missing from the table");
  }
  if (degree && vo_nrel && svo && numn) {
    auto implicants = *degree;
    implicants.insert(implicants.end(), vo_nrel->begin(), vo_nrel->end());
    implicants.insert(implicants.end(), svo->begin(), svo->end());
    const double p = empirical_conditional(m, implicants, numn->front());
    o.check(within(p, kDegreeTriple, kDegreeTol), "Numeral-Noun given {" + joined(implicants) + "} " + fmt(p) + " (" +
                                                      fmt(kDegreeTriple) + " +- " + fmt(kDegreeTol) + ")");
  } else {
    o.check(false, "triple-implicant landmarks missing from the table");
  }
  return o;
}

Outcome known_universals() {
  Outcome o;
  const auto corpus = load_corpus();
  o.note("corpus: " + corpus.name);
  const auto f = fit_default(corpus.raw);
  const RunConfig config;
  DiscoveryOptions opts;
  opts.max_implicants = config.max_implicants;
  opts.level = config.level;
  opts.min_support = config.min_support;
  const auto t0 = Clock::now();
  const auto d = discover(f.network, f.train, opts);
  const double secs = seconds_since(t0);
  o.note(std::to_string(d.implications.size()) + " significant of " + std::to_string(d.n_tests) + " tests");

  const std::pair<const char*, const char*> wanted[] = {
      {"Postpositions", "Genitive-Noun"}, {"Postpositions", "OV"}, {"Prepositions", "VO"}, {"OV", "SV"}};
  for (const auto& [from, to] : wanted) {
    const std::string label = std::string(from) + " > " + to;
    const auto a = role(corpus.landmarks, f.train, from), b = role(corpus.landmarks, f.train, to);
    if (!a || !b) {
      o.check(false, label + ": " + (!a ? from : to) + " did not survive preprocessing");
      continue;
    }
    auto implicants = *a;
    std::sort(implicants.begin(), implicants.end());
    const Implication* hit = nullptr;
    for (const auto& imp : d.implications) {
      if (imp.implicants == implicants && imp.implicand == b->front()) hit = &imp;
    }
    if (hit) {
      o.check(hit->p_corrected < opts.level, label + " (" + joined(implicants) + " > " + b->front() +
                                                 "): p_corrected " + fmt(hit->p_corrected, 3) + ", effect " +
                                                 fmt(hit->effect, 3));
    } else {
      const auto single = test_implication(f.network, f.train, implicants, b->front());
      o.check(false, label + " (" + joined(implicants) + " > " + b->front() + ") not reported; p_raw " +
                         fmt(single.p_raw, 3) + ", effect " + fmt(single.effect, 3));
    }
  }
  o.check(secs < kDiscoverySeconds, "discovery runtime " + fmt(secs, 3) + " s (< " + fmt(kDiscoverySeconds) + " s)");
  return o;
}

Outcome prediction_benchmark() {
  Outcome o;
  const auto corpus = load_corpus();
  o.note("corpus: " + corpus.name);
  const auto f = fit_default(corpus.raw);
  const RunConfig config;
  GridOptions g;
  g.k_min = config.k_min;
  g.k_max = config.k_max;
  g.max_sets_per_cell = config.max_sets_per_cell;
  g.seed = config.seed;
  const auto t0 = Clock::now();
  auto r = run_prediction_grid(f.network, f.test, g);
  r.most_frequent = baseline_most_frequent(f.train, f.test);
  r.pairwise = baseline_pairwise(f.train, f.test);
  const double secs = seconds_since(t0);

  const double mf = r.comparable_mean(r.most_frequent);
  const double pw = r.comparable_mean(r.pairwise);
  double worst_gap = INFINITY, overall = 0.0;
  std::string per_k;
  for (auto k : r.ks) {
    const double mk = r.mean_accuracy(k).value_or(0.0);
    overall += mk / static_cast<double>(r.ks.size());
    worst_gap = std::min(worst_gap, mk - mf);
    per_k += " k" + std::to_string(k) + "=" + fmt(mk);
  }
  o.note("model means:" + per_k + "; most-frequent " + fmt(mf) + ", pairwise " + fmt(pw));
  o.check(worst_gap >= kGapOverMostFrequent, "(a) smallest gap over most-frequent " + fmt(worst_gap) + " (>= " +
                                                 fmt(kGapOverMostFrequent) + " at every k)");
  const double k2 = r.mean_accuracy(2).value_or(0.0), k5 = r.mean_accuracy(5).value_or(0.0);
  o.check(k5 >= k2, "(b) mean at k=5 " + fmt(k5) + " >= mean at k=2 " + fmt(k2));
  o.check(overall >= pw, "(c) model mean over k " + fmt(overall) + " >= pairwise " + fmt(pw));
  o.check(secs < kGridSeconds, "runtime " + fmt(secs, 3) + " s (< " + fmt(kGridSeconds) + " s)");
  return o;
}

Outcome family_wise_error() {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t reported = 0;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(7, {seed}));
    const auto m = independent_matrix(20, 1000, rng);
    const auto structure = orient_and_forestify(learn_skeleton(m), m);
    const auto net = em_fit(structure, m, SmoothingPrior(5.0)).first;
    const auto d = discover(net, m, {});
    reported += d.implications.size();
    if (!d.implications.empty()) per_seed += " seed" + std::to_string(seed) + ":" + std::to_string(d.implications.size());
  }
  o.check(reported <= kNullMaxReported, "implications reported on independent data, 20 seeds x 20 variables x 1000 "
                                        "languages: " + std::to_string(reported) + " (<= " +
                                            std::to_string(kNullMaxReported) + ")" + per_seed);
  const double secs = seconds_since(t0);
  o.check(secs < kNullSeconds, "runtime " + fmt(secs, 3) + " s (< " + fmt(kNullSeconds) + " s)");
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  const auto work = fs::temp_directory_path() / ("universals_acceptance_" + std::to_string(std::random_device{}()));
  RunConfig config;
  config.input = (data_dir() / "uriel_wals").string();
  std::ostringstream log;
  for (const char* run : {"a", "b"}) cli::run_all(config, (work / run).string(), log);
  for (const char* file : {"network.json", "implications.csv", "prediction_report.csv"}) {
    const auto a = slurp(work / "a" / file), b = slurp(work / "b" / file);
    o.check(!a.empty() && a == b, std::string(file) + ": " + std::to_string(a.size()) + " bytes, identical " +
                                      (a == b ? "yes" : "no"));
  }
  std::error_code ec;
  fs::remove_all(work, ec);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
  bool needs_wals = false;  // thresholds are WALS figures; the proxy cannot settle them
};

// ctest SKIP_RETURN_CODE for a WALS-bound failure measured on the proxy.
constexpr int kExitProxyOnly = 77;

bool have_wals() {
  const char* cldf = std::getenv("UNIVERSALS_WALS_CLDF");
  return cldf && *cldf;
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "inference oracle equivalence", inference_oracle},
      {2, "EM soundness", em_soundness},
      {3, "structure recovery", structure_recovery},
      {4, "empirical WALS statistics", wals_statistics, true},
      {5, "known-universal recovery", known_universals, true},
      {6, "prediction benchmark", prediction_benchmark, true},
      {7, "family-wise error control", family_wise_error},
      {8, "determinism", determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run one criterion (1-8)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  bool hard_fail = false, proxy_fail = false;
  for (const auto& c : criteria()) {
    if (only && c.id != only) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    for (const auto& line : o.lines) std::cout << "  " << line << '\n';
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " (" << fmt(seconds_since(t0), 3)
              << " s)";
    if (!o.pass && c.needs_wals && !have_wals()) {
      std::cout << " [measured on the proxy corpus; set UNIVERSALS_WALS_CLDF to settle it]";
      proxy_fail = true;
    } else if (!o.pass) {
      hard_fail = true;
    }
    std::cout << '\n' << std::flush;
  }
  if (hard_fail) return 1;
  return proxy_fail ? kExitProxyOnly : 0;
}
