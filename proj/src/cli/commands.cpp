#include "universals/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "universals/error.hpp"
#include "universals/experiments.hpp"
#include "universals/implications.hpp"
#include "universals/inference.hpp"
#include "universals/learning.hpp"
#include "universals/structure.hpp"

namespace universals::cli {
namespace fs = std::filesystem;
namespace {

std::string join_path(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  return f;
}

void write_json(const std::string& path, const nlohmann::json& j) { open_out(path) << j.dump(2) << '\n'; }

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path + " (run the earlier pipeline steps first)");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 0, 0, e.what());
  }
}

nlohmann::json stamped(nlohmann::json j, const RunConfig& config) {
  j["config_hash"] = config_hash(config);
  return j;
}

FeatureMatrix load_matrix(const std::string& out) {
  const auto csv_path = join_path(out, "matrix.csv");
  if (!fs::exists(csv_path)) throw ValidationError("no matrix in " + out + "; run preprocess first");
  return read_matrix(csv_path, join_path(out, "manifest.json"));
}

struct Fitted {
  FeatureMatrix matrix;
  Split split;
  Network network;
};

Fitted load_fitted(const std::string& out) {
  Fitted f;
  f.matrix = load_matrix(out);
  try {
    f.split = split_from_json(read_json(join_path(out, "split.json")));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(join_path(out, "split.json") + ": " + e.what());
  }
  f.network = load_network(join_path(out, "network.json"));
  return f;
}

std::string dot_quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c;
  }
  return q + '"';
}

}  // namespace

RawTable load_input(const RunConfig& config) {
  if (!config.cldf.empty()) return load_wals_cldf(config.cldf);
  if (config.input.empty()) throw ValidationError("no input given");
  const fs::path in(config.input);
  if (!fs::exists(in)) throw ValidationError("input not found: " + config.input);
  TableSources src;
  const fs::path dir = fs::is_directory(in) ? in : in.parent_path();
  src.features_csv = fs::is_directory(in) ? (dir / "features.csv").string() : in.string();
  if (!fs::exists(src.features_csv)) throw ValidationError("input not found: " + src.features_csv);
  if (fs::exists(dir / "categories.csv")) src.categories_csv = (dir / "categories.csv").string();
  if (fs::exists(dir / "value_labels.csv")) src.value_labels_csv = (dir / "value_labels.csv").string();
  return load_table(src);
}

void preprocess(const RunConfig& config, const std::string& out, std::ostream& log) {
  config.validate();
  const auto raw = load_input(config);
  const auto filtered = filter_table(raw, config.min_langs, config.min_value_frac);
  BinarizeLog blog;
  const auto m = binarize(filtered, &blog);
  for (const auto& w : blog.warnings) log << "warning: " << w << '\n';
  if (m.num_variables() == 0) throw ValidationError("no variables survive filtering");
  fs::create_directories(out);
  {
    auto f = open_out(join_path(out, "matrix.csv"));
    write_matrix_csv(m, f);
  }
  write_json(join_path(out, "manifest.json"), stamped(manifest_json(m), config));
  open_out(join_path(out, "config.json")) << config_text(config);
  log << "preprocess: " << raw.num_languages() << " languages x " << raw.num_features() << " features -> "
      << m.num_languages() << " languages x " << m.num_variables() << " binary variables\n";
}

void fit(const RunConfig& config, const std::string& out, std::ostream& log) {
  config.validate();
  const auto m = load_matrix(out);
  const auto split = split_languages(m, config.seed);
  const auto train = m.select_languages(split.train);
  const auto dev = m.select_languages(split.dev);

  SkeletonOptions so;
  so.significance = config.pc_significance;
  so.max_cond = config.max_cond;
  const auto skeleton = learn_skeleton(train, so);
  const auto structure = orient_and_forestify(skeleton, train);

  EmOptions eo;
  eo.tol = config.em_tol;
  eo.max_iter = config.em_max_iter;
  eo.held_out = &dev;
  const auto [net, report] = em_fit(structure, train, SmoothingPrior(config.alpha), eo);

  write_json(join_path(out, "split.json"), stamped(split_json(split), config));
  write_json(join_path(out, "network.json"), stamped(network_json(net), config));
  write_json(join_path(out, "fit_report.json"), stamped(fit_report_json(report), config));
  log << "fit: " << skeleton.edges.size() << " skeleton edges, " << structure.edges().size()
      << " forest edges, EM " << report.iterations << " iterations"
      << (report.converged ? " (converged)" : report.stopped_early ? " (stopped on dev)" : " (not converged)") << '\n';
}

void implications(const RunConfig& config, const std::string& out, std::ostream& log) {
  config.validate();
  const auto f = load_fitted(out);
  const auto train = f.matrix.select_languages(f.split.train);
  DiscoveryOptions opts;
  opts.max_implicants = config.max_implicants;
  opts.level = config.level;
  opts.min_support = config.min_support;
  const auto d = discover(f.network, train, opts);
  std::vector<KnownUniversal> known;
  if (!config.known_universals.empty()) known = load_known_universals(config.known_universals);
  {
    auto csv_out = open_out(join_path(out, "implications.csv"));
    write_implications_csv(d.implications, csv_out);
  }
  {
    auto json_out = open_out(join_path(out, "implications.json"));
    write_implications_json(d, json_out, {{"config_hash", config_hash(config)}});
  }
  open_out(join_path(out, "implications.txt")) << format_implication_table(d.implications, known);
  log << "implications: " << d.implications.size() << " significant of " << d.n_tests << " tests over "
      << d.n_implicant_sets << " implicant sets\n";
}

void evaluate(const RunConfig& config, const std::string& out, std::ostream& log) {
  config.validate();
  const auto f = load_fitted(out);
  const auto train = f.matrix.select_languages(f.split.train);
  const auto test = f.matrix.select_languages(f.split.test);
  GridOptions g;
  g.k_min = config.k_min;
  g.k_max = config.k_max;
  g.max_sets_per_cell = config.max_sets_per_cell;
  g.seed = config.seed;
  auto report = run_prediction_grid(f.network, test, g);
  report.most_frequent = baseline_most_frequent(train, test);
  report.pairwise = baseline_pairwise(train, test);
  {
    auto csv_out = open_out(join_path(out, "prediction_report.csv"));
    write_prediction_csv(report, csv_out);
  }
  write_json(join_path(out, "prediction_report.json"), stamped(prediction_json(report), config));
  log << "evaluate: " << report.cells.size() << " cells";
  for (auto k : report.ks) {
    if (const auto mean = report.mean_accuracy(k)) log << "  k=" << k << ": " << *mean;
  }
  log << "  most-frequent: " << report.comparable_mean(report.most_frequent)
      << "  pairwise: " << report.comparable_mean(report.pairwise) << '\n';
}

void run_all(const RunConfig& config, const std::string& out, std::ostream& log) {
  preprocess(config, out, log);
  fit(config, out, log);
  implications(config, out, log);
  evaluate(config, out, log);
}

Network load_network(const std::string& path) {
  const auto j = read_json(path);
  Network n;
  try {
    n = network_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  if (const auto v = validate(n); !v.empty()) throw ValidationError(path + ": " + v.front().message);
  return n;
}

void predict(const std::string& network_path, const std::vector<std::string>& evidence,
             const std::string& target, std::ostream& out) {
  const auto n = load_network(network_path);
  Evidence e;
  for (const auto& item : evidence) {
    const auto eq = item.rfind('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("evidence '" + item + "' is not id=value");
    const auto value = item.substr(eq + 1);
    if (value != "0" && value != "1") throw ValidationError("evidence '" + item + "' must set 0 or 1");
    e.set(item.substr(0, eq), value == "1" ? 1 : 0);
  }
  (void)e.dense(n);
  if (e.contains(target)) throw ValidationError("target '" + target + "' is part of the evidence");
  const auto m = bp_marginal(n, e, target);
  out << "target: " << target << "\np(0): " << m.p0 << "\np(1): " << m.p1
      << "\ndecoded: " << decode_marginal(m.p1) << '\n';
}

std::string network_dot(const Network& n) {
  std::ostringstream out;
  out << "digraph universals {\n  node [shape=box];\n";
  for (const auto& id : n.variables()) out << "  " << dot_quote(id) << ";\n";
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (const auto p = n.parent(i)) out << "  " << dot_quote(n.name(*p)) << " -> " << dot_quote(n.name(i)) << ";\n";
  }
  out << "}\n";
  return out.str();
}

void export_dot(const std::string& network_path, const std::string& out_path) {
  const auto n = load_network(network_path);
  open_out(out_path) << network_dot(n);
}

void convert_cldf(const std::string& cldf_dir, const std::string& out) {
  const auto t = load_wals_cldf(cldf_dir);
  fs::create_directories(out);
  write_table(t, out);
}

}  // namespace universals::cli
