// universals: preprocess, fit, discover implications and evaluate prediction
// over a typological feature table.

#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "universals/cli.hpp"
#include "universals/error.hpp"
#include "universals/parallel.hpp"

namespace {

using universals::RunConfig;

// --config is read before the other flags so they can override it.
RunConfig initial_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string path;
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) {
      path = argv[i + 1];
    } else if (std::strncmp(argv[i], "--config=", 9) == 0) {
      path = argv[i] + 9;
    }
    if (!path.empty()) return universals::load_config(path);
  }
  return {};
}

void add_config_flags(CLI::App* cmd, RunConfig& c, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON run config (flags override it)");
  cmd->add_option("--input", c.input, "table directory or features CSV")->envname("UNIVERSALS_INPUT");
  cmd->add_option("--cldf", c.cldf, "WALS CLDF export directory (instead of --input)")->envname("UNIVERSALS_CLDF");
  cmd->add_option("--known-universals", c.known_universals, "CSV of known universals for annotation")
      ->envname("UNIVERSALS_KNOWN_UNIVERSALS");
  cmd->add_option("--seed", c.seed, "seed for the split and sampling")->envname("UNIVERSALS_SEED");
  cmd->add_option("--min-langs", c.min_langs, "drop features coded for fewer languages")
      ->envname("UNIVERSALS_MIN_LANGS");
  cmd->add_option("--min-value-frac", c.min_value_frac, "treat rarer values as missing")
      ->envname("UNIVERSALS_MIN_VALUE_FRAC");
  cmd->add_option("--alpha", c.alpha, "add-alpha smoothing")->envname("UNIVERSALS_ALPHA");
  cmd->add_option("--significance", c.pc_significance, "independence test level for the skeleton")
      ->envname("UNIVERSALS_SIGNIFICANCE");
  cmd->add_option("--max-cond", c.max_cond, "largest conditioning set")->envname("UNIVERSALS_MAX_COND");
  cmd->add_option("--em-tol", c.em_tol, "EM stopping tolerance on the log posterior")->envname("UNIVERSALS_EM_TOL");
  cmd->add_option("--em-max-iter", c.em_max_iter, "EM iteration cap")->envname("UNIVERSALS_EM_MAX_ITER");
  cmd->add_option("--k-min", c.k_min, "fewest in-category implicants")->envname("UNIVERSALS_K_MIN");
  cmd->add_option("--k-max", c.k_max, "most in-category implicants")->envname("UNIVERSALS_K_MAX");
  cmd->add_option("--max-sets", c.max_sets_per_cell, "implicant sets sampled per category and k")
      ->envname("UNIVERSALS_MAX_SETS");
  cmd->add_option("--level", c.level, "family-wise significance level for discovery")
      ->envname("UNIVERSALS_LEVEL");
  cmd->add_option("--max-implicants", c.max_implicants, "largest implicant set in discovery")
      ->envname("UNIVERSALS_MAX_IMPLICANTS");
  cmd->add_option("--min-support", c.min_support, "languages needed with every implicant present")
      ->envname("UNIVERSALS_MIN_SUPPORT");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = universals::cli;
  CLI::App app{"Probabilistic typological implications over a forest Bayesian network"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")
      ->envname("UNIVERSALS_THREADS");

  RunConfig config;
  try {
    config = initial_config(argc, argv);
  } catch (const universals::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitUsage;
  }
  std::string config_path;
  std::string out = "out";

  struct Step {
    const char* name;
    const char* help;
    void (*fn)(const RunConfig&, const std::string&, std::ostream&);
  };
  const Step steps[] = {
      {"preprocess", "filter and binarize the input into out/matrix.csv", cli::preprocess},
      {"fit", "learn structure and parameters on the training split", cli::fit},
      {"implications", "discover significant implications", cli::implications},
      {"evaluate", "run the feature-prediction grid and baselines", cli::evaluate},
      {"run", "preprocess, fit, implications and evaluate", cli::run_all},
  };
  std::vector<std::pair<CLI::App*, const Step*>> step_cmds;
  for (const auto& s : steps) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    add_config_flags(cmd, config, config_path);
    cmd->add_option("--out", out, "output directory")->envname("UNIVERSALS_OUT");
    step_cmds.emplace_back(cmd, &s);
  }

  std::string network_path, target, dot_path;
  std::vector<std::string> evidence;
  auto* predict = app.add_subcommand("predict", "posterior marginal of one variable");
  predict->add_option("--network", network_path, "network.json")->required();
  predict->add_option("--evidence", evidence, "id=0 or id=1, repeatable");
  predict->add_option("--target", target, "variable to predict")->required();

  auto* dot = app.add_subcommand("export-dot", "write the network as Graphviz DOT");
  dot->add_option("--network", network_path, "network.json")->required();
  dot->add_option("--out", dot_path, "DOT file")->required();

  std::string cldf_dir;
  auto* convert = app.add_subcommand("convert-cldf", "convert a WALS CLDF export into a table directory");
  convert->add_option("--cldf", cldf_dir, "CLDF directory")->required();
  convert->add_option("--out", out, "table directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  if (threads) universals::set_default_threads(threads);
  try {
    for (const auto& [cmd, step] : step_cmds) {
      if (*cmd) step->fn(config, out, std::cerr);
    }
    if (*predict) cli::predict(network_path, evidence, target, std::cout);
    if (*dot) cli::export_dot(network_path, dot_path);
    if (*convert) cli::convert_cldf(cldf_dir, out);
  } catch (const universals::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return cli::kExitInternal;
  }
  return cli::kExitOk;
}
