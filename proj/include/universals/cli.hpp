#pragma once

// Pipeline commands behind the `universals` executable. Each reads its inputs
// from files, writes its outputs into a directory and throws
// universals::Error on bad input; main() maps that to exit code 2.

#include <iosfwd>
#include <string>
#include <vector>

#include "universals/config.hpp"
#include "universals/corpus.hpp"
#include "universals/graph.hpp"

namespace universals::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

// Table directory, a features CSV (categories.csv and value_labels.csv are
// picked up next to it) or, when config.cldf is set, a WALS CLDF export.
RawTable load_input(const RunConfig& config);

// out/matrix.csv, out/manifest.json, out/config.json
void preprocess(const RunConfig& config, const std::string& out, std::ostream& log);
// Reads the preprocessed matrix; writes out/split.json, out/network.json,
// out/fit_report.json.
void fit(const RunConfig& config, const std::string& out, std::ostream& log);
// Discovery on the training split: out/implications.{csv,json,txt}.
void implications(const RunConfig& config, const std::string& out, std::ostream& log);
// Prediction grid on the test split: out/prediction_report.{csv,json}.
void evaluate(const RunConfig& config, const std::string& out, std::ostream& log);
// All four in order.
void run_all(const RunConfig& config, const std::string& out, std::ostream& log);

// Evidence items are "id=0" or "id=1". Prints the marginal of target and its
// decoded value.
void predict(const std::string& network_path, const std::vector<std::string>& evidence,
             const std::string& target, std::ostream& out);

std::string network_dot(const Network& n);
void export_dot(const std::string& network_path, const std::string& out_path);

// Writes a WALS CLDF export as a table directory.
void convert_cldf(const std::string& cldf_dir, const std::string& out);

Network load_network(const std::string& path);

}  // namespace universals::cli
