#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "universals/corpus.hpp"
#include "universals/graph.hpp"

namespace test_support {

// Rows are strings over {'0', '1', '.'} ('.' = missing), one char per variable.
inline universals::FeatureMatrix matrix(const std::vector<std::string>& ids, const std::vector<std::string>& rows,
                                        const std::string& category = "c") {
  std::vector<universals::Variable> vars;
  for (const auto& id : ids) vars.push_back({id, id, "1", category});
  std::vector<std::string> langs;
  std::vector<std::int8_t> cells;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    langs.push_back("L" + std::to_string(r));
    for (char c : rows[r]) cells.push_back(c == '.' ? universals::kMissing : static_cast<std::int8_t>(c - '0'));
  }
  return {std::move(langs), std::move(vars), std::move(cells)};
}

// Chain a -> b with p(a=1) = pa, p(b=1|a=1) = b1, p(b=1|a=0) = b0.
inline universals::Network chain2(double pa, double b1, double b0) {
  universals::ForestStructure s{{"a", "b"}, {std::nullopt, 0}};
  std::vector<universals::Cpt> cpts(2);
  cpts[0].rows = {{1 - pa, pa}};
  cpts[1].rows = {{1 - b0, b0}, {1 - b1, b1}};
  return {s, cpts, 5.0};
}

}  // namespace test_support
