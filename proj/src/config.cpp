#include "universals/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "universals/error.hpp"

namespace universals {

void RunConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("config: ") + what);
  };
  require(min_value_frac >= 0.0 && min_value_frac < 1.0, "min_value_frac must be in [0, 1)");
  require(alpha > 0.0, "alpha must be positive");
  require(pc_significance > 0.0 && pc_significance < 1.0, "pc_significance must be in (0, 1)");
  require(max_cond <= 16, "max_cond must be at most 16");
  require(em_tol > 0.0, "em_tol must be positive");
  require(em_max_iter >= 1, "em_max_iter must be at least 1");
  require(k_min >= 1 && k_min <= k_max, "need 1 <= k_min <= k_max");
  require(max_sets_per_cell >= 1, "max_sets_per_cell must be at least 1");
  require(level > 0.0 && level <= 1.0, "level must be in (0, 1]");
  require(max_implicants >= 1, "max_implicants must be at least 1");
}

nlohmann::json config_json(const RunConfig& c) {
  return {{"input", c.input},
          {"cldf", c.cldf},
          {"known_universals", c.known_universals},
          {"seed", c.seed},
          {"min_langs", c.min_langs},
          {"min_value_frac", c.min_value_frac},
          {"alpha", c.alpha},
          {"pc_significance", c.pc_significance},
          {"max_cond", c.max_cond},
          {"em_tol", c.em_tol},
          {"em_max_iter", c.em_max_iter},
          {"k_min", c.k_min},
          {"k_max", c.k_max},
          {"max_sets_per_cell", c.max_sets_per_cell},
          {"level", c.level},
          {"max_implicants", c.max_implicants},
          {"min_support", c.min_support}};
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  RunConfig c;
  const auto known = config_json(c);
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ValidationError("config: unknown key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("input", c.input);
    get("cldf", c.cldf);
    get("known_universals", c.known_universals);
    get("seed", c.seed);
    get("min_langs", c.min_langs);
    get("min_value_frac", c.min_value_frac);
    get("alpha", c.alpha);
    get("pc_significance", c.pc_significance);
    get("max_cond", c.max_cond);
    get("em_tol", c.em_tol);
    get("em_max_iter", c.em_max_iter);
    get("k_min", c.k_min);
    get("k_max", c.k_max);
    get("max_sets_per_cell", c.max_sets_per_cell);
    get("level", c.level);
    get("max_implicants", c.max_implicants);
    get("min_support", c.min_support);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 0, 0, e.what());
  }
}

std::string config_text(const RunConfig& c) { return config_json(c).dump(2) + "\n"; }

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_text(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace universals
