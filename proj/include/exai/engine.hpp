#pragma once

// Shipped defaults and the engine configuration file.
//
// Configuration is JSON; every key is optional:
//
//   {
//     "types": "data/response_types.txt",
//     "dp_table": "data/dp_table.txt",
//     "seal_key_env": "EXAI_SEAL_KEY",
//     "drift": { "base_step": 2.0, "spillover": 0.1 },
//     "election": {
//       "leaning_weight": 0.4, "liking_weight": 0.3, "trust_weight": 0.3,
//       "decision_threshold": 5.0, "neutral_band": [40, 60],
//       "valence_factors": { "agree": 1.0, "opposed": -0.5, "neutral": 0.25 },
//       "campaign_step": 8.0
//     }
//   }
//
// Relative paths resolve against the directory holding the config file.

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "exai/default_data.hpp"
#include "exai/drift.hpp"
#include "exai/election.hpp"
#include "exai/errors.hpp"
#include "exai/evaluation.hpp"
#include "exai/persistence.hpp"
#include "exai/response_types.hpp"
#include "exai/scenario.hpp"

namespace exai {

inline const TypeRegistry& default_registry() {
  static const TypeRegistry registry = load_type_definitions(defaults::kResponseTypes);
  return registry;
}

inline const DpTable& default_dp_table() {
  static const DpTable table = load_dp_table(defaults::kDpTable);
  return table;
}

inline election::Scenario favorable_conservative_scenario() { return election::parse_scenario(defaults::kFavorableConservative); }

// Campaign stimuli are coarser than one-on-one interactions: each event moves voters further.
inline constexpr double kDefaultCampaignStep = 8.0;

inline election::ElectionConfig default_election_config() {
  election::ElectionConfig c;
  c.drift.base_step = kDefaultCampaignStep;
  return c;
}

struct EngineConfig {
  DriftConfig drift{};
  election::ElectionConfig election = default_election_config();
  std::optional<std::filesystem::path> types_path;
  std::optional<std::filesystem::path> dp_table_path;
  std::string seal_key_env = std::string(kSealKeyEnv);

  TypeRegistry registry() const { return types_path ? load_type_definitions(read_file(*types_path)) : default_registry(); }

  DpTable dp_table() const { return dp_table_path ? load_dp_table(read_file(*dp_table_path)) : default_dp_table(); }

  std::optional<std::string> seal_key() const { return key_from_env(seal_key_env); }
};

inline EngineConfig parse_engine_config(std::string_view json_text, const std::filesystem::path& base_dir = {}) {
  EngineConfig cfg;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), 1, static_cast<int>(e.byte));
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  try {
    auto path_of = [&](const char* key) -> std::optional<std::filesystem::path> {
      if (!j.contains(key)) return std::nullopt;
      std::filesystem::path p = j.at(key).get<std::string>();
      return p.is_relative() ? base_dir / p : p;
    };
    cfg.types_path = path_of("types");
    cfg.dp_table_path = path_of("dp_table");
    cfg.seal_key_env = j.value("seal_key_env", cfg.seal_key_env);
    if (j.contains("drift")) {
      const auto& d = j.at("drift");
      cfg.drift.base_step = d.value("base_step", cfg.drift.base_step);
      cfg.drift.spillover = d.value("spillover", cfg.drift.spillover);
    }
    if (j.contains("election")) {
      const auto& e = j.at("election");
      auto& c = cfg.election;
      c.leaning_weight = e.value("leaning_weight", c.leaning_weight);
      c.liking_weight = e.value("liking_weight", c.liking_weight);
      c.trust_weight = e.value("trust_weight", c.trust_weight);
      c.decision_threshold = e.value("decision_threshold", c.decision_threshold);
      if (e.contains("neutral_band")) {
        const auto& band = e.at("neutral_band");
        c.neutral_low = band.at(0).get<double>();
        c.neutral_high = band.at(1).get<double>();
      }
      if (e.contains("valence_factors")) {
        const auto& v = e.at("valence_factors");
        c.agree_factor = v.value("agree", c.agree_factor);
        c.opposed_factor = v.value("opposed", c.opposed_factor);
        c.neutral_factor = v.value("neutral", c.neutral_factor);
      }
      c.drift.base_step = e.value("campaign_step", c.drift.base_step);
    }
    cfg.election.drift.spillover = cfg.drift.spillover;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (!(cfg.drift.base_step > 0.0) || !(cfg.election.drift.base_step > 0.0)) throw ValidationError("step sizes must be positive");
  if (!(cfg.drift.spillover >= 0.0 && cfg.drift.spillover <= 1.0)) throw ValidationError("spillover must be in [0, 1]");
  return cfg;
}

/// Config discovery: explicit path, then $EXAI_CONFIG, then ./exai.json, else built-in defaults.
inline EngineConfig discover_engine_config(const std::optional<std::filesystem::path>& explicit_path) {
  std::optional<std::filesystem::path> path = explicit_path;
  if (!path) {
    if (const char* env = std::getenv("EXAI_CONFIG"); env != nullptr && *env != '\0') path = env;
  }
  if (!path && std::filesystem::exists("exai.json")) path = "exai.json";
  if (!path) return EngineConfig{};
  return parse_engine_config(read_file(*path), path->parent_path());
}

}  // namespace exai
