#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "privgame/gaussian_model.hpp"

namespace privgame {

struct Scenario {
  GaussianModel model;
  double delta = 0.0;
};

/// Parses a scenario document without checking positive definiteness.
/// Throws ScenarioIoError for malformed JSON, missing keys or bad shapes.
Scenario parse_scenario(const nlohmann::json& doc);

nlohmann::json scenario_to_json(const Scenario& scenario);

/// Reads and parses a scenario file; does not validate.
Scenario read_scenario_file(const std::filesystem::path& path);

/// Reads, parses and validates; invalid models raise ValidationError.
Scenario load_scenario(const std::filesystem::path& path);

/// Policy document: K_x, K_w, optional K_z, V_vv as nested row-major arrays.
SenderPolicy parse_policy(const nlohmann::json& doc, const Dimensions& dims);
SenderPolicy load_policy(const std::filesystem::path& path, const Dimensions& dims);
nlohmann::json policy_to_json(const SenderPolicy& policy);

}  // namespace privgame
