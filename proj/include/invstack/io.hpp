#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "invstack/game.hpp"
#include "invstack/learn.hpp"

namespace invstack {

using Json = nlohmann::json;

// {"m", "n", "lambda", "U", "V", optional "security": {"w", "b"}, optional "seed"}.
// U and V are written as flat row-major arrays; nested row arrays are also
// accepted on input.
Json game_to_json(const GameInstance& game);
GameInstance game_from_json(const Json& doc);

void save_game(const GameInstance& game, const std::string& path);
GameInstance load_game(const std::string& path);

/// Serialized learner output.
struct LearnerBundle {
  std::string algo;
  std::size_t m = 0;
  std::size_t n = 0;
  double lambda = 0.0;
  Matrix V_hat;
  std::vector<SimplexVector> strategies;
  std::vector<Replacement> replacements;
  std::uint64_t T = 0;
  std::uint64_t seed = 0;
  std::optional<SecurityGameParams> security;
  std::optional<double> phi;
  std::optional<double> rho;
  std::optional<double> rho_running_min;
};

Json bundle_to_json(const LearnerBundle& bundle);
LearnerBundle bundle_from_json(const Json& doc);

void save_bundle(const LearnerBundle& bundle, const std::string& path);
LearnerBundle load_bundle(const std::string& path);

Json read_json_file(const std::string& path);
void write_json_file(const Json& doc, const std::string& path);

}  // namespace invstack
