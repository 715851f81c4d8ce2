#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "invstack/errors.hpp"
#include "invstack/io.hpp"

using namespace invstack;
namespace fs = std::filesystem;

namespace {

fs::path temp(const char* name) { return fs::temp_directory_path() / name; }

}  // namespace

TEST_CASE("game JSON round trip") {
  auto [g, p] = synth_security_game(4, 8.0, 3);
  const auto path = temp("invstack_game.json");
  save_game(g, path.string());
  const GameInstance back = load_game(path.string());
  CHECK(back.U == g.U);
  CHECK(back.V == g.V);
  CHECK(back.lambda == g.lambda);
  REQUIRE(back.security.has_value());
  CHECK(back.security->w == p.w);
  CHECK(back.seed == g.seed);
  fs::remove(path);
}

TEST_CASE("game JSON accepts nested rows and rejects bad shapes") {
  const Json nested = Json::parse(R"({"m":2,"n":2,"lambda":8,"U":[[100,0.9],[-99,1.1]],"V":[[0.9,1],[0.9,1]]})");
  const GameInstance g = game_from_json(nested);
  CHECK(g.U(1, 0) == -99.0);
  CHECK(g.V(0, 1) == 1.0);

  CHECK_THROWS_AS(game_from_json(Json::parse(R"({"m":2,"n":2,"lambda":8,"U":[1,2,3],"V":[1,2,3,4]})")),
                  ArgumentError);
  CHECK_THROWS_AS(game_from_json(Json::parse(R"({"m":2,"n":2,"lambda":8,"U":[[1,2],[3]],"V":[1,2,3,4]})")),
                  ArgumentError);
  CHECK_THROWS_AS(game_from_json(Json::parse(R"({"m":2,"n":2,"U":[1,2,3,4],"V":[1,2,3,4]})")), ArgumentError);
  CHECK_THROWS_AS(game_from_json(Json::parse(R"({"m":2,"n":2,"lambda":-1,"U":[1,2,3,4],"V":[1,2,3,4]})")),
                  ArgumentError);
  CHECK_THROWS_AS(game_from_json(Json::parse(R"({"m":2,"n":2,"lambda":1,"U":[1,2,3,"x"],"V":[1,2,3,4]})")),
                  ArgumentError);
}

TEST_CASE("file errors") {
  CHECK_THROWS_AS(load_game((temp("invstack_missing_dir") / "none.json").string()), IoError);
  const auto path = temp("invstack_bad.json");
  std::ofstream(path) << "{not json";
  CHECK_THROWS_AS(read_json_file(path.string()), ArgumentError);
  fs::remove(path);
  CHECK_THROWS_AS(write_json_file(Json::object(), "/nonexistent-dir/x.json"), IoError);
}

TEST_CASE("learner bundle round trip") {
  LearnerBundle b;
  b.algo = "pure-exp";
  b.m = 2;
  b.n = 3;
  b.lambda = 8.0;
  b.V_hat = Matrix::from_rows({{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}});
  b.strategies = {SimplexVector({0.75, 0.25}), SimplexVector::vertex(2, 1)};
  b.replacements.push_back(
      {120, 0, SimplexVector::vertex(2, 0), SimplexVector({0.75, 0.25}), EmpiricalDistribution({97, 2, 1})});
  b.T = 1000;
  b.seed = 9;
  b.phi = 0.01;
  b.rho_running_min = 0.002;
  const LearnerBundle back = bundle_from_json(bundle_to_json(b));
  CHECK(back.algo == b.algo);
  CHECK(back.V_hat == b.V_hat);
  CHECK(back.strategies == b.strategies);
  REQUIRE(back.replacements.size() == 1);
  CHECK(back.replacements[0].round == 120);
  CHECK(back.replacements[0].new_strategy == b.replacements[0].new_strategy);
  CHECK(back.replacements[0].discarded.counts == b.replacements[0].discarded.counts);
  CHECK(back.replacements[0].discarded.total == 100);
  CHECK(back.T == 1000);
  CHECK(back.seed == 9);
  CHECK(back.phi == 0.01);
  CHECK_FALSE(back.rho.has_value());
  CHECK(back.rho_running_min == 0.002);

  const Json doc = bundle_to_json(b);
  CHECK(doc["V_hat"].size() == 6);
  CHECK(doc.contains("phi"));
}
