#include "invstack/io.hpp"

#include <fstream>
#include <sstream>

#include "invstack/errors.hpp"

namespace invstack {

namespace {

Json matrix_to_json(const Matrix& a) { return Json(a.data()); }

Matrix matrix_from_json(const Json& doc, std::size_t rows, std::size_t cols, const char* name) {
  if (!doc.is_array()) throw ArgumentError(std::string(name) + " must be an array");
  std::vector<double> data;
  data.reserve(rows * cols);
  if (!doc.empty() && doc.front().is_array()) {
    if (doc.size() != rows) throw ArgumentError(std::string(name) + " has the wrong number of rows");
    for (const Json& row : doc) {
      if (!row.is_array() || row.size() != cols) throw ArgumentError(std::string(name) + " has a ragged row");
      for (const Json& v : row) data.push_back(v.get<double>());
    }
  } else {
    for (const Json& v : doc) data.push_back(v.get<double>());
  }
  if (data.size() != rows * cols) throw ArgumentError(std::string(name) + " does not hold m * n entries");
  return Matrix(rows, cols, std::move(data));
}

Json simplex_list_to_json(const std::vector<SimplexVector>& xs) {
  Json out = Json::array();
  for (const SimplexVector& x : xs) out.push_back(x.vec());
  return out;
}

std::vector<SimplexVector> simplex_list_from_json(const Json& doc) {
  std::vector<SimplexVector> out;
  for (const Json& x : doc) out.emplace_back(x.get<std::vector<double>>());
  return out;
}

Json security_to_json(const SecurityGameParams& p) { return Json{{"w", p.w}, {"b", p.b}}; }

SecurityGameParams security_from_json(const Json& doc) {
  SecurityGameParams p;
  p.w = doc.at("w").get<std::vector<double>>();
  p.b = doc.at("b").get<std::vector<double>>();
  if (p.w.size() != p.b.size()) throw ArgumentError("security w and b must have equal length");
  return p;
}

template <typename F>
auto wrap_json_errors(F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("malformed JSON document: ") + e.what());
  }
}

}  // namespace

Json game_to_json(const GameInstance& game) {
  Json doc{{"m", game.m()}, {"n", game.n()}, {"lambda", game.lambda}, {"U", matrix_to_json(game.U)},
           {"V", matrix_to_json(game.V)}};
  if (game.security) doc["security"] = security_to_json(*game.security);
  if (game.seed) doc["seed"] = *game.seed;
  return doc;
}

GameInstance game_from_json(const Json& doc) {
  return wrap_json_errors([&] {
    const auto m = doc.at("m").get<std::size_t>();
    const auto n = doc.at("n").get<std::size_t>();
    if (m == 0 || n == 0) throw ArgumentError("game dimensions must be positive");
    GameInstance game(matrix_from_json(doc.at("U"), m, n, "U"), matrix_from_json(doc.at("V"), m, n, "V"),
                      doc.at("lambda").get<double>());
    if (doc.contains("security")) game.security = security_from_json(doc.at("security"));
    if (doc.contains("seed")) game.seed = doc.at("seed").get<std::uint64_t>();
    game.validate();
    return game;
  });
}

void save_game(const GameInstance& game, const std::string& path) { write_json_file(game_to_json(game), path); }

GameInstance load_game(const std::string& path) { return game_from_json(read_json_file(path)); }

Json bundle_to_json(const LearnerBundle& b) {
  Json reps = Json::array();
  for (const Replacement& r : b.replacements) {
    reps.push_back({{"round", r.round},
                    {"index", r.index},
                    {"old", r.old_strategy.vec()},
                    {"new", r.new_strategy.vec()},
                    {"discarded_counts", r.discarded.counts}});
  }
  Json doc{{"algo", b.algo},
           {"m", b.m},
           {"n", b.n},
           {"lambda", b.lambda},
           {"V_hat", matrix_to_json(b.V_hat)},
           {"strategies", simplex_list_to_json(b.strategies)},
           {"replacements", reps},
           {"T", b.T},
           {"seed", b.seed}};
  if (b.security) doc["security"] = security_to_json(*b.security);
  if (b.phi) doc["phi"] = *b.phi;
  if (b.rho) doc["rho"] = *b.rho;
  if (b.rho_running_min) doc["rho_running_min"] = *b.rho_running_min;
  return doc;
}

LearnerBundle bundle_from_json(const Json& doc) {
  return wrap_json_errors([&] {
    LearnerBundle b;
    b.algo = doc.value("algo", std::string{});
    b.m = doc.at("m").get<std::size_t>();
    b.n = doc.at("n").get<std::size_t>();
    b.lambda = doc.value("lambda", 0.0);
    b.V_hat = matrix_from_json(doc.at("V_hat"), b.m, b.n, "V_hat");
    if (doc.contains("strategies")) b.strategies = simplex_list_from_json(doc.at("strategies"));
    if (doc.contains("replacements")) {
      for (const Json& r : doc.at("replacements")) {
        Replacement rep;
        rep.round = r.at("round").get<std::uint64_t>();
        rep.index = r.at("index").get<std::size_t>();
        rep.old_strategy = SimplexVector(r.at("old").get<std::vector<double>>());
        rep.new_strategy = SimplexVector(r.at("new").get<std::vector<double>>());
        if (r.contains("discarded_counts")) {
          rep.discarded = EmpiricalDistribution(r.at("discarded_counts").get<std::vector<std::uint64_t>>());
        }
        b.replacements.push_back(std::move(rep));
      }
    }
    b.T = doc.value("T", std::uint64_t{0});
    b.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("security")) b.security = security_from_json(doc.at("security"));
    if (doc.contains("phi")) b.phi = doc.at("phi").get<double>();
    if (doc.contains("rho")) b.rho = doc.at("rho").get<double>();
    if (doc.contains("rho_running_min")) b.rho_running_min = doc.at("rho_running_min").get<double>();
    return b;
  });
}

void save_bundle(const LearnerBundle& bundle, const std::string& path) {
  write_json_file(bundle_to_json(bundle), path);
}

LearnerBundle load_bundle(const std::string& path) { return bundle_from_json(read_json_file(path)); }

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ArgumentError(path + ": " + e.what());
  }
}

void write_json_file(const Json& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace invstack
