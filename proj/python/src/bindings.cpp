#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "invstack/equilibria.hpp"
#include "invstack/errors.hpp"
#include "invstack/harness.hpp"
#include "invstack/io.hpp"
#include "invstack/learn.hpp"
#include "invstack/metrics.hpp"

namespace py = pybind11;
using namespace invstack;

namespace {

using Rows = std::vector<std::vector<double>>;

Rows to_rows(const Matrix& a) {
  Rows out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i].assign(a.row(i).begin(), a.row(i).end());
  return out;
}

// Games cross the boundary as JSON text in the same schema the CLI reads.
std::string synth(std::size_t m, std::size_t n, double alpha, double lambda, std::uint64_t seed) {
  return game_to_json(synth_game(m, n, alpha, lambda, seed)).dump();
}

std::string synth_security(std::size_t n, double lambda, std::uint64_t seed) {
  return game_to_json(synth_security_game(n, lambda, seed).first).dump();
}

std::vector<double> quantal(const Rows& v, double lambda, const std::vector<double>& x) {
  return quantal_response(Matrix::from_rows(v), lambda, SimplexVector(x)).vec();
}

py::dict learn(const std::string& game_json, const std::string& algo, std::uint64_t total, std::uint64_t seed,
               double threshold, std::uint64_t min_samples, double pseudo_count) {
  const GameInstance game = game_from_json(Json::parse(game_json));
  LearnerConfig cfg;
  cfg.total_queries = total;
  cfg.seed = seed;
  cfg.concentration_threshold = threshold;
  cfg.min_samples = min_samples;
  cfg.pseudo_count = pseudo_count;
  ResponseOracle oracle(game, seed);
  LearnResult res;
  Matrix v_hat;
  {
    py::gil_scoped_release release;
    if (algo == "pure" || algo == "security") {
      res = pure_learn(oracle, cfg);
    } else if (algo == "pure-exp") {
      res = pure_exp_learn(oracle, cfg);
    } else {
      throw ArgumentError("algo must be pure, pure-exp or security");
    }
    v_hat = algo == "security"
                ? security_fit(res.log.strategies, res.log.smoothed_estimates(pseudo_count), game.lambda)
                      .params.materialize()
                : res.utility.V_hat;
  }
  std::vector<std::vector<double>> strategies;
  for (const auto& s : res.log.strategies) strategies.push_back(s.vec());
  py::dict out;
  out["V_hat"] = to_rows(v_hat);
  out["phi"] = logit_distance(game.V, v_hat);
  out["rho"] = least_nonzero_measure(game, res.log.strategies);
  out["strategies"] = strategies;
  out["replacements"] = res.log.replacements.size();
  return out;
}

py::dict sse(const Rows& u, const Rows& v) {
  const SSEResult r = solve_sse(Matrix::from_rows(u), Matrix::from_rows(v));
  py::dict out;
  out["strategy"] = r.strategy.vec();
  out["action"] = r.action;
  out["value"] = r.value;
  return out;
}

py::dict robust(const Rows& u, const Rows& v_hat, double eps) {
  const RobustStrategy r = robust_strategy(Matrix::from_rows(u), Matrix::from_rows(v_hat), eps);
  py::dict out;
  out["strategy"] = r.strategy.vec();
  out["omega"] = r.omega;
  out["sigma"] = r.sigma;
  out["sse_action"] = r.estimated_sse.action;
  return out;
}

py::list experiment(const std::string& config_json) {
  const ExperimentConfig config = config_from_json(Json::parse(config_json));
  std::vector<ExperimentRecord> records;
  {
    py::gil_scoped_release release;
    records = run_experiment(config);
  }
  py::list out;
  for (const auto& r : records) {
    py::dict row;
    row["study"] = r.study;
    row["param"] = r.param;
    row["seed"] = r.seed;
    row["T"] = r.T;
    row["phi"] = r.phi;
    row["rho"] = r.rho;
    row["replacements"] = r.replacements;
    row["wall_ms"] = r.wall_ms;
    out.append(row);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<RuntimeError>(m, "InvstackError", PyExc_RuntimeError);

  m.def("synth_game", &synth, py::arg("m"), py::arg("n"), py::arg("alpha"), py::arg("lam"), py::arg("seed"));
  m.def("synth_security_game", &synth_security, py::arg("n"), py::arg("lam"), py::arg("seed"));
  m.def("quantal_response", &quantal, py::arg("V"), py::arg("lam"), py::arg("x"));
  m.def("logit_distance", [](const Rows& v, const Rows& v_hat) {
    return logit_distance(Matrix::from_rows(v), Matrix::from_rows(v_hat));
  });
  m.def("learn", &learn, py::arg("game_json"), py::arg("algo"), py::arg("T"), py::arg("seed"),
        py::arg("threshold"), py::arg("min_samples"), py::arg("pseudo_count"));
  m.def("sample_plan", &sample_plan, py::arg("m"), py::arg("n"), py::arg("delta"), py::arg("epsilon"),
        py::arg("rho"), py::arg("c") = 1.0);
  m.def("solve_sse", &sse, py::arg("U"), py::arg("V"));
  m.def("inducibility_gap", [](const Rows& v) { return inducibility_gap(Matrix::from_rows(v)).sigma; });
  m.def("robust_strategy", &robust, py::arg("U"), py::arg("V_hat"), py::arg("eps"));
  m.def("run_experiment", &experiment, py::arg("config_json"));
}
