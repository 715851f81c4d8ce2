#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "invstack/equilibria.hpp"
#include "invstack/errors.hpp"
#include "invstack/harness.hpp"
#include "invstack/io.hpp"
#include "invstack/learn.hpp"
#include "invstack/metrics.hpp"

using namespace invstack;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string join(const SimplexVector& x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ' ';
    out += fmt(x[i]);
  }
  return out;
}

void write_or_print(const Json& doc, const std::string& path) {
  if (path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    write_json_file(doc, path);
  }
}

struct SynthArgs {
  std::size_t m = 10, n = 10;
  double alpha = 0.2, lambda = 8.0;
  std::uint64_t seed = 0;
  bool security = false;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  GameInstance game = a.security ? synth_security_game(a.n, a.lambda, a.seed).first
                                 : synth_game(a.m, a.n, a.alpha, a.lambda, a.seed);
  write_or_print(game_to_json(game), a.out);
  return 0;
}

struct LearnArgs {
  std::string algo = "pure";
  std::uint64_t T = 0;
  std::uint64_t seed = 0;
  std::string game, out, query_log;
  std::size_t k = 0;
  double threshold = 0.95;
  std::uint64_t min_samples = 100;
  double pseudo_count = 1.0;
  std::string method = "gd";
  std::size_t iterations = 100000;
  std::optional<double> recovery_lambda;
};

double running_min_rho(const GameInstance& game, const QueryLog& log) {
  std::vector<SimplexVector> seen;
  for (std::size_t i = 0; i < game.m(); ++i) seen.push_back(SimplexVector::vertex(game.m(), i));
  for (const Replacement& r : log.replacements) seen.push_back(r.new_strategy);
  return least_nonzero_measure(game, seen);
}

int cmd_learn(const LearnArgs& a) {
  const GameInstance game = load_game(a.game);
  LearnerBundle bundle;
  bundle.algo = a.algo;
  bundle.m = game.m();
  bundle.n = game.n();
  bundle.lambda = game.lambda;
  bundle.T = a.T;
  bundle.seed = a.seed;

  if (a.algo == "offline") {
    OfflineOptions opts;
    if (a.method == "adam") {
      opts.method = DescentMethod::kAdam;
    } else if (a.method != "gd") {
      throw ArgumentError("--method must be gd or adam");
    }
    opts.max_iterations = a.iterations;
    const std::size_t k = a.k == 0 ? game.m() : a.k;
    const OfflineFit fit = offline_fit(k, a.T, game, a.seed, opts);
    if (!fit.converged) std::cerr << "warning: offline fit hit the iteration cap\n";
    bundle.V_hat = fit.utility.V_hat;
  } else {
    LearnerConfig cfg;
    cfg.total_queries = a.T;
    cfg.concentration_threshold = a.threshold;
    cfg.min_samples = a.min_samples;
    cfg.pseudo_count = a.pseudo_count;
    cfg.seed = a.seed;
    cfg.record_queries = !a.query_log.empty();
    cfg.recovery_lambda = a.recovery_lambda;
    if (a.algo == "security" && game.m() != game.n()) throw ArgumentError("security fit needs a square game");
    ResponseOracle oracle(game, a.seed);
    LearnResult res;
    if (a.algo == "pure" || a.algo == "security") {
      res = pure_learn(oracle, cfg);
    } else if (a.algo == "pure-exp") {
      res = pure_exp_learn(oracle, cfg);
    } else {
      throw ArgumentError("unknown --algo '" + a.algo + "'");
    }
    if (a.algo == "security") {
      const SecurityFit fit = security_fit(res.log.strategies, res.log.smoothed_estimates(a.pseudo_count), game.lambda);
      if (!fit.converged) std::cerr << "warning: security fit hit the iteration cap\n";
      bundle.security = fit.params;
      bundle.V_hat = fit.params.materialize();
    } else {
      bundle.V_hat = res.utility.V_hat;
    }
    bundle.strategies = res.log.strategies;
    bundle.replacements = res.log.replacements;
    bundle.rho = least_nonzero_measure(game, res.log.strategies);
    bundle.rho_running_min = running_min_rho(game, res.log);
    if (!a.query_log.empty()) write_query_log_csv(res.log.queries, a.query_log);
  }
  bundle.phi = logit_distance(game.V, bundle.V_hat);
  write_or_print(bundle_to_json(bundle), a.out);
  return 0;
}

int cmd_eval(const std::string& game_path, const std::string& result_path) {
  const GameInstance game = load_game(game_path);
  const LearnerBundle bundle = load_bundle(result_path);
  if (bundle.m != game.m() || bundle.n != game.n()) throw ArgumentError("result and game dimensions differ");
  std::cout << fmt(logit_distance(game.V, bundle.V_hat)) << '\n';
  return 0;
}

int cmd_sse(const std::string& game_path) {
  const GameInstance game = load_game(game_path);
  const SSEResult sse = solve_sse(game);
  std::cout << "value " << fmt(sse.value) << '\n';
  std::cout << "action j" << sse.action + 1 << '\n';
  std::cout << "strategy " << join(sse.strategy) << '\n';
  if (game.n() >= 2) std::cout << "sigma " << fmt(inducibility_gap(game.V).sigma) << '\n';
  return 0;
}

int cmd_robust(const std::string& game_path, const std::string& result_path, double eps, const std::string& out) {
  const GameInstance game = load_game(game_path);
  const LearnerBundle bundle = load_bundle(result_path);
  if (bundle.m != game.m() || bundle.n != game.n()) throw ArgumentError("result and game dimensions differ");
  const RobustStrategy r = robust_strategy(game.U, bundle.V_hat, eps);
  Json doc{{"strategy", r.strategy.vec()},
           {"omega", r.omega},
           {"sigma", r.sigma},
           {"epsilon", eps},
           {"estimated_sse", {{"strategy", r.estimated_sse.strategy.vec()},
                              {"action", r.estimated_sse.action},
                              {"value", r.estimated_sse.value}}}};
  write_or_print(doc, out);
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir) {
  ExperimentConfig config = load_config(config_path);
  if (!out_dir.empty()) config.output_dir = out_dir;
  const std::string path = config.csv_path();
  const auto records = run_experiment_to_csv(config, path);
  std::cout << "wrote " << records.size() << " records to " << path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invstack: learn follower payoffs from quantal responses"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "write a synthetic game JSON");
  s->add_option("--m", synth.m, "leader strategies");
  s->add_option("--n", synth.n, "follower actions");
  s->add_option("--alpha", synth.alpha, "diagonal weight in [0, 1]");
  s->add_option("--lambda", synth.lambda, "rationality");
  s->add_option("--seed", synth.seed);
  s->add_flag("--security", synth.security, "security game (uses --n only)");
  s->add_option("--out", synth.out, "output path (stdout if omitted)");

  LearnArgs learn;
  auto* l = app.add_subcommand("learn", "learn V from sampled responses");
  l->add_option("--algo", learn.algo)->check(CLI::IsMember({"pure", "pure-exp", "security", "offline"}));
  l->add_option("--T", learn.T, "total queries")->required();
  l->add_option("--seed", learn.seed);
  l->add_option("--game", learn.game)->required();
  l->add_option("--out", learn.out);
  l->add_option("--query-log", learn.query_log, "CSV of every query");
  l->add_option("--K", learn.k, "offline strategy count (default m)");
  l->add_option("--threshold", learn.threshold);
  l->add_option("--min-samples", learn.min_samples);
  l->add_option("--pseudo-count", learn.pseudo_count);
  l->add_option("--method", learn.method, "offline optimizer: gd | adam");
  l->add_option("--iterations", learn.iterations, "offline iteration cap");
  l->add_option("--recovery-lambda", learn.recovery_lambda, "inversion scale (default: the game's lambda)");

  std::string game_path, result_path, out_path, config_path;
  double eps = 0.0;
  auto* e = app.add_subcommand("eval", "print Phi between a game and a learner result");
  e->add_option("--game", game_path)->required();
  e->add_option("--result", result_path)->required();

  auto* q = app.add_subcommand("sse", "print the SSE and inducibility gap of a game");
  q->add_option("--game", game_path)->required();

  auto* r = app.add_subcommand("robust", "robust leader strategy from a learner result");
  r->add_option("--game", game_path)->required();
  r->add_option("--result", result_path)->required();
  r->add_option("--eps", eps)->required();
  r->add_option("--out", out_path);

  auto* x = app.add_subcommand("experiment", "run an experiment config and write CSV");
  x->add_option("--config", config_path)->required();
  x->add_option("--out", out_path, "output directory (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& err) {
    std::cerr << "error: " << err.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (s->parsed()) return cmd_synth(synth);
    if (l->parsed()) return cmd_learn(learn);
    if (e->parsed()) return cmd_eval(game_path, result_path);
    if (q->parsed()) return cmd_sse(game_path);
    if (r->parsed()) return cmd_robust(game_path, result_path, eps, out_path);
    if (x->parsed()) return cmd_experiment(config_path, out_path);
  } catch (const ArgumentError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  std::cerr << app.help();
  return 2;
}
