#include "invstack/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "invstack/errors.hpp"
#include "invstack/metrics.hpp"

namespace invstack {

namespace {

struct StudyName {
  StudyKind kind;
  const char* name;
};

constexpr StudyName kStudies[] = {
    {StudyKind::kSizeSweep, "size-sweep"},
    {StudyKind::kLambdaSweep, "lambda-sweep"},
    {StudyKind::kAlphaSweep, "alpha-sweep"},
    {StudyKind::kOfflineCompare, "offline-compare"},
    {StudyKind::kSecurityStructured, "security-structured"},
    {StudyKind::kPureVsPureExp, "pure-vs-pureexp"},
    {StudyKind::kRhoStudy, "rho-study"},
};

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string fmt_10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Resolved {
  std::size_t m, n, k;
  double alpha, lambda;
};

Resolved resolve(const ExperimentConfig& c, const GridPoint& p) {
  return {p.m.value_or(c.m), p.n.value_or(c.n), p.k.value_or(c.k), p.alpha.value_or(c.alpha),
          p.lambda.value_or(c.lambda)};
}

LearnerConfig learner_config(const ExperimentConfig& c, std::uint64_t seed, std::uint64_t total) {
  LearnerConfig lc;
  lc.total_queries = total;
  lc.concentration_threshold = c.concentration_threshold;
  lc.min_samples = c.min_samples;
  lc.pseudo_count = c.pseudo_count;
  lc.seed = seed;
  return lc;
}

using Clock = std::chrono::steady_clock;

class CellRunner {
 public:
  CellRunner(const ExperimentConfig& config, const GridPoint& point, std::uint64_t seed)
      : config_(config), point_(point), r_(resolve(config, point)), seed_(seed), label_(point_label(config, point)),
        start_(Clock::now()) {}

  std::vector<ExperimentRecord> run() {
    switch (config_.study) {
      case StudyKind::kSizeSweep:
      case StudyKind::kLambdaSweep:
      case StudyKind::kAlphaSweep:
      case StudyKind::kRhoStudy:
        run_pure();
        break;
      case StudyKind::kPureVsPureExp:
        run_pure();
        run_pure_exp();
        break;
      case StudyKind::kSecurityStructured:
        run_security();
        break;
      case StudyKind::kOfflineCompare:
        run_offline();
        break;
    }
    // Order: checkpoint first, then algorithm label.
    std::stable_sort(out_.begin(), out_.end(),
                     [](const ExperimentRecord& a, const ExperimentRecord& b) { return a.T < b.T; });
    return std::move(out_);
  }

 private:
  void emit(const std::string& suffix, std::uint64_t t, double phi, double rho, std::size_t reps) {
    ExperimentRecord rec;
    rec.study = to_string(config_.study);
    rec.param = suffix.empty() ? label_ : label_ + ";algo=" + suffix;
    rec.seed = seed_;
    rec.T = t;
    rec.phi = phi;
    rec.rho = rho;
    rec.replacements = reps;
    if (config_.record_wall_time) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    }
    out_.push_back(std::move(rec));
  }

  std::string algo_suffix(const char* name) const {
    return config_.study == StudyKind::kPureVsPureExp ? name : "";
  }

  void run_pure() {
    const GameInstance game = synth_game(r_.m, r_.n, r_.alpha, r_.lambda, seed_);
    run_round_robin(game, false, algo_suffix("pure"));
  }

  void run_pure_exp() {
    const GameInstance game = synth_game(r_.m, r_.n, r_.alpha, r_.lambda, seed_);
    run_round_robin(game, true, "pure-exp");
  }

  void run_round_robin(const GameInstance& game, bool explore, const std::string& suffix) {
    ResponseOracle oracle(game, seed_);
    const LearnerConfig lc = learner_config(config_, seed_, config_.checkpoints.back());
    auto on_checkpoint = [&](std::uint64_t t, const QueryLog& log) {
      const RecoveredUtility est = recover_from_log(log, game.lambda, config_.pseudo_count);
      emit(suffix, t, logit_distance(game.V, est.V_hat), least_nonzero_measure(game, log.strategies),
           log.replacements.size());
    };
    if (explore) {
      pure_exp_learn(oracle, lc, config_.checkpoints, on_checkpoint);
    } else {
      pure_learn(oracle, lc, config_.checkpoints, on_checkpoint);
    }
  }

  void run_security() {
    const auto [game, params] = synth_security_game(r_.n, r_.lambda, seed_);
    ResponseOracle oracle(game, seed_);
    const LearnerConfig lc = learner_config(config_, seed_, config_.checkpoints.back());
    auto on_checkpoint = [&](std::uint64_t t, const QueryLog& log) {
      const double rho = least_nonzero_measure(game, log.strategies);
      const RecoveredUtility est = recover_from_log(log, game.lambda, config_.pseudo_count);
      emit("pure", t, logit_distance(game.V, est.V_hat), rho, 0);
      const SecurityFit fit = security_fit(log.strategies, log.smoothed_estimates(config_.pseudo_count), game.lambda);
      emit("security", t, logit_distance(game.V, fit.params.materialize()), rho, 0);
    };
    pure_learn(oracle, lc, config_.checkpoints, on_checkpoint);
  }

  void run_offline() {
    const GameInstance game = synth_game(r_.m, r_.n, r_.alpha, r_.lambda, seed_);
    if (r_.k == r_.m) {
      run_round_robin(game, false, "");
      return;
    }
    for (std::uint64_t t : config_.checkpoints) {
      const OfflineFit fit = offline_fit(r_.k, t, game, seed_, config_.offline);
      emit("", t, logit_distance(game.V, fit.utility.V_hat), 0.0, 0);
    }
  }

  const ExperimentConfig& config_;
  const GridPoint& point_;
  Resolved r_;
  std::uint64_t seed_;
  std::string label_;
  Clock::time_point start_;
  std::vector<ExperimentRecord> out_;
};

}  // namespace

std::string to_string(StudyKind kind) {
  for (const StudyName& s : kStudies) {
    if (s.kind == kind) return s.name;
  }
  return "unknown";
}

StudyKind study_from_string(const std::string& name) {
  for (const StudyName& s : kStudies) {
    if (name == s.name) return s.kind;
  }
  throw ArgumentError("unknown study kind '" + name + "'");
}

std::string point_label(const ExperimentConfig& config, const GridPoint& point) {
  const Resolved r = resolve(config, point);
  if (config.study == StudyKind::kSecurityStructured) {
    return "n=" + std::to_string(r.n) + ";lambda=" + fmt_g(r.lambda);
  }
  std::string label = "m=" + std::to_string(r.m) + ";n=" + std::to_string(r.n) + ";alpha=" + fmt_g(r.alpha) +
                      ";lambda=" + fmt_g(r.lambda);
  if (config.study == StudyKind::kOfflineCompare) label += ";K=" + std::to_string(r.k);
  return label;
}

void ExperimentConfig::validate() const {
  if (grid.empty()) throw ArgumentError("experiment grid must be non-empty");
  if (seeds.empty()) throw ArgumentError("experiment needs at least one seed");
  if (checkpoints.empty()) throw ArgumentError("experiment needs at least one checkpoint");
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] == 0) throw ArgumentError("checkpoints must be positive");
    if (k > 0 && checkpoints[k] <= checkpoints[k - 1]) throw ArgumentError("checkpoints must be strictly increasing");
  }
  if (!full_scale && checkpoints.back() > kDeskScaleCap) {
    throw ArgumentError("checkpoints above 10^6 require \"full_scale\": true");
  }
  if (threads == 0) throw ArgumentError("threads must be at least 1");
  for (const GridPoint& p : grid) {
    const Resolved r = resolve(*this, p);
    if (r.m < 2 || r.n < 2) throw ArgumentError("grid point needs m, n >= 2");
    if (!(r.alpha >= 0.0 && r.alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
    if (!(r.lambda > 0.0)) throw ArgumentError("lambda must be positive for recovery");
    if (checkpoints.front() < r.m) throw ArgumentError("first checkpoint must be at least m");
    if (study == StudyKind::kOfflineCompare) {
      if (r.k < r.m) throw ArgumentError("offline K must be at least m");
      if (checkpoints.front() < r.k) throw ArgumentError("offline checkpoints must be at least K");
    }
  }
  if (!(concentration_threshold > 0.5 && concentration_threshold < 1.0)) {
    throw ArgumentError("concentration threshold must lie in (1/2, 1)");
  }
  if (!(pseudo_count >= 0.0)) throw ArgumentError("pseudo-count must be nonnegative");
}

std::string ExperimentConfig::csv_path() const { return output_dir + "/" + to_string(study) + ".csv"; }

ExperimentConfig config_from_json(const Json& doc) {
  try {
    ExperimentConfig c;
    c.study = study_from_string(doc.at("study").get<std::string>());
    if (doc.contains("base")) {
      const Json& b = doc.at("base");
      c.m = b.value("m", c.m);
      c.n = b.value("n", c.n);
      c.alpha = b.value("alpha", c.alpha);
      c.lambda = b.value("lambda", c.lambda);
      c.k = b.value("K", c.k);
    }
    for (const Json& p : doc.at("grid")) {
      GridPoint g;
      if (p.contains("m")) g.m = p.at("m").get<std::size_t>();
      if (p.contains("n")) g.n = p.at("n").get<std::size_t>();
      if (p.contains("K")) g.k = p.at("K").get<std::size_t>();
      if (p.contains("alpha")) g.alpha = p.at("alpha").get<double>();
      if (p.contains("lambda")) g.lambda = p.at("lambda").get<double>();
      c.grid.push_back(g);
    }
    if (doc.contains("seeds")) c.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    c.checkpoints = doc.at("checkpoints").get<std::vector<std::uint64_t>>();
    c.output_dir = doc.value("output", c.output_dir);
    if (doc.contains("learner")) {
      const Json& l = doc.at("learner");
      c.concentration_threshold = l.value("threshold", c.concentration_threshold);
      c.min_samples = l.value("min_samples", c.min_samples);
      c.pseudo_count = l.value("pseudo_count", c.pseudo_count);
    }
    if (doc.contains("offline")) {
      const Json& o = doc.at("offline");
      const std::string method = o.value("method", std::string("gd"));
      if (method == "adam") {
        c.offline.method = DescentMethod::kAdam;
      } else if (method == "gd") {
        c.offline.method = DescentMethod::kGradientArmijo;
      } else {
        throw ArgumentError("offline method must be \"gd\" or \"adam\"");
      }
      c.offline.max_iterations = o.value("iterations", c.offline.max_iterations);
      c.offline.pseudo_count = o.value("pseudo_count", c.offline.pseudo_count);
    }
    c.threads = doc.value("threads", c.threads);
    c.record_wall_time = doc.value("record_wall_time", c.record_wall_time);
    c.full_scale = doc.value("full_scale", c.full_scale);
    c.validate();
    return c;
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("malformed experiment config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(read_json_file(path)); }

namespace {

// Runs cells on `threads` workers, handing each finished cell to `sink` in
// (point, seed) order.
template <typename Sink>
void run_cells(const ExperimentConfig& config, Sink&& sink) {
  config.validate();
  struct Cell {
    const GridPoint* point;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const GridPoint& p : config.grid)
    for (std::uint64_t s : config.seeds) cells.push_back({&p, s});

  std::vector<std::optional<std::vector<ExperimentRecord>>> done(cells.size());
  std::exception_ptr failure;
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size() || abort) return;
      try {
        auto recs = CellRunner(config, *cells[idx].point, cells[idx].seed).run();
        std::lock_guard lock(mu);
        done[idx] = std::move(recs);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        abort = true;
      }
      cv.notify_all();
    }
  };

  const unsigned nthreads = std::min<std::size_t>(config.threads, cells.size());
  std::vector<std::thread> pool;
  if (nthreads > 1) {
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  std::size_t flushed = 0;
  if (pool.empty()) {
    for (; flushed < cells.size(); ++flushed) {
      sink(CellRunner(config, *cells[flushed].point, cells[flushed].seed).run());
    }
    return;
  }
  {
    std::unique_lock lock(mu);
    while (flushed < cells.size()) {
      cv.wait(lock, [&] { return (done[flushed].has_value()) || failure; });
      if (!done[flushed]) break;
      auto recs = std::move(*done[flushed]);
      ++flushed;
      lock.unlock();
      sink(std::move(recs));
      lock.lock();
    }
  }
  for (std::thread& t : pool) t.join();
  // Flush anything that finished in order before the failure.
  while (flushed < cells.size() && done[flushed]) sink(std::move(*done[flushed++]));
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config) {
  std::vector<ExperimentRecord> all;
  run_cells(config, [&](std::vector<ExperimentRecord> recs) {
    for (ExperimentRecord& r : recs) all.push_back(std::move(r));
  });
  return all;
}

std::string format_csv_row(const ExperimentRecord& r) {
  std::ostringstream os;
  os << r.study << ',' << r.param << ',' << r.seed << ',' << r.T << ',' << fmt_10(r.phi) << ',' << fmt_10(r.rho)
     << ',' << r.replacements << ',' << fmt_10(r.wall_ms);
  return os.str();
}

std::vector<ExperimentRecord> run_experiment_to_csv(const ExperimentConfig& config, const std::string& path) {
  config.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << kCsvHeader << '\n';
  out.flush();
  std::vector<ExperimentRecord> all;
  run_cells(config, [&](std::vector<ExperimentRecord> recs) {
    for (ExperimentRecord& r : recs) {
      out << format_csv_row(r) << '\n';
      all.push_back(std::move(r));
    }
    out.flush();
    if (!out) throw IoError("failed writing " + path);
  });
  return all;
}

void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << kCsvHeader << '\n';
  for (const ExperimentRecord& r : records) out << format_csv_row(r) << '\n';
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

std::vector<ExperimentRecord> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ArgumentError(path + ": unexpected CSV header");
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8) throw ArgumentError(path + ": malformed CSV row");
    ExperimentRecord r;
    r.study = f[0];
    r.param = f[1];
    r.seed = std::stoull(f[2]);
    r.T = std::stoull(f[3]);
    r.phi = std::stod(f[4]);
    r.rho = std::stod(f[5]);
    r.replacements = std::stoull(f[6]);
    r.wall_ms = std::stod(f[7]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace invstack
