#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "invstack/io.hpp"
#include "invstack/learn.hpp"

namespace invstack {

enum class StudyKind {
  kSizeSweep,
  kLambdaSweep,
  kAlphaSweep,
  kOfflineCompare,
  kSecurityStructured,
  kPureVsPureExp,
  kRhoStudy,
};

std::string to_string(StudyKind kind);
StudyKind study_from_string(const std::string& name);

/// One cell coordinate of a study. Unset fields inherit the config's base.
struct GridPoint {
  std::optional<std::size_t> m, n, k;
  std::optional<double> alpha, lambda;
};

struct ExperimentConfig {
  StudyKind study = StudyKind::kLambdaSweep;
  // Defaults follow the m = n = 10, alpha = 0.2, lambda = 8 setting.
  std::size_t m = 10;
  std::size_t n = 10;
  double alpha = 0.2;
  double lambda = 8.0;
  std::size_t k = 1000;  // offline strategy count
  std::vector<GridPoint> grid;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<std::uint64_t> checkpoints;
  std::string output_dir = ".";
  double concentration_threshold = 0.95;
  std::uint64_t min_samples = 100;
  double pseudo_count = 1.0;
  OfflineOptions offline;
  unsigned threads = 1;
  bool record_wall_time = false;
  // Permits checkpoints above the desk-scale cap of 10^6.
  bool full_scale = false;

  void validate() const;
  std::string csv_path() const;
};

inline constexpr std::uint64_t kDeskScaleCap = 1000000;

ExperimentConfig config_from_json(const Json& doc);
ExperimentConfig load_config(const std::string& path);

struct ExperimentRecord {
  std::string study;
  std::string param;
  std::uint64_t seed = 0;
  std::uint64_t T = 0;
  double phi = 0.0;
  double rho = 0.0;
  std::size_t replacements = 0;
  double wall_ms = 0.0;
};

/// Runs every (grid point, seed) cell and returns records ordered by
/// (point, seed, checkpoint, algorithm). Deterministic given the config.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config);

/// Runs the study and streams records to `path` in deterministic order; on a
/// failure, rows for the cells completed so far are already on disk.
std::vector<ExperimentRecord> run_experiment_to_csv(const ExperimentConfig& config, const std::string& path);

inline constexpr const char* kCsvHeader = "study,param,seed,T,phi,rho,replacements,wall_ms";

std::string format_csv_row(const ExperimentRecord& r);
void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path);
std::vector<ExperimentRecord> read_csv(const std::string& path);

// Label for a grid point, e.g. "m=10;n=10;alpha=0.2;lambda=8".
std::string point_label(const ExperimentConfig& config, const GridPoint& point);

}  // namespace invstack
