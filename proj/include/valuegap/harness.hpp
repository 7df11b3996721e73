#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "valuegap/random.hpp"

namespace valuegap {

enum class ExperimentKind { Fig1Quad, Fig1Lin, Fig1Diag, Fig2Offline, Fig2Online, Fig3Ratio };

std::string_view experiment_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment(std::string_view name);
std::span<const ExperimentKind> all_experiments();

// Ratio experiments report MSE(model-free)/MSE(model-based); the others
// report both MSEs.
bool is_ratio_experiment(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Fig3Ratio;
  std::vector<int> dims;
  long n = 1000;
  int reps = 100;
  double gamma = 0.9;
  double sigma = 1.0;
  double lambda = 0.9;       // fig3 dynamics A = λI
  double radius = 0.9;       // fig1 spectral radius of random dynamics
  int states_per_component = 5;  // fig2 N
  RngSeed base_seed = 0;
  unsigned threads = 0;      // 0 = available parallelism

  // Caption settings of the corresponding figure.
  static ExperimentConfig defaults(ExperimentKind kind);

  // Throws ValidationError: reps ≥ 2, dims nonempty, positive and strictly
  // increasing, n ≥ 1, gamma ∈ (0,1), sigma > 0, λ and radius ∈ (0,1), N ≥ 2.
  void validate() const;
};

struct Interval {
  double lb = 0.0;
  double point = 0.0;
  double ub = 0.0;
};

struct ExperimentRow {
  int d = 0;
  Interval mse_mf;
  Interval mse_mb;
  Interval ratio;
  std::optional<double> ratio_theoretical;
  int successes = 0;
  int failures = 0;
  // Successful replications whose model-based fit had to impute unvisited
  // tabular states.
  int imputed = 0;
  bool valid = false;  // at least two successes and failures ≤ 10% of reps
  // Per-replication squared errors of the successful replications, in
  // replication order.
  std::vector<double> errors_mf;
  std::vector<double> errors_mb;
};

struct ReplicationResult {
  bool ok = false;
  double error_mf = 0.0;
  double error_mb = 0.0;
  // Linear experiments only: Δβᵀ P∞ Δβ, the value-space MSE under the
  // stationary state distribution.
  double stationary_error_mf = 0.0;
  double stationary_error_mb = 0.0;
  bool imputed = false;
  std::string failure;
};

// Runs one replication per seed for dimension d. The fig2 instance is drawn
// from cfg.base_seed and shared by every replication; fig1 instances are drawn
// from each replication seed.
std::vector<ReplicationResult> run_replications(const ExperimentConfig& cfg, int d,
                                                std::span<const RngSeed> seeds);

using ProgressCallback = std::function<void(const ExperimentRow&)>;

// Replication r of every row uses seed base_seed + r. Aggregation follows
// replication order, so results do not depend on the thread count.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg,
                                          const ProgressCallback& progress = {});

// Mean ± 1.96·s/√m.
Interval confidence_interval(std::span<const double> samples);

// Ratio of means, half-width from first-order error propagation treating the
// two means as independent normals.
Interval ratio_interval(std::span<const double> numerator, std::span<const double> denominator);

std::string format_csv(ExperimentKind kind, std::span<const ExperimentRow> rows);
void write_csv(ExperimentKind kind, std::span<const ExperimentRow> rows,
               const std::filesystem::path& path);

// Sidecar path: same directory and stem, extension ".meta.txt".
std::filesystem::path metadata_path(const std::filesystem::path& csv_path);
void write_metadata(const ExperimentConfig& cfg, std::span<const ExperimentRow> rows,
                    double wall_seconds, const std::filesystem::path& path);

}  // namespace valuegap
