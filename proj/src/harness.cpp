#include "valuegap/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "valuegap/asymptotics.hpp"
#include "valuegap/csv.hpp"
#include "valuegap/decoupled.hpp"
#include "valuegap/errors.hpp"
#include "valuegap/estimators.hpp"
#include "valuegap/linear_systems.hpp"

namespace valuegap {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr std::array<ExperimentKind, 6> kExperiments = {
    ExperimentKind::Fig1Quad,    ExperimentKind::Fig1Lin,    ExperimentKind::Fig1Diag,
    ExperimentKind::Fig2Offline, ExperimentKind::Fig2Online, ExperimentKind::Fig3Ratio};

// Seed streams derived from a replication seed (or, for fig2, the base seed).
constexpr std::uint64_t kInstanceStream = 0;
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kFig2InstanceStream = 0xf162;

bool is_fig2(ExperimentKind k) {
  return k == ExperimentKind::Fig2Offline || k == ExperimentKind::Fig2Online;
}

double squared_error(const VectorXd& est, const VectorXd& truth) {
  return (est - truth).squaredNorm();
}

double stationary_error(const VectorXd& est, const VectorXd& truth, const MatrixXd& p_inf) {
  const VectorXd delta = est - truth;
  return delta.dot(p_inf * delta);
}

ReplicationResult linear_replication(const ExperimentConfig& cfg, int d, RngSeed seed) {
  const RngSeed instance_seed = derive_seed(seed, kInstanceStream);
  const RngSeed data_seed = derive_seed(seed, kDataStream);
  const VectorXd ones = VectorXd::Ones(d);
  ReplicationResult out;

  if (cfg.kind == ExperimentKind::Fig1Quad) {
    const MatrixXd a = random_stable_matrix(d, cfg.radius, instance_seed);
    const MatrixXd q = MatrixXd::Identity(d, d);
    const LinearSystem sys = LinearSystem::lqr(a, q, cfg.sigma, cfg.gamma);
    const MatrixXd truth = lqr_value_matrix(a, q, cfg.gamma).p;
    const TransitionDataset data = simulate_linear(sys, cfg.n, data_seed);
    const MatrixXd mf = lstd_quadratic(data, cfg.gamma).quadratic().p;
    const MatrixXd mb = mb_lqr(data, cfg.gamma).quadratic().p;
    out.error_mf = (mf - truth).squaredNorm();
    out.error_mb = (mb - truth).squaredNorm();
    out.ok = true;
    return out;
  }

  LinearSystem sys = cfg.kind == ExperimentKind::Fig1Lin
                         ? LinearSystem::linear(random_stable_matrix(d, cfg.radius, instance_seed),
                                                ones, cfg.sigma, cfg.gamma)
                     : cfg.kind == ExperimentKind::Fig1Diag
                         ? LinearSystem::diagonal(
                               random_stable_diagonal(d, cfg.radius, instance_seed), ones,
                               cfg.sigma, cfg.gamma)
                         : LinearSystem::diagonal(VectorXd::Constant(d, cfg.lambda), ones,
                                                  cfg.sigma, cfg.gamma);
  const DynamicsConstraint constraint = cfg.kind == ExperimentKind::Fig1Lin
                                            ? DynamicsConstraint::Unconstrained
                                            : DynamicsConstraint::Diagonal;
  const VectorXd truth = true_beta(sys.dynamics(), sys.theta(), cfg.gamma);
  const TransitionDataset data = simulate_linear(sys, cfg.n, data_seed);
  const VectorXd mf = lstd_linear(data, cfg.gamma).linear().beta;
  const VectorXd mb = mb_linear(data, cfg.gamma, constraint).linear().beta;
  const MatrixXd p_inf = stationary_covariance(sys.dynamics(), cfg.sigma);
  out.error_mf = squared_error(mf, truth);
  out.error_mb = squared_error(mb, truth);
  out.stationary_error_mf = stationary_error(mf, truth, p_inf);
  out.stationary_error_mb = stationary_error(mb, truth, p_inf);
  out.ok = true;
  return out;
}

double online_error(const SeparableValue& delta, const TransitionDataset& data) {
  const Eigen::MatrixXi& states = data.tabular_states();
  double total = 0.0;
  for (Index t = 0; t < data.size(); ++t) {
    const double e = delta.evaluate(states.col(t));
    total += e * e;
  }
  return total / static_cast<double>(data.size());
}

ReplicationResult decoupled_replication(const ExperimentConfig& cfg, const DecoupledMRP& inst,
                                        const SeparableValue& truth, RngSeed seed) {
  const TransitionDataset data = simulate_decoupled(inst, cfg.n, derive_seed(seed, kDataStream));
  const std::vector<int> sizes = inst.sizes();
  const ValueEstimate mf = lstd_separable(data, sizes, cfg.gamma);
  const ValueEstimate mb = mb_decoupled(data, sizes, cfg.gamma);
  // Errors are measured on the value that includes the start-state reward,
  // V + r. Both estimators share the reward regression r̂, so it is added
  // back to each.
  const SeparableValue reward_hat = fit_separable_reward(data, sizes);
  SeparableValue dmf = mf.separable() - truth;
  SeparableValue dmb = mb.separable() - truth;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const VectorXd dr = reward_hat.tables[i] - inst.component(static_cast<Index>(i)).reward();
    dmf.tables[i] += dr;
    dmb.tables[i] += dr;
  }
  ReplicationResult out;
  if (cfg.kind == ExperimentKind::Fig2Offline) {
    out.error_mf = mse_uniform_separable(dmf);
    out.error_mb = mse_uniform_separable(dmb);
  } else {
    out.error_mf = online_error(dmf, data);
    out.error_mb = online_error(dmb, data);
  }
  out.imputed = mb.imputed_unvisited;
  out.ok = true;
  return out;
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

double sample_mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x, double mean) {
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

constexpr double kZ95 = 1.96;

Interval nan_interval() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return Interval{nan, nan, nan};
}

std::string join_dims(const std::vector<int>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(dims[i]);
  }
  return s;
}

}  // namespace

std::string_view experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Fig1Quad: return "fig1-quad";
    case ExperimentKind::Fig1Lin: return "fig1-lin";
    case ExperimentKind::Fig1Diag: return "fig1-diag";
    case ExperimentKind::Fig2Offline: return "fig2-offline";
    case ExperimentKind::Fig2Online: return "fig2-online";
    case ExperimentKind::Fig3Ratio: return "fig3-ratio";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment(std::string_view name) {
  for (ExperimentKind k : kExperiments) {
    if (experiment_name(k) == name) return k;
  }
  return std::nullopt;
}

std::span<const ExperimentKind> all_experiments() { return kExperiments; }

bool is_ratio_experiment(ExperimentKind kind) {
  return is_fig2(kind) || kind == ExperimentKind::Fig3Ratio;
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.n = 1000;
  c.gamma = 0.9;
  c.sigma = 1.0;
  c.base_seed = 1;
  switch (kind) {
    case ExperimentKind::Fig1Quad:
      c.dims = {2, 5, 10, 15, 20};
      c.reps = 80;
      break;
    case ExperimentKind::Fig1Lin:
    case ExperimentKind::Fig1Diag:
      c.dims = {5, 10, 20, 30, 40, 50};
      c.reps = 100;
      break;
    case ExperimentKind::Fig2Offline:
    case ExperimentKind::Fig2Online:
      c.dims = {1, 2, 5, 10, 20, 50, 100, 200};
      c.reps = 80;
      break;
    case ExperimentKind::Fig3Ratio:
      c.dims = {5, 10, 20, 30, 40, 50};
      c.reps = 100;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (reps < 2) throw ValidationError("reps must be at least 2");
  if (dims.empty()) throw ValidationError("dims must not be empty");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1) throw ValidationError("dims must be positive");
    if (i > 0 && dims[i] <= dims[i - 1]) {
      throw ValidationError("dims must be strictly increasing");
    }
  }
  if (n < 1) throw ValidationError("n must be at least 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0, 1)");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be positive");
  if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("lambda must lie in (0, 1)");
  if (!(radius > 0.0 && radius < 1.0)) throw ValidationError("radius must lie in (0, 1)");
  if (states_per_component < 2) throw ValidationError("N must be at least 2");
}

std::vector<ReplicationResult> run_replications(const ExperimentConfig& cfg, int d,
                                                std::span<const RngSeed> seeds) {
  cfg.validate();
  std::optional<DecoupledMRP> inst;
  SeparableValue truth;
  if (is_fig2(cfg.kind)) {
    // One instance with the largest dimension; smaller dimensions use its
    // leading components so rows differ only in d.
    const int full = std::max(d, cfg.dims.back());
    inst = random_decoupled_instance(full, cfg.states_per_component, cfg.gamma,
                                     derive_seed(cfg.base_seed, kFig2InstanceStream))
               .prefix(d);
    truth = separable_value(*inst);
  }

  std::vector<ReplicationResult> results(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= seeds.size()) return;
      try {
        results[i] = inst ? decoupled_replication(cfg, *inst, truth, seeds[i])
                          : linear_replication(cfg, d, seeds[i]);
      } catch (const NumericalError& e) {
        results[i] = ReplicationResult{};
        results[i].failure = e.what();
      } catch (...) {
        std::lock_guard<std::mutex> lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next.store(seeds.size());
      }
    }
  };
  const unsigned workers = worker_count(cfg.threads, seeds.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);
  return results;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg,
                                          const ProgressCallback& progress) {
  cfg.validate();
  std::vector<RngSeed> seeds(static_cast<std::size_t>(cfg.reps));
  for (int r = 0; r < cfg.reps; ++r) seeds[static_cast<std::size_t>(r)] = cfg.base_seed + r;

  std::vector<ExperimentRow> rows;
  for (int d : cfg.dims) {
    const std::vector<ReplicationResult> results = run_replications(cfg, d, seeds);
    ExperimentRow row;
    row.d = d;
    for (const auto& r : results) {
      if (!r.ok) {
        ++row.failures;
        continue;
      }
      ++row.successes;
      if (r.imputed) ++row.imputed;
      row.errors_mf.push_back(r.error_mf);
      row.errors_mb.push_back(r.error_mb);
    }
    row.valid = row.successes >= 2 && row.failures * 10 <= cfg.reps;
    if (row.successes >= 2) {
      row.mse_mf = confidence_interval(row.errors_mf);
      row.mse_mb = confidence_interval(row.errors_mb);
      row.ratio = ratio_interval(row.errors_mf, row.errors_mb);
    } else {
      row.mse_mf = row.mse_mb = row.ratio = nan_interval();
    }
    if (cfg.kind == ExperimentKind::Fig3Ratio) {
      row.ratio_theoretical = dls_gap_ratio(d, cfg.lambda, cfg.gamma);
    }
    if (progress) progress(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

Interval confidence_interval(std::span<const double> samples) {
  if (samples.size() < 2) throw ValidationError("confidence_interval needs at least two samples");
  const double mean = sample_mean(samples);
  const double half = kZ95 * sample_sd(samples, mean) / std::sqrt(static_cast<double>(samples.size()));
  return Interval{mean - half, mean, mean + half};
}

Interval ratio_interval(std::span<const double> numerator, std::span<const double> denominator) {
  if (numerator.size() < 2 || denominator.size() < 2) {
    throw ValidationError("ratio_interval needs at least two samples on each side");
  }
  const double m1 = sample_mean(numerator);
  const double m2 = sample_mean(denominator);
  const double se1 = sample_sd(numerator, m1) / std::sqrt(static_cast<double>(numerator.size()));
  const double se2 =
      sample_sd(denominator, m2) / std::sqrt(static_cast<double>(denominator.size()));
  const double ratio = m1 / m2;
  const double rel = std::sqrt((se1 / m1) * (se1 / m1) + (se2 / m2) * (se2 / m2));
  const double half = kZ95 * std::abs(ratio) * rel;
  return Interval{ratio - half, ratio, ratio + half};
}

std::string format_csv(ExperimentKind kind, std::span<const ExperimentRow> rows) {
  std::string out;
  auto num = [](double v) { return csv::format_number(v, 6); };
  if (is_ratio_experiment(kind)) {
    out += "d,Ratio_empirical,CI_ratios_LB,CI_ratios_UB,Ratio_theoretical\n";
    for (const auto& r : rows) {
      out += std::to_string(r.d) + ',' + num(r.ratio.point) + ',' + num(r.ratio.lb) + ',' +
             num(r.ratio.ub) + ',' + (r.ratio_theoretical ? num(*r.ratio_theoretical) : "") +
             '\n';
    }
  } else {
    out +=
        "d,Model-free_empirical,CI_MF_LB,CI_MF_UB,Model-based_empirical,CI_MB_LB,CI_MB_UB\n";
    for (const auto& r : rows) {
      out += std::to_string(r.d) + ',' + num(r.mse_mf.point) + ',' + num(r.mse_mf.lb) + ',' +
             num(r.mse_mf.ub) + ',' + num(r.mse_mb.point) + ',' + num(r.mse_mb.lb) + ',' +
             num(r.mse_mb.ub) + '\n';
    }
  }
  return out;
}

void write_csv(ExperimentKind kind, std::span<const ExperimentRow> rows,
               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << format_csv(kind, rows);
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::filesystem::path metadata_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".meta.txt");
  return p;
}

void write_metadata(const ExperimentConfig& cfg, std::span<const ExperimentRow> rows,
                    double wall_seconds, const std::filesystem::path& path) {
  std::ostringstream m;
  m << "experiment=" << experiment_name(cfg.kind) << '\n'
    << "dims=" << join_dims(cfg.dims) << '\n'
    << "n=" << cfg.n << '\n'
    << "reps=" << cfg.reps << '\n'
    << "gamma=" << csv::format_exact(cfg.gamma) << '\n'
    << "sigma=" << csv::format_exact(cfg.sigma) << '\n';
  if (cfg.kind == ExperimentKind::Fig3Ratio) {
    m << "lambda=" << csv::format_exact(cfg.lambda) << '\n';
  } else if (is_fig2(cfg.kind)) {
    m << "N=" << cfg.states_per_component << '\n';
  } else {
    m << "radius=" << csv::format_exact(cfg.radius) << '\n';
  }
  m << "base_seed=" << cfg.base_seed << '\n'
    << "replication_seeds=base_seed+r\n"
    << "ci_method=mean +- 1.96*sd/sqrt(m)\n";
  if (is_ratio_experiment(cfg.kind)) {
    m << "ratio_ci_method=delta method on the quotient of independent means\n";
  }
  for (const auto& r : rows) {
    const std::string key = "row." + std::to_string(r.d) + '.';
    m << key << "successes=" << r.successes << '\n'
      << key << "failures=" << r.failures << '\n'
      << key << "valid=" << (r.valid ? "true" : "false") << '\n';
    if (is_fig2(cfg.kind)) m << key << "imputed=" << r.imputed << '\n';
  }
  m << "wall_seconds=" << csv::format_number(wall_seconds, 6) << '\n';

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << m.str();
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace valuegap
