#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "valuegap/csv.hpp"
#include "valuegap/dataset_io.hpp"
#include "valuegap/errors.hpp"
#include "valuegap/estimators.hpp"
#include "valuegap/harness.hpp"
#include "valuegap/verify.hpp"

namespace valuegap {

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kFailure = 2;

const std::vector<std::string> kEstimators = {
    "lstd-linear",   "mb-linear",     "mb-diag",        "lstd-quadratic", "mb-lqr",
    "mb-lifted-lqr", "lstd-separable", "mb-decoupled",  "mb-tabular"};

struct ExperimentArgs {
  std::string name;
  std::string dims;
  std::optional<long> n;
  std::optional<int> reps;
  std::optional<double> gamma;
  std::optional<double> sigma;
  std::optional<double> lambda;
  std::optional<double> radius;
  std::optional<int> states;
  std::optional<RngSeed> seed;
  std::string out;
  unsigned threads = 0;
};

struct EstimateArgs {
  std::string path;
  std::string estimator;
  double gamma = 0.9;
};

struct VerifyArgs {
  std::string suite;
  RngSeed seed = 1;
};

std::string names_list(const std::vector<std::string>& names) {
  std::string s;
  for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
  return s;
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (ExperimentKind k : all_experiments()) out.emplace_back(experiment_name(k));
  return out;
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  for (const std::string& field : csv::split(text)) {
    long v = 0;
    try {
      v = csv::parse_long(field);
    } catch (const std::invalid_argument&) {
      throw ValidationError("--dims: '" + field + "' is not an integer");
    }
    if (v < 1 || v > 100000) throw ValidationError("--dims: " + field + " is out of range");
    dims.push_back(static_cast<int>(v));
  }
  return dims;
}

void print_row(std::ostream& os, const std::string& label, const Eigen::VectorXd& v) {
  os << label;
  for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << csv::format_exact(v(i));
  os << '\n';
}

void print_estimate(std::ostream& os, const ValueEstimate& est, double gamma) {
  os << "estimator," << est.estimator << '\n'
     << "n," << est.samples << '\n'
     << "gamma," << csv::format_exact(gamma) << '\n';
  if (const auto* lin = std::get_if<LinearValue>(&est.value)) {
    print_row(os, "beta", lin->beta);
  } else if (const auto* quad = std::get_if<QuadraticValue>(&est.value)) {
    for (Eigen::Index i = 0; i < quad->p.rows(); ++i) {
      print_row(os, "P" + std::to_string(i), quad->p.row(i).transpose());
    }
  } else if (const auto* tab = std::get_if<TabularValue>(&est.value)) {
    print_row(os, "V", tab->values);
  } else {
    const auto& sep = std::get<SeparableValue>(est.value);
    for (std::size_t i = 0; i < sep.tables.size(); ++i) {
      print_row(os, "table" + std::to_string(i), sep.tables[i]);
    }
  }
  if (est.imputed_unvisited) os << "imputed_unvisited,true\n";
}

ValueEstimate dispatch_estimator(const std::string& name, const LoadedDataset& loaded,
                                 double gamma) {
  const TransitionDataset& data = loaded.data;
  const bool tabular = data.kind() == StateKind::TabularIndex;
  const bool wants_tabular =
      name == "lstd-separable" || name == "mb-decoupled" || name == "mb-tabular";
  if (tabular != wants_tabular) {
    throw ValidationError("estimator '" + name + "' needs " +
                          (wants_tabular ? "tabular-index" : "real-vector") + " states");
  }
  if (name == "lstd-linear") return lstd_linear(data, gamma);
  if (name == "mb-linear") return mb_linear(data, gamma, DynamicsConstraint::Unconstrained);
  if (name == "mb-diag") return mb_linear(data, gamma, DynamicsConstraint::Diagonal);
  if (name == "lstd-quadratic") return lstd_quadratic(data, gamma);
  if (name == "mb-lqr") return mb_lqr(data, gamma);
  if (name == "mb-lifted-lqr") return mb_lifted_lqr(data, gamma);
  if (name == "lstd-separable") return lstd_separable(data, loaded.sizes, gamma);
  if (name == "mb-decoupled") return mb_decoupled(data, loaded.sizes, gamma);
  if (loaded.sizes.size() != 1) throw ValidationError("mb-tabular needs a single component");
  return mb_tabular(data, loaded.sizes.front(), gamma);
}

int cmd_experiment(const ExperimentArgs& a, const CLI::App& sub, std::ostream& out,
                   std::ostream& err) {
  const std::optional<ExperimentKind> kind = parse_experiment(a.name);
  if (!kind) {
    err << "error: unknown experiment '" << a.name << "' (expected one of "
        << names_list(experiment_names()) << ")\n\n"
        << sub.help();
    return kUsage;
  }
  ExperimentConfig cfg = ExperimentConfig::defaults(*kind);
  try {
    if (!a.dims.empty()) cfg.dims = parse_dims(a.dims);
    if (a.n) cfg.n = *a.n;
    if (a.reps) cfg.reps = *a.reps;
    if (a.gamma) cfg.gamma = *a.gamma;
    if (a.sigma) cfg.sigma = *a.sigma;
    if (a.lambda) cfg.lambda = *a.lambda;
    if (a.radius) cfg.radius = *a.radius;
    if (a.states) cfg.states_per_component = *a.states;
    if (a.seed) cfg.base_seed = *a.seed;
    cfg.threads = a.threads;
    cfg.validate();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n\n" << sub.help();
    return kUsage;
  }

  const std::filesystem::path path =
      a.out.empty() ? std::filesystem::path("out") / (a.name + ".csv") : std::filesystem::path(a.out);
  try {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto start = std::chrono::steady_clock::now();
    const auto rows = run_experiment(cfg, [&](const ExperimentRow& row) {
      err << experiment_name(cfg.kind) << " d=" << row.d;
      if (is_ratio_experiment(cfg.kind)) {
        err << " ratio=" << csv::format_number(row.ratio.point);
      } else {
        err << " mse_mf=" << csv::format_number(row.mse_mf.point)
            << " mse_mb=" << csv::format_number(row.mse_mb.point);
      }
      err << " failures=" << row.failures << '/' << cfg.reps
          << (row.valid ? "" : " (invalid)") << '\n';
    });
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_csv(cfg.kind, rows, path);
    write_metadata(cfg, rows, seconds, metadata_path(path));
    out << path.string() << '\n';
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

int cmd_estimate(const EstimateArgs& a, const CLI::App& sub, std::ostream& out,
                 std::ostream& err) {
  if (!(a.gamma > 0.0 && a.gamma < 1.0)) {
    err << "error: --gamma must lie in (0, 1)\n\n" << sub.help();
    return kUsage;
  }
  try {
    const LoadedDataset loaded = read_dataset_csv(std::filesystem::path(a.path));
    print_estimate(out, dispatch_estimator(a.estimator, loaded, a.gamma), a.gamma);
  } catch (const DatasetParseError& e) {
    err << "error: " << a.path << ": " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

int cmd_verify(const VerifyArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const std::optional<VerifySuite> suite = parse_verify_suite(a.suite);
  if (!suite) {
    err << "error: unknown suite '" << a.suite
        << "' (expected equivalences, asymptotics, oracles or all)\n\n"
        << sub.help();
    return kUsage;
  }
  std::vector<CheckResult> checks;
  try {
    checks = run_verify(*suite, a.seed);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  bool all_passed = true;
  for (const auto& c : checks) {
    all_passed = all_passed && c.passed;
    out << (c.passed ? "PASS " : "FAIL ") << c.name
        << " discrepancy=" << csv::format_number(c.discrepancy)
        << " tolerance=" << csv::format_number(c.tolerance);
    if (!c.detail.empty()) out << " (" << c.detail << ')';
    out << '\n';
  }
  return all_passed ? kOk : kFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Policy evaluation estimators and Monte-Carlo experiments", "valuegap"};
  app.require_subcommand(1);

  ExperimentArgs ex;
  CLI::App* experiment = app.add_subcommand("experiment", "Run a Monte-Carlo experiment");
  experiment->add_option("name", ex.name, "Experiment: " + names_list(experiment_names()))
      ->required();
  experiment->add_option("--dims", ex.dims, "Comma-separated increasing dimensions");
  experiment->add_option("--n", ex.n, "Transitions per replication");
  experiment->add_option("--reps", ex.reps, "Replications per dimension");
  experiment->add_option("--gamma", ex.gamma, "Discount factor");
  experiment->add_option("--sigma", ex.sigma, "Noise standard deviation");
  experiment->add_option("--lambda", ex.lambda, "fig3 dynamics A = lambda*I");
  experiment->add_option("--radius", ex.radius, "fig1 spectral radius of random dynamics");
  experiment->add_option("--N", ex.states, "fig2 states per component");
  experiment->add_option("--seed", ex.seed, "Base seed; replication r uses seed + r");
  experiment->add_option("--out", ex.out, "Output CSV (default out/<name>.csv)");
  experiment->add_option("--threads", ex.threads, "Worker threads (0 = all cores)");

  EstimateArgs es;
  CLI::App* estimate = app.add_subcommand("estimate", "Fit an estimator to a transition file");
  estimate->add_option("path", es.path, "Transition CSV file")->required();
  estimate->add_option("--estimator", es.estimator, "One of: " + names_list(kEstimators))
      ->required()
      ->check(CLI::IsMember(kEstimators));
  estimate->add_option("--gamma", es.gamma, "Discount factor in (0, 1)")->capture_default_str();

  VerifyArgs ve;
  CLI::App* verify = app.add_subcommand("verify", "Run property checks");
  verify->add_option("suite", ve.suite, "equivalences, asymptotics, oracles or all")->required();
  verify->add_option("--seed", ve.seed, "Seed")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const CLI::App* sub : {experiment, estimate, verify}) {
      if (sub->parsed()) target = sub;
    }
    out << target->help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* target = &app;
    for (const CLI::App* sub : {experiment, estimate, verify}) {
      if (sub->parsed()) target = sub;
    }
    err << "error: " << e.what() << "\n\n" << target->help();
    return kUsage;
  }

  if (experiment->parsed()) return cmd_experiment(ex, *experiment, out, err);
  if (estimate->parsed()) return cmd_estimate(es, *estimate, out, err);
  return cmd_verify(ve, *verify, out, err);
}

}  // namespace valuegap
