#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "valuegap/csv.hpp"
#include "valuegap/dataset_io.hpp"
#include "valuegap/decoupled.hpp"
#include "valuegap/estimators.hpp"
#include "valuegap/harness.hpp"
#include "valuegap/linear_systems.hpp"

using namespace valuegap;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "valuegap_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> row_values(const std::string& text, const std::string& label) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto f = csv::split(line);
    if (f.front() != label) continue;
    std::vector<double> v;
    for (std::size_t i = 1; i < f.size(); ++i) v.push_back(csv::parse_double(f[i]));
    return v;
  }
  return {};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help exits cleanly") {
    for (const char* sub : {"experiment", "estimate", "verify"}) {
      const Outcome o = run({sub, "--help"});
      CHECK(o.code == 0);
      CHECK(o.out.find(sub) != std::string::npos);
    }
    const Outcome e = run({"experiment", "--help"});
    for (const char* flag : {"--dims", "--n", "--reps", "--gamma", "--sigma", "--lambda",
                             "--radius", "--N", "--seed", "--out", "--threads"}) {
      CHECK(e.out.find(flag) != std::string::npos);
    }
    CHECK(run({"--help"}).code == 0);
  }

  TEST_CASE("usage errors exit with 1") {
    const Outcome bogus = run({"experiment", "bogus"});
    CHECK(bogus.code == 1);
    CHECK(bogus.err.find("fig3-ratio") != std::string::npos);
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"experiment", "fig3-ratio", "--dims", "10,5"}).code == 1);
    CHECK(run({"experiment", "fig3-ratio", "--reps", "1"}).code == 1);
    CHECK(run({"experiment", "fig3-ratio", "--gamma", "1.5"}).code == 1);
    CHECK(run({"experiment", "fig3-ratio", "--bogus-flag"}).code == 1);
    CHECK(run({"estimate", "x.csv", "--estimator", "nope"}).code == 1);
    CHECK(run({"verify", "nothing"}).code == 1);
  }

  TEST_CASE("experiment output is deterministic") {
    const auto dir = scratch();
    const auto a = dir / "a" / "fig3.csv";
    const auto b = dir / "b.csv";
    const std::vector<std::string> common{"experiment", "fig3-ratio", "--dims", "5,10",
                                          "--reps", "10", "--seed", "7"};
    auto with_out = [&](const std::filesystem::path& p) {
      auto args = common;
      args.push_back("--out");
      args.push_back(p.string());
      return args;
    };
    const Outcome first = run(with_out(a));
    REQUIRE(first.code == 0);
    CHECK(first.out == a.string() + "\n");
    CHECK(first.err.find("d=10") != std::string::npos);
    REQUIRE(run(with_out(b)).code == 0);
    const std::string text = slurp(a);
    CHECK(text == slurp(b));
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(std::filesystem::exists(metadata_path(a)));
  }

  TEST_CASE("estimate prints the library estimate") {
    const auto dir = scratch();
    const LinearSystem sys = LinearSystem::linear(random_stable_matrix(3, 0.8, 11),
                                                  Eigen::VectorXd::Ones(3), 1.0, 0.9);
    const TransitionDataset data = simulate_linear(sys, 300, 12);
    const auto path = dir / "linear.csv";
    write_dataset_csv(path, data);

    const Outcome o = run({"estimate", path.string(), "--estimator", "lstd-linear", "--gamma", "0.9"});
    REQUIRE(o.code == 0);
    CHECK(o.out.rfind("estimator,lstd-linear\nn,300\ngamma,0.9\n", 0) == 0);
    const Eigen::VectorXd expected = lstd_linear(data, 0.9).linear().beta;
    const auto beta = row_values(o.out, "beta");
    REQUIRE(beta.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(beta[i] - expected(i)) <= 1e-12 * std::abs(expected(i)));

    const Outcome q = run({"estimate", path.string(), "--estimator", "mb-lqr"});
    REQUIRE(q.code == 0);
    const auto p0 = row_values(q.out, "P0");
    const Eigen::MatrixXd p = mb_lqr(data, 0.9).quadratic().p;
    REQUIRE(p0.size() == 3);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(p0[j] - p(0, j)) <= 1e-12 * std::abs(p(0, j)));

    CHECK(run({"estimate", path.string(), "--estimator", "mb-decoupled"}).code == 1);
  }

  TEST_CASE("estimate on tabular data") {
    const auto dir = scratch();
    const DecoupledMRP dmrp = random_decoupled_instance(2, 3, 0.9, 21);
    const TransitionDataset data = simulate_decoupled(dmrp, 500, 22);
    const auto path = dir / "tabular.csv";
    write_dataset_csv(path, data, dmrp.sizes());
    const Outcome o = run({"estimate", path.string(), "--estimator", "mb-decoupled"});
    REQUIRE(o.code == 0);
    const SeparableValue expected = mb_decoupled(data, dmrp.sizes(), 0.9).separable();
    const auto t1 = row_values(o.out, "table1");
    REQUIRE(t1.size() == 3);
    for (int s = 0; s < 3; ++s) CHECK(t1[s] == expected.tables[1](s));
    CHECK(run({"estimate", path.string(), "--estimator", "lstd-linear"}).code == 1);
    CHECK(run({"estimate", path.string(), "--estimator", "mb-tabular"}).code == 1);
  }

  TEST_CASE("malformed files cite the line") {
    const auto path = scratch() / "bad.csv";
    {
      std::ofstream f(path);
      f << "real-vector,1\n";
      for (int i = 0; i < 5; ++i) f << "1,2,3\n";
      f << "1,2\n";
    }
    const Outcome o = run({"estimate", path.string(), "--estimator", "lstd-linear"});
    CHECK(o.code == 1);
    CHECK(o.err.find("line 7") != std::string::npos);
    CHECK(run({"estimate", (scratch() / "missing.csv").string(), "--estimator", "lstd-linear"}).code == 1);
    CHECK(run({"estimate", path.string(), "--estimator", "lstd-linear", "--gamma", "1"}).code == 1);
  }

  TEST_CASE("numerical failures exit with 2") {
    const auto path = scratch() / "short.csv";
    {
      std::ofstream f(path);
      f << "real-vector,2\n1,0,1,1,0\n2,0,1,2,0\n3,0,1,3,0\n";
    }
    CHECK(run({"estimate", path.string(), "--estimator", "lstd-quadratic"}).code == 2);
  }

  TEST_CASE("verify prints one line per check") {
    const Outcome o = run({"verify", "equivalences"});
    CHECK(o.code == 0);
    CHECK(o.out.find("PASS ") != std::string::npos);
    CHECK(o.out.find("FAIL ") == std::string::npos);
  }
}
