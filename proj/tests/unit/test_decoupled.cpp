#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "valuegap/decoupled.hpp"
#include "valuegap/errors.hpp"

using namespace valuegap;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_kernel(Rng& rng, int n) {
  MatrixXd p(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) p(i, j) = rng.uniform() + 1e-3;
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

DecoupledMRP random_instance(Rng& rng, const std::vector<int>& sizes, double gamma) {
  std::vector<TabularMRP> comps;
  for (int n : sizes) comps.emplace_back(random_kernel(rng, n), rng.normal_vector(n), gamma);
  return DecoupledMRP(comps);
}

SeparableValue random_tables(Rng& rng, const std::vector<int>& sizes) {
  SeparableValue v;
  for (int n : sizes) v.tables.push_back(rng.normal_vector(n));
  return v;
}

}  // namespace

TEST_SUITE("decoupled") {
  TEST_CASE("construction rejects bad component lists") {
    CHECK_THROWS_AS(DecoupledMRP(std::vector<TabularMRP>{}), ValidationError);
    Rng rng(1);
    std::vector<TabularMRP> comps{TabularMRP(random_kernel(rng, 2), VectorXd::Zero(2), 0.9),
                                  TabularMRP(random_kernel(rng, 2), VectorXd::Zero(2), 0.8)};
    CHECK_THROWS_AS(DecoupledMRP{comps}, ValidationError);
  }

  TEST_CASE("joint indexing is mixed radix with component 0 most significant") {
    const std::vector<int> sizes{3, 4, 5};
    const std::vector<int> s{2, 1, 3};
    CHECK(joint_index(sizes, s) == (2 * 4 + 1) * 5 + 3);
    for (long i = 0; i < 60; ++i) {
      const std::vector<int> c = joint_components(sizes, i);
      CHECK(c == oracle::decode(sizes, i));
      CHECK(joint_index(sizes, c) == i);
    }
  }

  TEST_CASE("joint size saturates instead of overflowing") {
    const std::vector<int> sizes(200, 5);
    CHECK(joint_size(sizes) == std::numeric_limits<std::uint64_t>::max());
  }

  TEST_CASE("product kernel matches nested-loop enumeration") {
    Rng rng(2);
    const DecoupledMRP dmrp = random_instance(rng, {2, 3, 2}, 0.9);
    std::vector<MatrixXd> kernels;
    std::vector<VectorXd> rewards;
    for (const auto& c : dmrp.components()) {
      kernels.push_back(c.transition());
      rewards.push_back(c.reward());
    }
    MatrixXd p;
    VectorXd r;
    oracle::product_by_enumeration(kernels, rewards, p, r);
    const TabularMRP joint = product_mrp(dmrp);
    CHECK((joint.transition() - p).norm() < 1e-14);
    CHECK((joint.reward() - r).norm() < 1e-14);
  }

  TEST_CASE("single component product is the component itself") {
    Rng rng(3);
    const DecoupledMRP dmrp = random_instance(rng, {4}, 0.9);
    const TabularMRP joint = product_mrp(dmrp);
    CHECK(joint.transition() == dmrp.component(0).transition());
    CHECK(joint.reward() == dmrp.component(0).reward());
  }

  TEST_CASE("product guard refuses huge joint spaces") {
    const DecoupledMRP dmrp = random_decoupled_instance(8, 5, 0.9, 1);
    CHECK_THROWS_AS(product_mrp(dmrp), ValidationError);
  }

  TEST_CASE("separable value equals the product-space value") {
    Rng rng(4);
    for (const std::vector<int>& sizes :
         {std::vector<int>{2, 2}, std::vector<int>{3, 2, 4}, std::vector<int>{5, 5, 5}}) {
      const DecoupledMRP dmrp = random_instance(rng, sizes, 0.9);
      const VectorXd joint = exact_value(product_mrp(dmrp));
      const VectorXd sep = expand_separable(separable_value(dmrp));
      CHECK((joint - sep).lpNorm<Eigen::Infinity>() < 1e-9);
    }
  }

  TEST_CASE("separable evaluation works without materializing the product") {
    const DecoupledMRP dmrp = random_decoupled_instance(200, 5, 0.9, 2);
    const SeparableValue v = separable_value(dmrp);
    std::vector<int> s(200, 3);
    double expected = 0.0;
    for (const auto& t : v.tables) expected += t(3);
    CHECK(v.evaluate(s) == doctest::Approx(expected).epsilon(1e-14));
    CHECK_THROWS_AS(v.evaluate(std::vector<int>(199, 0)), ValidationError);
  }

  TEST_CASE("dense kernels realize separable values") {
    Rng rng(5);
    for (const std::vector<int>& sizes : {std::vector<int>{3, 3}, std::vector<int>{2, 3, 2}}) {
      const int joint = static_cast<int>(joint_size(sizes));
      const MatrixXd p = random_kernel(rng, joint);
      const VectorXd v = expand_separable(random_tables(rng, sizes));
      const VectorXd r = reward_from_value(p, v, 0.9);
      CHECK((exact_value(TabularMRP(p, r, 0.9)) - v).lpNorm<Eigen::Infinity>() < 1e-9);
    }
  }

  TEST_CASE("values outside the reachable set are rejected") {
    // With an absorbing kernel V = 9 r, so any V is realizable; with two
    // identical rows the value is constant across those states.
    MatrixXd p(2, 2);
    p << 0.5, 0.5, 0.5, 0.5;
    const VectorXd v = (VectorXd(2) << 1.0, 2.0).finished();
    CHECK_THROWS_AS(reward_from_value(p, v, 0.9), NumericalError);
  }

  TEST_CASE("uniform MSE") {
    SUBCASE("zero tables") {
      SeparableValue z;
      z.tables = {VectorXd::Zero(3), VectorXd::Zero(4)};
      CHECK(mse_uniform_separable(z) == 0.0);
    }
    SUBCASE("single table (1, -1)") {
      SeparableValue v;
      v.tables = {(VectorXd(2) << 1.0, -1.0).finished()};
      CHECK(mse_uniform_separable(v) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("matches enumeration") {
      Rng rng(6);
      for (const std::vector<int>& sizes :
           {std::vector<int>{4, 4, 4}, std::vector<int>{2, 7}, std::vector<int>{10, 10, 10, 10}}) {
        const SeparableValue v = random_tables(rng, sizes);
        CHECK(mse_uniform_separable(v) ==
              doctest::Approx(oracle::enumerated_uniform_mse(v.tables)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("decoupled simulation") {
    SUBCASE("single component has the trajectory structure of a plain chain") {
      const DecoupledMRP dmrp = random_decoupled_instance(1, 4, 0.9, 3);
      const TransitionDataset data = simulate_decoupled(dmrp, 500, 8);
      CHECK(data.state_dim() == 1);
      CHECK(data.is_single_trajectory());
    }
    SUBCASE("reproducible for a fixed seed") {
      const DecoupledMRP dmrp = random_decoupled_instance(3, 4, 0.9, 4);
      const TransitionDataset a = simulate_decoupled(dmrp, 50, 4);
      const TransitionDataset b = simulate_decoupled(dmrp, 50, 4);
      CHECK(a.tabular_states() == b.tabular_states());
      CHECK(a.rewards() == b.rewards());
      CHECK(a.tabular_states() != simulate_decoupled(dmrp, 50, 5).tabular_states());
    }
    SUBCASE("periodic components have no stationary start") {
      MatrixXd swap(2, 2);
      swap << 0, 1, 1, 0;
      const DecoupledMRP dmrp({TabularMRP(swap, VectorXd::Zero(2), 0.9)});
      CHECK_THROWS_AS(simulate_decoupled(dmrp, 50, 4), ConvergenceError);
    }
    SUBCASE("pairs are independent: joint frequencies factor") {
      const DecoupledMRP dmrp = random_decoupled_instance(2, 3, 0.9, 5);
      const TransitionDataset data = simulate_decoupled(dmrp, 100000, 6);
      MatrixXd joint = MatrixXd::Zero(9, 9);
      MatrixXd m0 = MatrixXd::Zero(3, 3);
      MatrixXd m1 = MatrixXd::Zero(3, 3);
      const auto& s = data.tabular_states();
      const auto& sn = data.tabular_next_states();
      for (Eigen::Index t = 0; t < data.size(); ++t) {
        joint(s(0, t) * 3 + s(1, t), sn(0, t) * 3 + sn(1, t)) += 1.0;
        m0(s(0, t), sn(0, t)) += 1.0;
        m1(s(1, t), sn(1, t)) += 1.0;
      }
      const double n = static_cast<double>(data.size());
      joint /= n;
      m0 /= n;
      m1 /= n;
      const MatrixXd product = oracle::kron_loops(m0, m1);
      CHECK(0.5 * (joint - product).cwiseAbs().sum() < 0.01);
    }
  }

  TEST_CASE("random instances") {
    const DecoupledMRP a = random_decoupled_instance(6, 5, 0.9, 10);
    const DecoupledMRP b = random_decoupled_instance(6, 5, 0.9, 10);
    for (Eigen::Index i = 0; i < 6; ++i) {
      const MatrixXd& p = a.component(i).transition();
      CHECK(p == b.component(i).transition());
      CHECK(a.component(i).reward() == b.component(i).reward());
      CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
      CHECK((p.array() > 0.0).all());
      CHECK((a.component(i).reward().array() >= 0.0).all());
      CHECK((a.component(i).reward().array() < 1.0).all());
      CHECK_NOTHROW(stationary_distribution(p));
    }
    // Smaller instances are prefixes of larger ones under the same seed.
    const DecoupledMRP big = random_decoupled_instance(10, 5, 0.9, 10);
    CHECK(big.prefix(6).component(5).transition() == a.component(5).transition());
  }
}
