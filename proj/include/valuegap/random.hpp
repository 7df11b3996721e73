#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace valuegap {

using RngSeed = std::uint64_t;

// splitmix64 finalizer; maps (base, stream) to a well-separated seed.
RngSeed derive_seed(RngSeed base, std::uint64_t stream);

// Seeded random stream. Identical seed and call sequence give identical
// draws. Instances are not shared between threads.
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  Eigen::VectorXd normal_vector(Eigen::Index size);
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

  // Draws an index from a probability row (entries sum to one).
  template <typename Row>
  int categorical(const Row& probabilities) {
    const double u = uniform();
    double cumulative = 0.0;
    const int last = static_cast<int>(probabilities.size()) - 1;
    for (int k = 0; k < last; ++k) {
      cumulative += probabilities(k);
      if (u < cumulative) return k;
    }
    return last;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace valuegap
