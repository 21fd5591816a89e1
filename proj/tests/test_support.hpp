#ifndef DISTRICA_TEST_SUPPORT_HPP
#define DISTRICA_TEST_SUPPORT_HPP

#include <cstdint>
#include <random>

#include "districa/network.hpp"
#include "districa/types.hpp"

namespace districa::testing {

inline constexpr int kPropertyCases = 100;

/// Small seeded generator for property-style tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  MatrixXd matrix(Index rows, Index cols) {
    MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

  MatrixXd symmetric(Index n) {
    const MatrixXd a = matrix(n, n);
    return (a + a.transpose()) / 2.0;
  }

  MatrixXd orthonormal(Index rows, Index cols) {
    Eigen::HouseholderQR<MatrixXd> qr(matrix(rows, cols));
    return qr.householderQ() * MatrixXd::Identity(rows, cols);
  }

  /// Full-rank batch: random mixtures with per-channel offsets.
  MatrixXd full_rank_batch(Index samples, Index channels) {
    MatrixXd b = matrix(samples, channels) * matrix(channels, channels);
    for (Index j = 0; j < channels; ++j) b.col(j).array() += uniform(-2.0, 2.0);
    return b;
  }

  /// Random connected graph: a random spanning tree plus extra edges.
  NetworkGraph connected_graph(int nodes, Index max_channels) {
    Adjacency adj = Adjacency::Constant(nodes, nodes, false);
    for (int v = 1; v < nodes; ++v) {
      const int u = integer(0, v - 1);
      adj(u, v) = adj(v, u) = true;
    }
    const double extra = uniform(0.0, 0.6);
    for (int u = 0; u < nodes; ++u)
      for (int v = u + 1; v < nodes; ++v)
        if (uniform(0.0, 1.0) < extra) adj(u, v) = adj(v, u) = true;
    std::vector<Index> ch(static_cast<std::size_t>(nodes));
    for (auto& c : ch) c = integer(1, static_cast<int>(max_channels));
    return make_graph(adj, ch);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double frob_rel(const MatrixXd& a, const MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace districa::testing

#endif  // DISTRICA_TEST_SUPPORT_HPP
