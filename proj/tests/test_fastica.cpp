#include <cmath>
#include <random>

#include "doctest.h"
#include "test_support.hpp"

#include "districa/fastica.hpp"
#include "districa/metrics.hpp"
#include "districa/signal_model.hpp"

using namespace districa;
using districa::testing::Gen;

namespace {

const ContrastFunction kLogCosh{ContrastKind::LogCosh};
const ContrastFunction kNegExp{ContrastKind::NegExp};

// Unit-variance square wave in column 0, Gaussian in column 1.
MatrixXd square_and_gaussian(Index n, std::uint64_t seed) {
  Gen gen(seed);
  MatrixXd s(n, 2);
  for (Index t = 0; t < n; ++t) {
    s(t, 0) = (t / 25) % 2 == 0 ? 1.0 : -1.0;
    s(t, 1) = gen.normal();
  }
  return s;
}

// Trapezoid rule over [-12, 12] on a fine grid; independent of Gauss-Hermite.
double trapezoid_gaussian_expectation(const ContrastFunction& f) {
  const int steps = 240000;
  const double lo = -12.0;
  const double h = 24.0 / steps;
  double acc = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    acc += w * f.value(x) * std::exp(-x * x / 2.0);
  }
  return acc * h / std::sqrt(2.0 * M_PI);
}

}  // namespace

TEST_CASE("contrast closed forms") {
  CHECK(kLogCosh.value(0.0) == doctest::Approx(0.0));
  CHECK(kLogCosh.value(1.0) == doctest::Approx(std::log(std::cosh(1.0))));
  CHECK(kLogCosh.value(40.0) == doctest::Approx(40.0 - std::log(2.0)));
  CHECK(kLogCosh.first(0.7) == doctest::Approx(std::tanh(0.7)));
  CHECK(kNegExp.value(0.0) == doctest::Approx(-1.0));
  CHECK(kNegExp.second(1.0) == doctest::Approx(0.0));
}

TEST_CASE("F'' matches finite differences of F' and F' those of F") {
  const double h = 1e-5;
  for (const auto& f : {kLogCosh, kNegExp}) {
    for (double x : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
      const double d2 = (f.first(x + h) - f.first(x - h)) / (2 * h);
      CHECK(std::abs(d2 - f.second(x)) < 1e-6);
      const double d1 = (f.value(x + h) - f.value(x - h)) / (2 * h);
      CHECK(std::abs(d1 - f.first(x)) < 1e-6);
    }
  }
}

TEST_CASE("F'' matches finite differences at random points") {
  Gen gen(11);
  const double h = 1e-5;
  for (int c = 0; c < districa::testing::kPropertyCases; ++c) {
    const double x = gen.uniform(-4.0, 4.0);
    for (const auto& f : {kLogCosh, kNegExp})
      CHECK(std::abs((f.first(x + h) - f.first(x - h)) / (2 * h) - f.second(x)) < 1e-6);
  }
}

TEST_CASE("gaussian baseline agrees with an independent trapezoid quadrature") {
  for (const auto& f : {kLogCosh, kNegExp})
    CHECK(std::abs(gaussian_baseline(f.kind) - trapezoid_gaussian_expectation(f)) < 1e-10);
  // E[-exp(-ν²/2)] = -1/√2 exactly.
  CHECK(gaussian_baseline(ContrastKind::NegExp) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("gaussian baseline agrees with a Monte-Carlo oracle") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal;
  double lc = 0.0;
  double ne = 0.0;
  const int n = 10'000'000;
  for (int i = 0; i < n; ++i) {
    const double x = normal(rng);
    lc += kLogCosh.value(x);
    ne += kNegExp.value(x);
  }
  CHECK(std::abs(lc / n - gaussian_baseline(ContrastKind::LogCosh)) < 1e-3);
  CHECK(std::abs(ne / n - gaussian_baseline(ContrastKind::NegExp)) < 1e-3);
}

TEST_CASE("fixed_point_step returns a unit vector on Gaussian data") {
  Gen gen(12);
  const MatrixXd z = gen.matrix(2000, 4);
  VectorXd w = gen.matrix(4, 1);
  w.normalize();
  const VectorXd next = fixed_point_step(w, z, kLogCosh);
  CHECK(next.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fixed_point_step keeps a square-wave direction fixed") {
  const MatrixXd s = square_and_gaussian(10000, 13);
  const MatrixXd z = s * whitening_transform(sample_covariance(s, false)).matrix;
  const VectorXd next = fixed_point_step(VectorXd::Unit(2, 0), z, kLogCosh);
  CHECK(std::abs(std::abs(next(0)) - 1.0) < 0.05);
  CHECK(std::abs(next(1)) < 0.05);
}

TEST_CASE("fixed_point_step matches a sample-mean oracle") {
  Gen gen(14);
  const MatrixXd z = gen.matrix(300, 3);
  VectorXd w = gen.matrix(3, 1);
  w.normalize();
  for (const auto& f : {kLogCosh, kNegExp}) {
    VectorXd oracle = VectorXd::Zero(3);
    double mean_second = 0.0;
    for (Index t = 0; t < 300; ++t) {
      double proj = 0.0;
      for (Index i = 0; i < 3; ++i) proj += w(i) * z(t, i);
      for (Index i = 0; i < 3; ++i) oracle(i) += z(t, i) * f.first(proj) / 300.0;
      mean_second += f.second(proj) / 300.0;
    }
    oracle -= mean_second * w;
    oracle /= oracle.norm();
    CHECK((fixed_point_step(w, z, f) - oracle).norm() < 1e-12);
  }
}

TEST_CASE("fixed_point_step flags a collapsed update") {
  const MatrixXd z = MatrixXd::Zero(10, 2);
  try {
    fixed_point_step(VectorXd::Unit(2, 0), z, kNegExp);
    // F''(0) = 1 for NegExp, so the update is -w: not degenerate.
  } catch (const Error&) {
    FAIL("unexpected degeneracy");
  }
  try {
    fixed_point_step(VectorXd::Unit(2, 0), z, kLogCosh);  // F''(0) = 1 too
  } catch (const Error&) {
    FAIL("unexpected degeneracy");
  }
  // Constant ±1 projections with F = log cosh: E[zF'] = tanh(1)·w·1, E[F''] = 1 - tanh²(1).
  // Pick data so that the update cancels exactly: z = ±c e_0 with tanh(c)·c = 1 - tanh²(c).
  double c = 1.0;
  for (int i = 0; i < 200; ++i) c -= (std::tanh(c) * c - (1 - std::tanh(c) * std::tanh(c))) / 2.0;
  MatrixXd zc = MatrixXd::Zero(4, 2);
  zc(0, 0) = zc(2, 0) = c;
  zc(1, 0) = zc(3, 0) = -c;
  try {
    fixed_point_step(VectorXd::Unit(2, 0), zc, kLogCosh);
    FAIL("expected degenerate direction");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateDirection);
  }
}

TEST_CASE("deflate") {
  Gen gen(15);
  const VectorXd w = gen.matrix(5, 1);
  CHECK((deflate(w, MatrixXd(5, 0)) - w).norm() == 0.0);

  const MatrixXd basis = gen.orthonormal(5, 3);
  try {
    deflate(VectorXd(basis.col(1)), basis);
    FAIL("expected degenerate direction");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateDirection);
  }

  for (int c = 0; c < districa::testing::kPropertyCases; ++c) {
    const MatrixXd b = gen.orthonormal(5, 3);
    const VectorXd out = deflate(VectorXd(gen.matrix(5, 1)), b);
    CHECK((b.transpose() * out).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("fix_signs") {
  MatrixXd x(3, 1);
  x << 0.0, -3.0, 1.0;
  MatrixXd expected(3, 1);
  expected << 0.0, 3.0, -1.0;
  CHECK(fix_signs(x) == expected);
  CHECK(fix_signs(expected) == expected);
  CHECK(fix_signs(MatrixXd::Zero(3, 2)) == MatrixXd::Zero(3, 2));

  Gen gen(16);
  for (int c = 0; c < districa::testing::kPropertyCases; ++c) {
    const MatrixXd m = gen.matrix(gen.integer(1, 6), gen.integer(1, 4));
    const MatrixXd once = fix_signs(m);
    CHECK(fix_signs(once) == once);
    for (Index j = 0; j < m.cols(); ++j) CHECK(once.col(j).cwiseAbs() == m.col(j).cwiseAbs());
  }
}

TEST_CASE("negentropy_score") {
  Gen gen(17);
  const MatrixXd gauss = gen.matrix(100000, 2);
  CHECK(negentropy_score(VectorXd::Unit(2, 0), gauss, kLogCosh) < 0.01);

  MatrixXd square(1000, 1);
  for (Index t = 0; t < 1000; ++t) square(t, 0) = t % 2 ? 1.0 : -1.0;
  const VectorXd e0 = VectorXd::Ones(1);
  CHECK(negentropy_score(e0, square, kLogCosh) ==
        doctest::Approx(std::abs(std::log(std::cosh(1.0)) - trapezoid_gaussian_expectation(kLogCosh))));

  const MatrixXd z = gen.matrix(500, 3);
  VectorXd w = gen.matrix(3, 1);
  w.normalize();
  for (const auto& f : {kLogCosh, kNegExp})
    CHECK(negentropy_score(w, z, f) == doctest::Approx(negentropy_score(VectorXd(-w), z, f)).epsilon(1e-14));
}

TEST_CASE("run_fastica separates a square wave from Gaussian noise") {
  const MatrixXd s = square_and_gaussian(10000, 18);
  MatrixXd a(2, 2);
  a << 0.8, 0.6, -0.4, 0.9;
  const MatrixXd y = s * a.transpose();
  SolverOptions opts;
  opts.rng_seed = 3;
  for (const auto& f : {kLogCosh, kNegExp}) {
    const auto r = run_fastica(y, 1, f, opts);
    const MatrixXd est = (y.rowwise() - r.mean.transpose()) * r.demixing_raw;
    CHECK(abs_correlation(est.col(0), s.col(0)) > 0.95);
  }
}

TEST_CASE("run_fastica recovers the sinusoid and the square wave among near-Gaussian sources") {
  std::vector<SourceSpec> specs{standardized(SourceSpec::sinusoid(0.007)), standardized(SourceSpec::square(0.013))};
  Gen gen(19);
  for (int j = 2; j < 10; ++j) specs.push_back(standardized(SourceSpec::mixed_noise(gen.uniform(0.2, 0.8))));
  const Batch s = generate_sources(specs, 10000, 0, 7);
  MixingModel model{random_mixing(10, 8), specs, {}};
  const Batch y = mix_and_normalize(model, s);
  SolverOptions opts;
  opts.rng_seed = 9;
  const auto r = run_fastica(y.data, 2, kLogCosh, opts);
  const MatrixXd est = (y.data.rowwise() - r.mean.transpose()) * r.demixing_raw;
  CHECK(matched_min_correlation(est, s.data.leftCols(2)) > 0.95);
}

TEST_CASE("run_fastica result invariants") {
  Gen gen(20);
  for (int c = 0; c < 20; ++c) {
    const Index channels = gen.integer(2, 6);
    const Index q = gen.integer(1, static_cast<int>(channels));
    MatrixXd s(3000, channels);
    for (Index j = 0; j < channels; ++j)
      for (Index t = 0; t < 3000; ++t)
        s(t, j) = j % 2 ? gen.uniform(-1.0, 1.0) : std::pow(gen.uniform(-1.0, 1.0), 3);
    const MatrixXd y = s * gen.matrix(channels, channels).transpose();
    SolverOptions opts;
    opts.rng_seed = static_cast<std::uint64_t>(c);
    const auto r = run_fastica(y, q, kLogCosh, opts);
    const auto& w = r.demixing_orthogonal;
    CHECK((w.transpose() * w - MatrixXd::Identity(q, q)).norm() < 1e-8);
    const MatrixXd& x = r.demixing_raw;
    CHECK((x.transpose() * sample_covariance(y).values * x - MatrixXd::Identity(q, q)).norm() < 1e-6);
    for (Index k = 1; k < q; ++k) CHECK(r.negentropy_scores(k) <= r.negentropy_scores(k - 1));
    CHECK(fix_signs(x) == x);
    CHECK((r.whitening.matrix * w - x).norm() < 1e-12 * std::max(1.0, x.norm()));

    // Ordering is idempotent.
    auto again = r;
    order_components(again);
    CHECK(again.demixing_raw == r.demixing_raw);

    // Converged components are fixed points of the deflated map.
    const MatrixXd z = (y.rowwise() - r.mean.transpose()) * r.whitening.matrix;
    for (Index k = 0; k < q; ++k) {
      if (!r.converged_flags[static_cast<std::size_t>(k)]) continue;
      // Components are reported in score order; deflate against every other
      // component, which spans the same space as the earlier extractions.
      MatrixXd others(w.rows(), q - 1);
      for (Index j = 0, o = 0; j < q; ++j)
        if (j != k) others.col(o++) = w.col(j);
      VectorXd next = deflate(fixed_point_step(VectorXd(w.col(k)), z, kLogCosh), others);
      next.normalize();
      const double residual = std::min((next - w.col(k)).norm(), (next + w.col(k)).norm());
      CHECK(residual < 1e-4);
    }
  }
}

TEST_CASE("run_fastica is deterministic for a fixed seed") {
  Gen gen(21);
  MatrixXd s(2000, 3);
  for (Index j = 0; j < 3; ++j)
    for (Index t = 0; t < 2000; ++t) s(t, j) = gen.uniform(-1.0, 1.0);
  const MatrixXd y = s * gen.matrix(3, 3);
  SolverOptions opts;
  opts.rng_seed = 77;
  const auto a = run_fastica(y, 2, kLogCosh, opts);
  const auto b = run_fastica(y, 2, kLogCosh, opts);
  CHECK(a.demixing_raw == b.demixing_raw);
}

TEST_CASE("run_fastica satisfies the constraint on already-independent sources") {
  std::vector<SourceSpec> specs{standardized(SourceSpec::square(0.013)), standardized(SourceSpec::sinusoid(0.007)),
                                standardized(SourceSpec::mixed_noise(0.5))};
  const Batch s = generate_sources(specs, 10000, 0, 3);
  const auto r = run_fastica(s.data, 2, kLogCosh, SolverOptions{});
  CHECK((r.demixing_raw.transpose() * sample_covariance(s.data).values * r.demixing_raw - MatrixXd::Identity(2, 2))
            .norm() < 1e-6);
}

TEST_CASE("run_fastica warm start from the solution stays put") {
  const MatrixXd s = square_and_gaussian(5000, 22);
  const MatrixXd y = s * MatrixXd::Identity(2, 2);
  const auto first = run_fastica(y, 1, kLogCosh, SolverOptions{});
  SolverOptions one;
  one.trials = 1;
  const auto warm = run_fastica(y, 1, kLogCosh, one, std::optional<MatrixXd>(first.demixing_raw));
  CHECK((warm.demixing_raw - first.demixing_raw).norm() < 1e-6);
  CHECK(warm.iterations[0] <= 3);
}

TEST_CASE("run_fastica input validation") {
  Gen gen(23);
  const MatrixXd y = gen.matrix(100, 3);
  CHECK_THROWS_AS(run_fastica(y, 4, kLogCosh, SolverOptions{}), Error);
  CHECK_THROWS_AS(run_fastica(y, 0, kLogCosh, SolverOptions{}), Error);
  SolverOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(run_fastica(y, 1, kLogCosh, bad), Error);

  MatrixXd deficient = gen.matrix(100, 3);
  deficient.col(2) = 2.0 * deficient.col(1);
  try {
    run_fastica(deficient, 1, kLogCosh, SolverOptions{});
    FAIL("expected rank deficiency");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RankDeficient);
  }
}

TEST_CASE("partial solver options") {
  const auto p = partial_solver_options();
  CHECK(p.tol == 1e-3);
  CHECK(p.max_inner_iters == 10);
  CHECK(p.measure == ConvergenceMeasure::NormedDifference);

  const MatrixXd s = square_and_gaussian(5000, 24);
  MatrixXd a(2, 2);
  a << 1.0, 0.5, 0.3, 1.0;
  const auto r = run_fastica(MatrixXd(s * a.transpose()), 2, kLogCosh, p);
  for (int it : r.iterations) CHECK(it <= 10);
}
