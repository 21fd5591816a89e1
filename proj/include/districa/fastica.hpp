#ifndef DISTRICA_FASTICA_HPP
#define DISTRICA_FASTICA_HPP

// Deflation-based FastICA. Components are returned least-Gaussian first with
// the largest-magnitude entry of every raw-domain filter column positive.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "districa/contrast.hpp"
#include "districa/core_stats.hpp"

namespace districa {

inline constexpr double kDegenerateNorm = 1e-14;

enum class ConvergenceMeasure {
  CosineGap,         // |1 - |w_newᵀ w_old||
  NormedDifference,  // min(‖w_new - w_old‖, ‖w_new + w_old‖)
};

struct SolverOptions {
  double tol = 1e-9;
  int max_inner_iters = 1000;
  std::uint64_t rng_seed = 0;
  ConvergenceMeasure measure = ConvergenceMeasure::CosineGap;
  bool center = true;
  double cond_limit = kDefaultCondLimit;
  int max_restarts = 5;
  // Starting points tried per component; the converged direction with the
  // highest negentropy score is kept.
  int trials = 5;

  void validate() const {
    require(trials >= 1, ErrorKind::InvalidInput, "trials must be >= 1");
    require(tol > 0.0, ErrorKind::InvalidInput, "solver tol must be positive");
    require(max_inner_iters >= 1, ErrorKind::InvalidInput, "max_inner_iters must be >= 1");
  }
};

/// Settings for the partially solved local problems: ‖Δw‖ < 1e-3 or 10 steps.
inline SolverOptions partial_solver_options(std::uint64_t seed = 0) {
  SolverOptions opts;
  opts.tol = 1e-3;
  opts.max_inner_iters = 10;
  opts.measure = ConvergenceMeasure::NormedDifference;
  opts.trials = 1;
  opts.rng_seed = seed;
  return opts;
}

template <typename Scalar>
struct IcaResult {
  Mat<Scalar> demixing_orthogonal;  // W, acts on whitened data
  Mat<Scalar> demixing_raw;         // X = T·W, acts on (centered) raw data
  Vec<Scalar> negentropy_scores;
  std::vector<bool> converged_flags;
  std::vector<int> iterations;
  WhiteningTransform<Scalar> whitening;
  CovarianceMatrix<Scalar> covariance;
  Vec<Scalar> mean;  // zero when centering is off

  Index components() const { return demixing_raw.cols(); }
  bool all_converged() const {
    return std::all_of(converged_flags.begin(), converged_flags.end(), [](bool b) { return b; });
  }
};

/// One fixed-point update on whitened samples z (rows of `whitened`):
/// w ← E[z F'(wᵀz)] - E[F''(wᵀz)] w, then normalized.
template <typename Derived, typename VDerived>
Vec<typename Derived::Scalar> fixed_point_step(const Eigen::MatrixBase<VDerived>& w,
                                               const Eigen::MatrixBase<Derived>& whitened,
                                               const ContrastFunction& contrast) {
  using Scalar = typename Derived::Scalar;
  const Index n = whitened.rows();
  const Vec<Scalar> proj = whitened * w;
  Vec<Scalar> g(n);
  Scalar mean_second = 0;
  for (Index t = 0; t < n; ++t) {
    g(t) = contrast.first(proj(t));
    mean_second += contrast.second(proj(t));
  }
  mean_second /= Scalar(n);
  Vec<Scalar> next = whitened.transpose() * g / Scalar(n) - mean_second * w;
  const Scalar norm = next.norm();
  require(norm >= Scalar(kDegenerateNorm), ErrorKind::DegenerateDirection,
          "fixed-point update collapsed to zero");
  return next / norm;
}

/// w - W·Wᵀ·w. Throws DegenerateDirection if w lies in span(W).
template <typename VDerived, typename MDerived>
Vec<typename VDerived::Scalar> deflate(const Eigen::MatrixBase<VDerived>& w,
                                       const Eigen::MatrixBase<MDerived>& extracted) {
  using Scalar = typename VDerived::Scalar;
  Vec<Scalar> out = w;
  if (extracted.cols() > 0) out -= extracted * (extracted.transpose() * w);
  require(out.norm() >= Scalar(kDegenerateNorm), ErrorKind::DegenerateDirection,
          "direction lies in the span of extracted components");
  return out;
}

/// |mean_t F(wᵀz(t)) - E[F(ν)]|, ν standard normal.
template <typename Derived, typename VDerived>
typename Derived::Scalar negentropy_score(const Eigen::MatrixBase<VDerived>& w,
                                          const Eigen::MatrixBase<Derived>& whitened,
                                          const ContrastFunction& contrast) {
  using Scalar = typename Derived::Scalar;
  const Vec<Scalar> proj = whitened * w;
  Scalar acc = 0;
  for (Index t = 0; t < proj.size(); ++t) acc += contrast.value(proj(t));
  return std::abs(acc / Scalar(proj.size()) - Scalar(gaussian_baseline(contrast.kind)));
}

template <typename Derived>
Mat<typename Derived::Scalar> fix_signs(const Eigen::MatrixBase<Derived>& x) {
  Mat<typename Derived::Scalar> out = x;
  fix_signs_inplace(out);
  return out;
}

/// Σ_m mean_t F(x_mᵀ y(t)), the ICA objective of a raw-domain filter.
template <typename Derived, typename MDerived>
typename Derived::Scalar ica_objective(const Eigen::MatrixBase<MDerived>& filter,
                                       const Eigen::MatrixBase<Derived>& data,
                                       const ContrastFunction& contrast, bool center = true) {
  using Scalar = typename Derived::Scalar;
  const Mat<Scalar> out = center ? Mat<Scalar>(centered(data) * filter) : Mat<Scalar>(data * filter);
  Scalar acc = 0;
  for (Index j = 0; j < out.cols(); ++j) {
    Scalar col = 0;
    for (Index t = 0; t < out.rows(); ++t) col += contrast.value(out(t, j));
    acc += col / Scalar(out.rows());
  }
  return acc;
}

/// Sorts components by descending negentropy score, then applies the sign rule
/// to the raw filters (mirrored on W). Idempotent.
template <typename Scalar>
void order_components(IcaResult<Scalar>& r) {
  const Index q = r.components();
  std::vector<Index> order(static_cast<std::size_t>(q));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return r.negentropy_scores(a) > r.negentropy_scores(b);
  });
  IcaResult<Scalar> sorted = r;
  for (Index k = 0; k < q; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    sorted.demixing_orthogonal.col(k) = r.demixing_orthogonal.col(src);
    sorted.demixing_raw.col(k) = r.demixing_raw.col(src);
    sorted.negentropy_scores(k) = r.negentropy_scores(src);
    sorted.converged_flags[static_cast<std::size_t>(k)] = r.converged_flags[static_cast<std::size_t>(src)];
    sorted.iterations[static_cast<std::size_t>(k)] = r.iterations[static_cast<std::size_t>(src)];
  }
  for (Index k = 0; k < q; ++k) {
    Index arg = 0;
    const Scalar peak = sorted.demixing_raw.col(k).cwiseAbs().maxCoeff(&arg);
    if (peak > 0 && sorted.demixing_raw(arg, k) < 0) {
      sorted.demixing_raw.col(k) *= Scalar(-1);
      sorted.demixing_orthogonal.col(k) *= Scalar(-1);
    }
  }
  r = std::move(sorted);
}

namespace detail {

template <typename Scalar>
bool fixed_point_converged(const Vec<Scalar>& next, const Vec<Scalar>& prev, const SolverOptions& opts) {
  if (opts.measure == ConvergenceMeasure::CosineGap) {
    return std::abs(Scalar(1) - std::abs(next.dot(prev))) < Scalar(opts.tol);
  }
  const Scalar diff = std::min((next - prev).norm(), (next + prev).norm());
  return diff < Scalar(opts.tol);
}

template <typename Scalar>
Vec<Scalar> random_unit(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec<Scalar> w(dim);
  for (Index i = 0; i < dim; ++i) w(i) = Scalar(normal(rng));
  return w / w.norm();
}

}  // namespace detail

/// FastICA with deflation.
///
/// Whitens `data` (N×C), then extracts `q` components one at a time. Each
/// inner loop stops once the convergence measure drops below `opts.tol` or
/// after `opts.max_inner_iters` steps. Each component is tried from
/// `opts.trials` starting points and the least Gaussian result is kept. When
/// `initial_filters` (C×q, raw domain) is given, the first trial of component
/// m starts from its m-th column mapped into the whitened domain; all other
/// starting points are drawn from the unit sphere using `opts.rng_seed`.
/// Degenerate directions restart from a fresh draw.
template <typename Derived>
IcaResult<typename Derived::Scalar> run_fastica(
    const Eigen::MatrixBase<Derived>& data, Index q, const ContrastFunction& contrast,
    const SolverOptions& opts,
    const std::optional<Mat<typename Derived::Scalar>>& initial_filters = std::nullopt) {
  using Scalar = typename Derived::Scalar;
  opts.validate();
  const Index c = data.cols();
  require(q >= 1 && q <= c, ErrorKind::InvalidInput, "component count must lie in [1, channels]");
  require(!initial_filters || (initial_filters->rows() == c && initial_filters->cols() == q),
          ErrorKind::InvalidInput, "initial filter shape mismatch");

  IcaResult<Scalar> r;
  r.covariance = sample_covariance(data, opts.center);
  r.whitening = whitening_transform(r.covariance, Scalar(opts.cond_limit));
  r.mean = opts.center ? channel_means(data) : Vec<Scalar>(Vec<Scalar>::Zero(c));
  const Mat<Scalar> z = (data.rowwise() - r.mean.transpose()) * r.whitening.matrix;

  std::optional<Mat<Scalar>> warm;
  if (initial_filters) warm = sqrtm_sym(r.covariance) * (*initial_filters);

  std::mt19937_64 rng(opts.rng_seed);
  Mat<Scalar> w_all(c, 0);
  r.negentropy_scores.resize(q);

  for (Index m = 0; m < q; ++m) {
    int restarts = 0;
    bool have_best = false;
    Vec<Scalar> best;
    Scalar best_score = 0;
    bool best_converged = false;
    int best_iters = 0;
    for (int trial = 0; trial < opts.trials;) {
      try {
        const bool from_warm = warm.has_value() && trial == 0 && restarts == 0;
        Vec<Scalar> w = from_warm ? Vec<Scalar>(warm->col(m)) : detail::random_unit<Scalar>(c, rng);
        w = deflate(w, w_all);
        w.normalize();
        bool converged = false;
        int iters = 0;
        while (iters < opts.max_inner_iters) {
          Vec<Scalar> next = deflate(fixed_point_step(w, z, contrast), w_all);
          next.normalize();
          ++iters;
          converged = detail::fixed_point_converged(next, w, opts);
          w = std::move(next);
          if (converged) break;
        }
        const Scalar score = negentropy_score(w, z, contrast);
        // Converged candidates beat unconverged ones; ties go to the earlier trial.
        const bool better = !have_best || (converged && !best_converged) ||
                            (converged == best_converged && score > best_score);
        if (better) {
          best = std::move(w);
          best_score = score;
          best_converged = converged;
          best_iters = iters;
          have_best = true;
        }
        ++trial;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateDirection) throw;
        require(++restarts <= opts.max_restarts, ErrorKind::ExtractionFailure,
                "component " + std::to_string(m) + " degenerated too many times");
      }
    }
    w_all.conservativeResize(Eigen::NoChange, m + 1);
    w_all.col(m) = best;
    r.converged_flags.push_back(best_converged);
    r.iterations.push_back(best_iters);
    r.negentropy_scores(m) = best_score;
  }

  r.demixing_orthogonal = std::move(w_all);
  r.demixing_raw = r.whitening.matrix * r.demixing_orthogonal;
  order_components(r);
  return r;
}

template <typename Scalar>
IcaResult<Scalar> run_fastica(const SampleBatch<Scalar>& batch, Index q, const ContrastFunction& contrast,
                              const SolverOptions& opts) {
  return run_fastica(batch.data, q, contrast, opts);
}

}  // namespace districa

#endif  // DISTRICA_FASTICA_HPP
