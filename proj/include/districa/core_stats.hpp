#ifndef DISTRICA_CORE_STATS_HPP
#define DISTRICA_CORE_STATS_HPP

// Second-order statistics for ICA preprocessing: covariance, symmetric
// eigendecomposition and symmetric (ZCA) whitening.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <vector>

#include "districa/types.hpp"

namespace districa {

inline constexpr double kDefaultCondLimit = 1e-10;

template <typename Scalar>
struct CovarianceMatrix {
  Mat<Scalar> values;
  Index sample_count = 0;

  CovarianceMatrix() = default;
  CovarianceMatrix(const Mat<Scalar>& raw, Index n)
      : values((raw + raw.transpose()) / Scalar(2)), sample_count(n) {}

  Index dim() const { return values.rows(); }
};

template <typename Scalar>
struct EigenDecomposition {
  Mat<Scalar> eigenvectors;  // columns
  Vec<Scalar> eigenvalues;   // non-increasing
};

template <typename Scalar>
struct WhiteningTransform {
  Mat<Scalar> matrix;
};

/// Column means of an N×C sample matrix.
template <typename Derived>
Vec<typename Derived::Scalar> channel_means(const Eigen::MatrixBase<Derived>& data) {
  return data.colwise().mean().transpose();
}

/// Subtracts the per-channel mean from every row.
template <typename Derived>
Mat<typename Derived::Scalar> centered(const Eigen::MatrixBase<Derived>& data) {
  return data.rowwise() - data.colwise().mean();
}

/// (1/N)·Σ y(t)y(t)ᵀ over the rows of `data`; the per-channel mean is removed
/// first when `center` is set.
template <typename Derived>
CovarianceMatrix<typename Derived::Scalar> sample_covariance(const Eigen::MatrixBase<Derived>& data,
                                                             bool center = true) {
  using Scalar = typename Derived::Scalar;
  require(data.rows() >= 2, ErrorKind::InvalidInput, "covariance needs at least 2 samples");
  const Index n = data.rows();
  Mat<Scalar> gram(data.cols(), data.cols());
  if (center) {
    const Mat<Scalar> c = centered(data);
    gram.noalias() = c.transpose() * c;
  } else {
    gram.noalias() = data.transpose() * data;
  }
  return CovarianceMatrix<Scalar>(gram / Scalar(n), n);
}

template <typename Scalar>
CovarianceMatrix<Scalar> sample_covariance(const SampleBatch<Scalar>& batch, bool center = true) {
  return sample_covariance(batch.data, center);
}

/// Flips each column so that its entry of largest magnitude is positive.
/// Zero columns are left alone. Idempotent.
template <typename Derived>
void fix_signs_inplace(Eigen::MatrixBase<Derived>& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index arg = 0;
    const auto peak = m.col(j).cwiseAbs().maxCoeff(&arg);
    if (peak > 0 && m(arg, j) < 0) m.col(j) = -m.col(j);
  }
}

/// Full symmetric eigendecomposition, eigenvalues sorted descending and each
/// eigenvector signed so its largest-magnitude entry is positive.
template <typename Scalar>
EigenDecomposition<Scalar> sym_eig(const CovarianceMatrix<Scalar>& cov) {
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> solver(cov.values);
  require(solver.info() == Eigen::Success, ErrorKind::NumericalFailure,
          "symmetric eigensolver did not converge");

  const Index c = cov.dim();
  std::vector<Index> order(static_cast<std::size_t>(c));
  std::iota(order.begin(), order.end(), Index{0});
  const auto& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return ev(a) > ev(b); });

  EigenDecomposition<Scalar> out{Mat<Scalar>(c, c), Vec<Scalar>(c)};
  for (Index k = 0; k < c; ++k) {
    out.eigenvalues(k) = ev(order[static_cast<std::size_t>(k)]);
    out.eigenvectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  fix_signs_inplace(out.eigenvectors);
  return out;
}

template <typename Scalar>
EigenDecomposition<Scalar> sym_eig(const Mat<Scalar>& symmetric) {
  return sym_eig(CovarianceMatrix<Scalar>(symmetric, 0));
}

/// T = E·D^{-1/2}·Eᵀ. Throws RankDeficient when λ_min ≤ cond_limit·λ_max.
template <typename Scalar>
WhiteningTransform<Scalar> whitening_transform(const CovarianceMatrix<Scalar>& cov,
                                               Scalar cond_limit = Scalar(kDefaultCondLimit)) {
  const auto eig = sym_eig(cov);
  const Scalar largest = eig.eigenvalues(0);
  const Scalar smallest = eig.eigenvalues(eig.eigenvalues.size() - 1);
  require(largest > Scalar(0) && smallest > cond_limit * largest, ErrorKind::RankDeficient,
          "covariance is not full rank (eigenvalue ratio " + std::to_string(smallest / largest) + ")");
  const Vec<Scalar> inv_sqrt = eig.eigenvalues.cwiseSqrt().cwiseInverse();
  Mat<Scalar> t = eig.eigenvectors * inv_sqrt.asDiagonal() * eig.eigenvectors.transpose();
  return {(t + t.transpose()) / Scalar(2)};
}

/// Symmetric square root R^{1/2}, the inverse of the whitening transform.
template <typename Scalar>
Mat<Scalar> sqrtm_sym(const CovarianceMatrix<Scalar>& cov) {
  const auto eig = sym_eig(cov);
  const Vec<Scalar> root = eig.eigenvalues.cwiseMax(Scalar(0)).cwiseSqrt();
  return eig.eigenvectors * root.asDiagonal() * eig.eigenvectors.transpose();
}

}  // namespace districa

#endif  // DISTRICA_CORE_STATS_HPP
