#include "districa/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace districa {

double normalized_error(const MatrixXd& estimate, const MatrixXd& reference) {
  require(estimate.rows() == reference.rows() && estimate.cols() == reference.cols(), ErrorKind::InvalidInput,
          "error metric needs equally shaped matrices");
  const double denom = reference.squaredNorm();
  require(denom > 0.0, ErrorKind::InvalidReference, "reference filter is zero");
  return (estimate - reference).squaredNorm() / denom;
}

double aligned_error(const MatrixXd& estimate, const MatrixXd& reference) {
  require(estimate.rows() == reference.rows() && estimate.cols() == reference.cols(), ErrorKind::InvalidInput,
          "error metric needs equally shaped matrices");
  const double denom = reference.squaredNorm();
  require(denom > 0.0, ErrorKind::InvalidReference, "reference filter is zero");
  const Index q = reference.cols();
  // cost(a, b): squared distance of estimate column a to reference column b, best sign.
  MatrixXd cost(q, q);
  for (Index a = 0; a < q; ++a)
    for (Index b = 0; b < q; ++b)
      cost(a, b) = std::min((estimate.col(a) - reference.col(b)).squaredNorm(),
                            (estimate.col(a) + reference.col(b)).squaredNorm());
  std::vector<Index> perm(static_cast<std::size_t>(q));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Index b = 0; b < q; ++b) total += cost(perm[static_cast<std::size_t>(b)], b);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / denom;
}

double median(std::vector<double> values) {
  require(!values.empty(), ErrorKind::InvalidInput, "median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double abs_correlation(const VectorXd& a, const VectorXd& b) {
  require(a.size() == b.size() && a.size() >= 2, ErrorKind::InvalidInput, "correlation needs equal lengths");
  const VectorXd ca = a.array() - a.mean();
  const VectorXd cb = b.array() - b.mean();
  const double denom = ca.norm() * cb.norm();
  if (denom == 0.0) return 0.0;
  return std::abs(ca.dot(cb)) / denom;
}

double matched_min_correlation(const MatrixXd& estimates, const MatrixXd& targets) {
  require(estimates.rows() == targets.rows() && estimates.cols() <= targets.cols(), ErrorKind::InvalidInput,
          "correlation matching needs equal sample counts and enough targets");
  require(targets.cols() <= 8, ErrorKind::InvalidInput, "too many targets for exhaustive matching");
  const Index q = estimates.cols();
  const Index t = targets.cols();
  MatrixXd corr(q, t);
  for (Index a = 0; a < q; ++a)
    for (Index b = 0; b < t; ++b) corr(a, b) = abs_correlation(estimates.col(a), targets.col(b));
  std::vector<Index> perm(static_cast<std::size_t>(t));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = 0.0;
  do {
    double worst = 1.0;
    for (Index a = 0; a < q; ++a) worst = std::min(worst, corr(a, perm[static_cast<std::size_t>(a)]));
    best = std::max(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace districa
