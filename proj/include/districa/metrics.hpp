#ifndef DISTRICA_METRICS_HPP
#define DISTRICA_METRICS_HPP

#include <vector>

#include "districa/types.hpp"

namespace districa {

/// ‖X - X*‖²_F / ‖X*‖²_F.
double normalized_error(const MatrixXd& estimate, const MatrixXd& reference);

/// normalized_error after the best column permutation and per-column sign of
/// `estimate` (exhaustive over Q! permutations).
double aligned_error(const MatrixXd& estimate, const MatrixXd& reference);

double median(std::vector<double> values);

/// |Pearson correlation| between two equally long signals.
double abs_correlation(const VectorXd& a, const VectorXd& b);

/// Best-permutation minimum of |correlation| between each estimated column
/// and its matched target column. `targets` must have at least as many
/// columns as `estimates`.
double matched_min_correlation(const MatrixXd& estimates, const MatrixXd& targets);

}  // namespace districa

#endif  // DISTRICA_METRICS_HPP
