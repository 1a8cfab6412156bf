#pragma once

#include "kdebench/common.hpp"
#include "kdebench/kernels.hpp"

namespace kdebench {

// Memory-based KDE, evaluated by direct summation:
//   f(x) = 1/(n * (pi/gamma)^(d/2)) * sum_i exp(-gamma*|x - x_i|^2)
struct ExactKdeModel {
  PointSet train;
  Bandwidth bw;

  std::int64_t size() const { return train.rows(); }
};

ExactKdeModel fit_exact(PointSet X, Bandwidth bw);

double estimate_exact(const ExactKdeModel& model, PointRef x);

enum class ExactStrategy {
  kVectorized,  // chunked  |q|^2 + |x|^2 - 2 q.x  GEMM expansion
  kPerPoint,    // plain scalar loop over (query, training point) pairs
};

Vector estimate_exact_batch(const ExactKdeModel& model, const PointSet& Q,
                            ExactStrategy strategy = ExactStrategy::kVectorized,
                            int threads = 1);

namespace detail {
// Sums v[0..n) in blocks of 2048 with a pairwise reduction over block sums;
// keeps rounding error well under 1e-12 relative at n = 1e5.
double blocked_sum(const double* v, std::int64_t n);
}  // namespace detail

}  // namespace kdebench
