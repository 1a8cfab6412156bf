#pragma once

#include <cstdint>

#include "kdebench/common.hpp"
#include "kdebench/kernels.hpp"
#include "kdebench/rff.hpp"

namespace kdebench {

// Density-matrix KDE: rho = (1/n) * sum_i phi(x_i) phi(x_i)^T accumulated
// over RFF embeddings, queried through the Born rule
//   f(x) = phi(x)^T rho phi(x) / (pi/(2*gamma))^(d/2).
// Prediction cost is independent of the training size; optionally the
// spectral factorization rho = V^T diag(lambda) V drops it to O(D*r).
struct DensityMatrixModel {
  RffMap map;
  Bandwidth bw;
  std::int64_t n_train = 0;
  Matrix rho;       // D x D symmetric PSD; may be empty on factorized loads
  Matrix eigvecs;   // V: r x D, rows orthonormal
  Vector eigvals;   // lambda: r, descending, clamped at 0

  bool has_rho() const { return rho.size() > 0; }
  bool has_factorization() const { return eigvals.size() > 0; }
  int feature_count() const { return map.feature_count(); }
  int rank() const { return static_cast<int>(eigvals.size()); }
};

// Streaming accumulation in row chunks; never materializes the n x D
// feature matrix.
DensityMatrixModel fit_dmkde(const PointSet& X, const RffMap& map,
                             int threads = 1);

double estimate_dm(const DensityMatrixModel& model, PointRef x);
Vector estimate_dm_batch(const DensityMatrixModel& model, const PointSet& Q,
                         int threads = 1);

// Rank request: kAutoRank keeps the smallest r whose eigenvalue mass
// reaches 0.999 * trace(rho).
inline constexpr int kAutoRank = -1;

DensityMatrixModel factorize(const DensityMatrixModel& model,
                             int rank = kAutoRank);

double estimate_dm_lowrank(const DensityMatrixModel& model, PointRef x);
Vector estimate_dm_lowrank_batch(const DensityMatrixModel& model,
                                 const PointSet& Q, int threads = 1);

}  // namespace kdebench
