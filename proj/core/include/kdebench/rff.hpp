#pragma once

#include <cstdint>

#include "kdebench/common.hpp"

namespace kdebench {

// Frozen random Fourier feature map for the Gaussian kernel:
//   phi_j(x) = sqrt(2/D) * cos(W_j . x + b_j)
// with W rows drawn from N(0, 2*gamma*I_d) and b from Uniform[0, 2*pi),
// so that E[phi(x).phi(y)] = exp(-gamma*|x-y|^2).
struct RffMap {
  Matrix W;  // D x d frequencies
  Vector b;  // D phases in [0, 2*pi)
  double gamma = 0.0;
  std::uint64_t seed = 0;

  int dim() const { return static_cast<int>(W.cols()); }
  int feature_count() const { return static_cast<int>(W.rows()); }
};

// Deterministic per (dim, feature_count, gamma, seed).
RffMap sample_rff_map(int dim, int feature_count, double gamma,
                      std::uint64_t seed);

// phi(x); every component lies in [-sqrt(2/D), sqrt(2/D)].
Vector transform(const RffMap& map, PointRef x);

// Row i = phi(X.row(i))^T; returns n x D.
Matrix transform_batch(const RffMap& map, const Eigen::Ref<const PointSet>& X);

}  // namespace kdebench
