#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kdebench/common.hpp"

namespace kdebench {

// Isotropic Gaussian bandwidth, gamma = 1/(2*sigma^2).
struct Bandwidth {
  double gamma;
  int dim;

  Bandwidth(double gamma_in, int dim_in) : gamma(gamma_in), dim(dim_in) {
    if (!(gamma > 0.0))
      throw std::invalid_argument("Bandwidth: gamma must be positive");
    if (dim < 1) throw std::invalid_argument("Bandwidth: dim must be >= 1");
  }
};

inline double gamma_from_sigma(double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("gamma_from_sigma: sigma must be positive");
  return 1.0 / (2.0 * sigma * sigma);
}

// (pi/gamma)^(d/2); divides the plain exp(-gamma r^2) sum so the KDE
// integrates to 1.
inline double kde_normalizer(const Bandwidth& bw) {
  return std::pow(std::numbers::pi / bw.gamma, 0.5 * bw.dim);
}

// (pi/(2*gamma))^(d/2); Born-rule normalizer. The density-matrix estimate
// behaves like a kernel sum at doubled gamma, hence the extra factor 2.
inline double dm_normalizer(const Bandwidth& bw) {
  return std::pow(std::numbers::pi / (2.0 * bw.gamma), 0.5 * bw.dim);
}

// (2*pi)^(-d/2) * exp(-gamma |x-y|^2)
inline double gaussian_kernel(PointRef x, PointRef y, const Bandwidth& bw) {
  if (x.size() != bw.dim || y.size() != bw.dim)
    throw shape_error("gaussian_kernel: dimension mismatch");
  return std::pow(2.0 * std::numbers::pi, -0.5 * bw.dim) *
         std::exp(-bw.gamma * (x - y).squaredNorm());
}

}  // namespace kdebench
