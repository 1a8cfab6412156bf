#include "kdebench/rff.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kdebench/rng.hpp"

namespace kdebench {

RffMap sample_rff_map(int dim, int feature_count, double gamma,
                      std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("sample_rff_map: dim must be >= 1");
  if (feature_count < 1)
    throw std::invalid_argument("sample_rff_map: feature_count must be >= 1");
  if (!(gamma > 0.0))
    throw std::invalid_argument("sample_rff_map: gamma must be positive");

  RffMap map;
  map.gamma = gamma;
  map.seed = seed;
  map.W.resize(feature_count, dim);
  map.b.resize(feature_count);

  Pcg32 rng(seed);
  const double freq_sd = std::sqrt(2.0 * gamma);
  for (int j = 0; j < feature_count; ++j)
    for (int k = 0; k < dim; ++k) map.W(j, k) = freq_sd * rng.normal();
  for (int j = 0; j < feature_count; ++j)
    map.b[j] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return map;
}

Vector transform(const RffMap& map, PointRef x) {
  if (x.size() != map.dim())
    throw shape_error("rff transform: dimension mismatch");
  const double scale = std::sqrt(2.0 / map.feature_count());
  Vector out = map.W * x.transpose() + map.b;
  out = scale * out.array().cos();
  return out;
}

Matrix transform_batch(const RffMap& map, const Eigen::Ref<const PointSet>& X) {
  if (X.cols() != map.dim())
    throw shape_error("rff transform: dimension mismatch");
  const double scale = std::sqrt(2.0 / map.feature_count());
  Matrix out = X * map.W.transpose();
  out.array() = scale * (out.array().rowwise() +
                         map.b.transpose().array())
                            .cos();
  return out;
}

}  // namespace kdebench
