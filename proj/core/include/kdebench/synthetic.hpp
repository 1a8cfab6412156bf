#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kdebench/common.hpp"

namespace kdebench {

// Parameters and exact-density oracle for one benchmark data set.
// Potentials are energies U on a hard support box: density = exp(-U)/Z,
// zero outside; Z comes from dense grid quadrature at construction.
struct SyntheticSpec {
  std::string name;
  int dim = 2;
  Point support_lo, support_hi;  // quadrature box; hard support for potentials
  bool bounded_support = false;
  double normalizer = 1.0;  // potentials: Z
  double envelope = 0.0;    // potentials: rejection envelope (density scale)

  // Gaussian mixture parameters (mixture2d / mixture10d)
  Matrix means;      // k x d
  Matrix variances;  // k x d per-dimension variances
  Vector weights;    // k
  std::uint64_t param_seed = 0;
};

// arc, potential1..potential4, mixture2d, mixture10d
std::vector<std::string> dataset_names();

SyntheticSpec make_spec(const std::string& name);

// Four diagonal-Gaussian components: per-dimension means uniform in
// [-0.5, 0.5], per-dimension variances uniform in [0.01, 0.5], equal
// weights. The drawn parameters live in the spec, so true_density is exact.
SyntheticSpec make_mixture10d_spec(std::uint64_t seed);

bool is_potential(const SyntheticSpec& spec);

// U(x) for potential specs (throws state_error otherwise).
double potential_energy(const SyntheticSpec& spec, PointRef x);

double true_density(const SyntheticSpec& spec, PointRef x);
Vector true_density_batch(const SyntheticSpec& spec, const PointSet& X);

// i.i.d. draws, deterministic per seed. Arc samples ancestrally (x2, then
// x1 | x2), mixtures sample component-then-Gaussian, potentials use
// rejection from a uniform proposal over the support box.
PointSet sample_dataset(const SyntheticSpec& spec, std::int64_t n,
                        std::uint64_t seed);

struct NormalizerEstimate {
  double z = 0.0;
  double std_error = 0.0;
};

// Plain Monte-Carlo integral of exp(-U) over the support box.
NormalizerEstimate estimate_normalizer(const SyntheticSpec& spec,
                                       std::int64_t n_mc, std::uint64_t seed);

}  // namespace kdebench
