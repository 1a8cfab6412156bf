#include "kdebench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "kdebench/rng.hpp"

namespace kdebench {

namespace {

constexpr std::uint64_t kMixture10dParamSeed = 1002;

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double sine_ridge(double x1) {
  return std::sin(2.0 * std::numbers::pi * x1 / 4.0);
}

double potential_u(int which, double x1, double x2) {
  const double w1 = sine_ridge(x1);
  switch (which) {
    case 1: {
      const double r = std::sqrt(x1 * x1 + x2 * x2);
      const double ridge = 0.5 * ((r - 2.0) / 0.4) * ((r - 2.0) / 0.4);
      const double lobes = std::exp(-0.5 * ((x1 - 2.0) / 0.6) * ((x1 - 2.0) / 0.6)) +
                           std::exp(-0.5 * ((x1 + 2.0) / 0.6) * ((x1 + 2.0) / 0.6));
      return ridge - std::log(lobes);
    }
    case 2: {
      const double t = (x2 - w1) / 0.4;
      return 0.5 * t * t;
    }
    case 3: {
      const double w2 = 3.0 * std::exp(-0.5 * ((x1 - 1.0) / 0.6) * ((x1 - 1.0) / 0.6));
      const double a = (x2 - w1) / 0.35;
      const double b = (x2 - w1 + w2) / 0.35;
      return -std::log(std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b));
    }
    case 4: {
      const double w3 = 3.0 * logistic((x1 - 1.0) / 0.3);
      const double a = (x2 - w1) / 0.4;
      const double b = (x2 - w1 + w3) / 0.35;
      return -std::log(std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b));
    }
    default:
      throw std::logic_error("potential_u: bad index");
  }
}

int potential_index(const SyntheticSpec& spec) {
  if (spec.name.rfind("potential", 0) != 0) return 0;
  return spec.name.back() - '0';
}

double normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / variance) /
         std::sqrt(2.0 * std::numbers::pi * variance);
}

double mixture_density(const SyntheticSpec& spec, PointRef x) {
  double total = 0.0;
  for (int c = 0; c < spec.weights.size(); ++c) {
    double log_comp = 0.0;
    for (int k = 0; k < spec.dim; ++k) {
      const double d = x[k] - spec.means(c, k);
      const double var = spec.variances(c, k);
      log_comp += -0.5 * d * d / var -
                  0.5 * std::log(2.0 * std::numbers::pi * var);
    }
    total += spec.weights[c] * std::exp(log_comp);
  }
  return total;
}

// Box from mixture parameters: per dimension, min/max of mean +- 6 sigma.
void set_mixture_box(SyntheticSpec& spec) {
  spec.support_lo = Point::Constant(spec.dim,
                                    std::numeric_limits<double>::infinity());
  spec.support_hi = Point::Constant(spec.dim,
                                    -std::numeric_limits<double>::infinity());
  for (int c = 0; c < spec.weights.size(); ++c) {
    for (int k = 0; k < spec.dim; ++k) {
      const double sd = std::sqrt(spec.variances(c, k));
      spec.support_lo[k] =
          std::min(spec.support_lo[k], spec.means(c, k) - 6.0 * sd);
      spec.support_hi[k] =
          std::max(spec.support_hi[k], spec.means(c, k) + 6.0 * sd);
    }
  }
}

// Composite trapezoid on an m x m grid over the support box.
double quadrature_z(const SyntheticSpec& spec, int m) {
  const int which = potential_index(spec);
  const double lo = spec.support_lo[0], hi = spec.support_hi[0];
  const double h = (hi - lo) / (m - 1);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x1 = lo + h * i;
    const double wi = (i == 0 || i == m - 1) ? 0.5 : 1.0;
    double row = 0.0;
    for (int j = 0; j < m; ++j) {
      const double x2 = lo + h * j;
      const double wj = (j == 0 || j == m - 1) ? 0.5 : 1.0;
      row += wj * std::exp(-potential_u(which, x1, x2));
    }
    total += wi * row;
  }
  return total * h * h;
}

double max_density_on_grid(const SyntheticSpec& spec, int m) {
  const int which = potential_index(spec);
  const double lo = spec.support_lo[0], hi = spec.support_hi[0];
  const double h = (hi - lo) / (m - 1);
  double max_u = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      max_u = std::min(max_u, potential_u(which, lo + h * i, lo + h * j));
  return std::exp(-max_u) / spec.normalizer;
}

SyntheticSpec make_potential(int which) {
  SyntheticSpec spec;
  spec.name = "potential" + std::to_string(which);
  spec.dim = 2;
  spec.bounded_support = true;
  spec.support_lo = Point::Constant(2, -4.0);
  spec.support_hi = Point::Constant(2, 4.0);
  spec.normalizer = quadrature_z(spec, 2001);
  spec.envelope = 1.1 * max_density_on_grid(spec, 400);
  return spec;
}

SyntheticSpec make_arc() {
  SyntheticSpec spec;
  spec.name = "arc";
  spec.dim = 2;
  // x2 ~ N(0, 4); x1 | x2 ~ N(0.25*x2^2, 1). Box covers +-4.5 sd of x2
  // and the induced x1 range with slack.
  spec.support_lo = Point(2);
  spec.support_hi = Point(2);
  spec.support_lo << -6.0, -10.0;
  spec.support_hi << 27.0, 10.0;
  return spec;
}

SyntheticSpec make_mixture2d() {
  SyntheticSpec spec;
  spec.name = "mixture2d";
  spec.dim = 2;
  spec.means.resize(2, 2);
  spec.means << 1.0, -1.0, -2.0, 2.0;
  spec.variances.resize(2, 2);
  spec.variances << 1.0, 2.0, 2.0, 1.0;
  spec.weights = Vector::Constant(2, 0.5);
  set_mixture_box(spec);
  return spec;
}

}  // namespace

std::vector<std::string> dataset_names() {
  return {"arc",        "potential1", "potential2", "potential3",
          "potential4", "mixture2d",  "mixture10d"};
}

SyntheticSpec make_mixture10d_spec(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.name = "mixture10d";
  spec.dim = 10;
  spec.param_seed = seed;
  constexpr int kComponents = 4;
  spec.means.resize(kComponents, spec.dim);
  spec.variances.resize(kComponents, spec.dim);
  spec.weights = Vector::Constant(kComponents, 0.25);
  Pcg32 rng(seed);
  for (int c = 0; c < kComponents; ++c)
    for (int k = 0; k < spec.dim; ++k) spec.means(c, k) = rng.uniform(-0.5, 0.5);
  for (int c = 0; c < kComponents; ++c)
    for (int k = 0; k < spec.dim; ++k)
      spec.variances(c, k) = rng.uniform(0.01, 0.5);
  set_mixture_box(spec);
  return spec;
}

SyntheticSpec make_spec(const std::string& name) {
  if (name == "arc") return make_arc();
  if (name == "potential1") return make_potential(1);
  if (name == "potential2") return make_potential(2);
  if (name == "potential3") return make_potential(3);
  if (name == "potential4") return make_potential(4);
  if (name == "mixture2d") return make_mixture2d();
  if (name == "mixture10d") return make_mixture10d_spec(kMixture10dParamSeed);
  throw std::invalid_argument("make_spec: unknown dataset '" + name + "'");
}

bool is_potential(const SyntheticSpec& spec) {
  return potential_index(spec) != 0;
}

double potential_energy(const SyntheticSpec& spec, PointRef x) {
  const int which = potential_index(spec);
  if (which == 0)
    throw state_error("potential_energy: '" + spec.name + "' is not a potential");
  if (x.size() != spec.dim)
    throw shape_error("potential_energy: dimension mismatch");
  return potential_u(which, x[0], x[1]);
}

double true_density(const SyntheticSpec& spec, PointRef x) {
  if (x.size() != spec.dim) throw shape_error("true_density: dimension mismatch");
  if (is_potential(spec)) {
    for (int k = 0; k < spec.dim; ++k)
      if (x[k] < spec.support_lo[k] || x[k] > spec.support_hi[k]) return 0.0;
    return std::exp(-potential_energy(spec, x)) / spec.normalizer;
  }
  if (spec.name == "arc")
    return normal_pdf(x[1], 0.0, 4.0) * normal_pdf(x[0], 0.25 * x[1] * x[1], 1.0);
  return mixture_density(spec, x);
}

Vector true_density_batch(const SyntheticSpec& spec, const PointSet& X) {
  Vector out(X.rows());
  for (std::int64_t i = 0; i < X.rows(); ++i)
    out[i] = true_density(spec, X.row(i));
  return out;
}

PointSet sample_dataset(const SyntheticSpec& spec, std::int64_t n,
                        std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
  PointSet out(n, spec.dim);
  Pcg32 rng(seed);

  if (spec.name == "arc") {
    for (std::int64_t i = 0; i < n; ++i) {
      const double x2 = rng.normal(0.0, 2.0);
      const double x1 = rng.normal(0.25 * x2 * x2, 1.0);
      out(i, 0) = x1;
      out(i, 1) = x2;
    }
    return out;
  }

  if (is_potential(spec)) {
    const double m = spec.envelope;
    for (std::int64_t i = 0; i < n; ++i) {
      for (;;) {
        Point u(2);
        u[0] = rng.uniform(spec.support_lo[0], spec.support_hi[0]);
        u[1] = rng.uniform(spec.support_lo[1], spec.support_hi[1]);
        const double f = true_density(spec, u);
        if (f > m)
          throw std::runtime_error(
              "sample_dataset: rejection envelope violated on " + spec.name);
        if (rng.uniform() * m < f) {
          out.row(i) = u;
          break;
        }
      }
    }
    return out;
  }

  // Gaussian mixtures: component, then per-dimension normal.
  const int k = static_cast<int>(spec.weights.size());
  for (std::int64_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    int c = 0;
    double cum = spec.weights[0];
    while (c + 1 < k && u >= cum) cum += spec.weights[++c];
    for (int j = 0; j < spec.dim; ++j)
      out(i, j) = rng.normal(spec.means(c, j), std::sqrt(spec.variances(c, j)));
  }
  return out;
}

NormalizerEstimate estimate_normalizer(const SyntheticSpec& spec,
                                       std::int64_t n_mc, std::uint64_t seed) {
  if (!is_potential(spec))
    throw std::invalid_argument("estimate_normalizer: spec is not a potential");
  if (n_mc < 10000)
    throw std::invalid_argument("estimate_normalizer: n_mc must be >= 1e4");

  const double area = (spec.support_hi - spec.support_lo).prod();
  Pcg32 rng(seed);
  double mean = 0.0, m2 = 0.0;  // Welford
  for (std::int64_t i = 1; i <= n_mc; ++i) {
    Point u(2);
    u[0] = rng.uniform(spec.support_lo[0], spec.support_hi[0]);
    u[1] = rng.uniform(spec.support_lo[1], spec.support_hi[1]);
    const double y = std::exp(-potential_energy(spec, u));
    const double delta = y - mean;
    mean += delta / static_cast<double>(i);
    m2 += delta * (y - mean);
  }
  const double variance = m2 / static_cast<double>(n_mc - 1);
  return {area * mean,
          area * std::sqrt(variance / static_cast<double>(n_mc))};
}

}  // namespace kdebench
