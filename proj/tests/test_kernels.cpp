#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kdebench/kernels.hpp"
#include "kdebench/rng.hpp"
#include "oracles.hpp"

using namespace kdebench;

namespace {
Point make_point(std::initializer_list<double> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) p[i++] = c;
  return p;
}
}  // namespace

TEST_CASE("gamma_from_sigma") {
  CHECK(gamma_from_sigma(1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(gamma_from_sigma(0.5) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(gamma_from_sigma(2.0) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK_THROWS_AS(gamma_from_sigma(0.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma_from_sigma(-0.3), std::invalid_argument);
}

TEST_CASE("bandwidth validation") {
  CHECK_THROWS_AS(Bandwidth(0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(Bandwidth(-1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(Bandwidth(1.0, 0), std::invalid_argument);
  const Bandwidth bw(0.7, 3);
  CHECK(kde_normalizer(bw) > 0.0);
  CHECK(dm_normalizer(bw) > 0.0);
}

TEST_CASE("gaussian_kernel scalar values") {
  const Bandwidth bw2(0.5, 2);
  CHECK(gaussian_kernel(make_point({1.5, -2.0}), make_point({1.5, -2.0}), bw2) ==
        doctest::Approx(0.15915494309189535).epsilon(1e-12));
  CHECK(gaussian_kernel(make_point({0, 0}), make_point({1, 0}), bw2) ==
        doctest::Approx(0.09653235263005391).epsilon(1e-12));
  const Bandwidth bw1(3.0, 1);
  CHECK(gaussian_kernel(make_point({0.0}), make_point({0.0}), bw1) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-12));
  CHECK_THROWS_AS(gaussian_kernel(make_point({0.0}), make_point({0, 0}), bw2),
                  shape_error);
}

TEST_CASE("gaussian_kernel symmetry and bound") {
  Pcg32 rng(11);
  const Bandwidth bw(1.3, 3);
  const double peak = std::pow(2.0 * std::numbers::pi, -1.5);
  for (int t = 0; t < 200; ++t) {
    Point x(3), y(3);
    for (int k = 0; k < 3; ++k) {
      x[k] = rng.normal(0, 2);
      y[k] = rng.normal(0, 2);
    }
    const double kxy = gaussian_kernel(x, y, bw);
    CHECK(kxy == gaussian_kernel(y, x, bw));  // exact
    CHECK(kxy > 0.0);
    CHECK(kxy <= peak);
  }
}

TEST_CASE("normalizer values") {
  CHECK(kde_normalizer(Bandwidth(0.5, 2)) ==
        doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-14));
  CHECK(kde_normalizer(Bandwidth(std::numbers::pi, 2)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(kde_normalizer(Bandwidth(1.0, 4)) ==
        doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-14));

  CHECK(dm_normalizer(Bandwidth(0.5, 2)) ==
        doctest::Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(dm_normalizer(Bandwidth(std::numbers::pi / 2.0, 2)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dm_normalizer(Bandwidth(0.5, 1)) ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("kernel bump integrates to kde_normalizer") {
  // d=1 and d=2 quadrature of exp(-gamma*|x-u|^2) over u.
  for (double gamma : {0.5, 2.0}) {
    const double span = 10.0 / std::sqrt(gamma);
    const double x0 = 0.37;
    const double got1 = testing::quadrature_1d(
        [&](double u) { return std::exp(-gamma * (u - x0) * (u - x0)); },
        x0 - span, x0 + span, 20001);
    CHECK(got1 == doctest::Approx(kde_normalizer(Bandwidth(gamma, 1)))
                      .epsilon(1e-3));

    const double got2 = testing::quadrature_2d(
        [&](double u, double v) {
          return std::exp(-gamma * ((u - x0) * (u - x0) + v * v));
        },
        x0 - span, x0 + span, -span, span, 1201);
    CHECK(got2 == doctest::Approx(kde_normalizer(Bandwidth(gamma, 2)))
                      .epsilon(1e-3));
  }
}
