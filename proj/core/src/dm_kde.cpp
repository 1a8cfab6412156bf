#include "kdebench/dm_kde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kdebench/threading.hpp"

namespace kdebench {

namespace {
constexpr std::int64_t kFitChunk = 1024;
}

DensityMatrixModel fit_dmkde(const PointSet& X, const RffMap& map,
                             int threads) {
  if (X.rows() == 0)
    throw std::invalid_argument("fit_dmkde: empty training set");
  if (X.cols() != map.dim())
    throw shape_error("fit_dmkde: data dimension does not match map");
  require_finite(X, "fit_dmkde");

  const std::int64_t n = X.rows();
  const int D = map.feature_count();

  // Per-worker partials over contiguous row spans, merged in span order so
  // the accumulation is deterministic for a fixed worker count.
  const int workers = std::max<int>(
      1, static_cast<int>(std::min<std::int64_t>(
             threads, (n + kFitChunk - 1) / kFitChunk)));
  std::vector<Matrix> partials(workers, Matrix::Zero(D, D));
  const std::int64_t span = (n + workers - 1) / workers;
  parallel_for(workers, workers, [&](std::int64_t wlo, std::int64_t whi) {
    for (std::int64_t w = wlo; w < whi; ++w) {
      const std::int64_t lo = w * span;
      const std::int64_t hi = std::min(n, lo + span);
      for (std::int64_t b = lo; b < hi; b += kFitChunk) {
        const std::int64_t c = std::min(kFitChunk, hi - b);
        const Matrix phi = transform_batch(map, X.middleRows(b, c));
        partials[w].selfadjointView<Eigen::Lower>().rankUpdate(
            phi.transpose(), 1.0);
      }
    }
  });

  Matrix acc = std::move(partials[0]);
  for (int w = 1; w < workers; ++w) acc += partials[w];

  DensityMatrixModel model{map,
                           Bandwidth(map.gamma, map.dim()),
                           n,
                           Matrix(),
                           Matrix(),
                           Vector()};
  model.rho = acc.selfadjointView<Eigen::Lower>();
  model.rho /= static_cast<double>(n);
  return model;
}

double estimate_dm(const DensityMatrixModel& model, PointRef x) {
  if (!model.has_rho())
    throw state_error("estimate_dm: model has no rho matrix");
  if (x.size() != model.bw.dim)
    throw shape_error("estimate_dm: query dimension mismatch");
  const Vector phi = transform(model.map, x);
  const double born = phi.dot(model.rho.selfadjointView<Eigen::Lower>() * phi);
  return std::max(born, 0.0) / dm_normalizer(model.bw);
}

Vector estimate_dm_batch(const DensityMatrixModel& model, const PointSet& Q,
                         int threads) {
  if (!model.has_rho())
    throw state_error("estimate_dm_batch: model has no rho matrix");
  if (Q.rows() > 0 && Q.cols() != model.bw.dim)
    throw shape_error("estimate_dm_batch: query dimension mismatch");
  const double z = dm_normalizer(model.bw);
  Vector out(Q.rows());
  parallel_for(Q.rows(), threads, [&](std::int64_t lo, std::int64_t hi) {
    constexpr std::int64_t kChunk = 256;
    for (std::int64_t b = lo; b < hi; b += kChunk) {
      const std::int64_t c = std::min(kChunk, hi - b);
      const Matrix phi = transform_batch(model.map, Q.middleRows(b, c));  // c x D
      const Matrix prod = phi * model.rho.selfadjointView<Eigen::Lower>();
      out.segment(b, c) =
          (prod.array() * phi.array()).rowwise().sum().matrix().cwiseMax(0.0) /
          z;
    }
  });
  return out;
}

DensityMatrixModel factorize(const DensityMatrixModel& model, int rank) {
  if (!model.has_rho())
    throw state_error("factorize: model has no rho matrix");
  const int D = model.feature_count();
  if (rank != kAutoRank && (rank < 1 || rank > D))
    throw std::invalid_argument("factorize: rank out of range");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(model.rho);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("factorize: eigendecomposition failed");

  // Ascending from the solver; flip to descending and clamp rounding
  // negatives before any sqrt sees them.
  Vector lambda = solver.eigenvalues().reverse();
  lambda = lambda.cwiseMax(0.0);

  int r = rank;
  if (rank == kAutoRank) {
    const double target = 0.999 * model.rho.trace();
    double mass = 0.0;
    r = D;
    for (int i = 0; i < D; ++i) {
      mass += lambda[i];
      if (mass >= target) {
        r = i + 1;
        break;
      }
    }
  }

  DensityMatrixModel out = model;
  out.eigvals = lambda.head(r);
  out.eigvecs.resize(r, D);
  for (int i = 0; i < r; ++i)
    out.eigvecs.row(i) = solver.eigenvectors().col(D - 1 - i).transpose();
  return out;
}

double estimate_dm_lowrank(const DensityMatrixModel& model, PointRef x) {
  if (!model.has_factorization())
    throw state_error("estimate_dm_lowrank: model is not factorized");
  if (x.size() != model.bw.dim)
    throw shape_error("estimate_dm_lowrank: query dimension mismatch");
  const Vector phi = transform(model.map, x);
  const Vector proj = model.eigvecs * phi;  // r
  const double born = (model.eigvals.array() * proj.array().square()).sum();
  return std::max(born, 0.0) / dm_normalizer(model.bw);
}

Vector estimate_dm_lowrank_batch(const DensityMatrixModel& model,
                                 const PointSet& Q, int threads) {
  if (!model.has_factorization())
    throw state_error("estimate_dm_lowrank_batch: model is not factorized");
  if (Q.rows() > 0 && Q.cols() != model.bw.dim)
    throw shape_error("estimate_dm_lowrank_batch: query dimension mismatch");
  const double z = dm_normalizer(model.bw);
  Vector out(Q.rows());
  parallel_for(Q.rows(), threads, [&](std::int64_t lo, std::int64_t hi) {
    constexpr std::int64_t kChunk = 256;
    for (std::int64_t b = lo; b < hi; b += kChunk) {
      const std::int64_t c = std::min(kChunk, hi - b);
      const Matrix phi = transform_batch(model.map, Q.middleRows(b, c));  // c x D
      const Matrix proj = phi * model.eigvecs.transpose();                // c x r
      out.segment(b, c) =
          (proj.array().square().matrix() * model.eigvals).cwiseMax(0.0) / z;
    }
  });
  return out;
}

}  // namespace kdebench
