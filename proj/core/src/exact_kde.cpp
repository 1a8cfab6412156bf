#include "kdebench/exact_kde.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "kdebench/threading.hpp"

namespace kdebench {
namespace detail {
namespace {

constexpr std::int64_t kBlock = 2048;

double pairwise(const double* v, std::int64_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::int64_t h = n / 2;
  return pairwise(v, h) + pairwise(v + h, n - h);
}

}  // namespace

double blocked_sum(const double* v, std::int64_t n) {
  if (n <= kBlock) return pairwise(v, n);
  std::vector<double> partials;
  partials.reserve(static_cast<std::size_t>((n + kBlock - 1) / kBlock));
  for (std::int64_t b = 0; b < n; b += kBlock) {
    const std::int64_t len = std::min(kBlock, n - b);
    double s = 0.0;
    for (std::int64_t i = 0; i < len; ++i) s += v[b + i];
    partials.push_back(s);
  }
  return pairwise(partials.data(), static_cast<std::int64_t>(partials.size()));
}

}  // namespace detail

ExactKdeModel fit_exact(PointSet X, Bandwidth bw) {
  if (X.rows() == 0)
    throw std::invalid_argument("fit_exact: empty training set");
  if (X.cols() != bw.dim)
    throw shape_error("fit_exact: data dimension does not match bandwidth");
  require_finite(X, "fit_exact");
  return ExactKdeModel{std::move(X), bw};
}

double estimate_exact(const ExactKdeModel& model, PointRef x) {
  if (x.size() != model.bw.dim)
    throw shape_error("estimate_exact: query dimension mismatch");
  const std::int64_t n = model.size();
  const double gamma = model.bw.gamma;

  Eigen::ArrayXd vals;
  std::vector<double> partials;
  for (std::int64_t b = 0; b < n; b += detail::kBlock) {
    const std::int64_t len = std::min(detail::kBlock, n - b);
    vals = (-gamma * (model.train.middleRows(b, len).rowwise() - x)
                         .rowwise()
                         .squaredNorm()
                         .array())
               .exp();
    partials.push_back(vals.sum());
  }
  const double s = detail::blocked_sum(
      partials.data(), static_cast<std::int64_t>(partials.size()));
  return s / (static_cast<double>(n) * kde_normalizer(model.bw));
}

namespace {

void batch_vectorized(const ExactKdeModel& model, const PointSet& Q,
                      std::int64_t lo, std::int64_t hi, Vector& out) {
  const std::int64_t n = model.size();
  const double gamma = model.bw.gamma;
  const double scale = 1.0 / (static_cast<double>(n) * kde_normalizer(model.bw));
  const Vector train_sq = model.train.rowwise().squaredNorm();

  // Bound the scratch product to ~32 MB per worker.
  const std::int64_t chunk =
      std::max<std::int64_t>(1, std::min<std::int64_t>(hi - lo, 4000000 / n));
  PointSet G;
  Eigen::ArrayXd row(n);
  for (std::int64_t b = lo; b < hi; b += chunk) {
    const std::int64_t c = std::min(chunk, hi - b);
    G.noalias() = Q.middleRows(b, c) * model.train.transpose();
    for (std::int64_t i = 0; i < c; ++i) {
      const double q_sq = Q.row(b + i).squaredNorm();
      row = (-gamma *
             (train_sq.transpose().array() - 2.0 * G.row(i).array() + q_sq))
                .exp();
      out[b + i] = scale * detail::blocked_sum(row.data(), n);
    }
  }
}

void batch_per_point(const ExactKdeModel& model, const PointSet& Q,
                     std::int64_t lo, std::int64_t hi, Vector& out) {
  const std::int64_t n = model.size();
  const int d = model.bw.dim;
  const double gamma = model.bw.gamma;
  const double scale = 1.0 / (static_cast<double>(n) * kde_normalizer(model.bw));

  std::vector<double> partials;
  for (std::int64_t i = lo; i < hi; ++i) {
    partials.clear();
    const double* q = Q.row(i).data();
    double s = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
      const double* p = model.train.row(j).data();
      double d2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double diff = q[k] - p[k];
        d2 += diff * diff;
      }
      s += std::exp(-gamma * d2);
      if ((j + 1) % 2048 == 0) {
        partials.push_back(s);
        s = 0.0;
      }
    }
    partials.push_back(s);
    out[i] = scale * detail::blocked_sum(
                         partials.data(),
                         static_cast<std::int64_t>(partials.size()));
  }
}

}  // namespace

Vector estimate_exact_batch(const ExactKdeModel& model, const PointSet& Q,
                            ExactStrategy strategy, int threads) {
  if (Q.rows() > 0 && Q.cols() != model.bw.dim)
    throw shape_error("estimate_exact_batch: query dimension mismatch");
  Vector out(Q.rows());
  parallel_for(Q.rows(), threads, [&](std::int64_t lo, std::int64_t hi) {
    if (strategy == ExactStrategy::kVectorized)
      batch_vectorized(model, Q, lo, hi, out);
    else
      batch_per_point(model, Q, lo, hi, out);
  });
  return out;
}

}  // namespace kdebench
