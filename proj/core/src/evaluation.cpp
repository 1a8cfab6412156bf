#include "kdebench/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string_view>

#include "kdebench/rng.hpp"
#include "kdebench/threading.hpp"

namespace kdebench {

double mean_absolute_error(const Vector& pred, const Vector& truth) {
  if (pred.size() != truth.size())
    throw shape_error("mean_absolute_error: length mismatch");
  if (pred.size() == 0)
    throw std::invalid_argument("mean_absolute_error: empty vectors");
  return (pred - truth).cwiseAbs().mean();
}

namespace {

constexpr double kLogFloor = 1e-300;

double mean_log_density(const Vector& densities) {
  double s = 0.0;
  for (std::int64_t i = 0; i < densities.size(); ++i) {
    const double v = densities[i] > kLogFloor ? densities[i] : kLogFloor;
    s += std::log(v);
  }
  return s / static_cast<double>(densities.size());
}

struct FoldSplit {
  PointSet fit;
  PointSet val;
};

std::vector<FoldSplit> make_folds(const PointSet& X, int folds,
                                  std::uint64_t seed) {
  const std::int64_t n = X.rows();
  const std::vector<int> assignment = cv_fold_assignment(n, folds, seed);
  std::vector<FoldSplit> out(folds);
  for (int f = 0; f < folds; ++f) {
    std::int64_t in_fold = 0;
    for (std::int64_t i = 0; i < n; ++i) in_fold += assignment[i] == f;
    out[f].val.resize(in_fold, X.cols());
    out[f].fit.resize(n - in_fold, X.cols());
    std::int64_t vi = 0, fi = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      if (assignment[i] == f)
        out[f].val.row(vi++) = X.row(i);
      else
        out[f].fit.row(fi++) = X.row(i);
    }
  }
  return out;
}

}  // namespace

std::vector<int> cv_fold_assignment(std::int64_t n, int folds,
                                    std::uint64_t seed) {
  if (folds < 2)
    throw std::invalid_argument("cv_fold_assignment: folds must be >= 2");
  if (n < folds)
    throw std::invalid_argument("cv_fold_assignment: need at least `folds` rows");
  std::vector<std::int64_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Pcg32 rng(seed);
  for (std::int64_t i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.below(static_cast<std::uint32_t>(i + 1))]);

  std::vector<int> assignment(n);
  for (int f = 0; f < folds; ++f) {
    const std::int64_t lo = f * n / folds;
    const std::int64_t hi = (f + 1) * n / folds;
    for (std::int64_t i = lo; i < hi; ++i) assignment[perm[i]] = f;
  }
  return assignment;
}

CvResult cross_validate(const PointSet& X, EstimatorKind kind,
                        const std::vector<double>& gamma_grid,
                        const std::vector<int>& d_grid, int folds,
                        std::uint64_t seed, int threads,
                        const EstimatorParams& base) {
  if (gamma_grid.empty())
    throw std::invalid_argument("cross_validate: empty gamma grid");
  if (folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
  if (X.rows() < folds)
    throw std::invalid_argument("cross_validate: need at least `folds` rows");
  const bool dm = is_dm_kind(kind);
  if (dm && d_grid.empty())
    throw std::invalid_argument("cross_validate: empty feature grid");

  const std::vector<int> feature_grid = dm ? d_grid : std::vector<int>{0};
  const auto n_gamma = static_cast<std::int64_t>(gamma_grid.size());
  const auto n_cells = n_gamma * static_cast<std::int64_t>(feature_grid.size());
  const int d = static_cast<int>(X.cols());

  const std::vector<FoldSplit> splits = make_folds(X, folds, seed);
  std::vector<double> score_sum(n_cells, 0.0);

  for (int f = 0; f < folds; ++f) {
    const FoldSplit& split = splits[f];
    if (!dm) {
      parallel_for(n_gamma, threads, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t g = lo; g < hi; ++g) {
          const ExactKdeModel model =
              fit_exact(split.fit, Bandwidth(gamma_grid[g], d));
          const Vector pred =
              estimate_exact_batch(model, split.val, ExactStrategy::kVectorized, 1);
          score_sum[g] += mean_log_density(pred);
        }
      });
    } else {
      parallel_for(n_cells, threads, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t ci = lo; ci < hi; ++ci) {
          const int features = feature_grid[ci / n_gamma];
          const double gamma = gamma_grid[ci % n_gamma];
          const RffMap map =
              sample_rff_map(d, features, gamma,
                             derive_seed(seed, std::string_view("cv-rff"),
                                         static_cast<std::uint64_t>(ci),
                                         static_cast<std::uint64_t>(f)));
          const DensityMatrixModel model = fit_dmkde(split.fit, map, 1);
          const Vector pred = estimate_dm_batch(model, split.val, 1);
          score_sum[ci] += mean_log_density(pred);
        }
      });
    }
  }

  CvResult result;
  result.table.reserve(n_cells);
  std::int64_t best = 0;
  for (std::int64_t ci = 0; ci < n_cells; ++ci) {
    CvCell cell;
    cell.gamma = gamma_grid[ci % n_gamma];
    cell.rff_features = feature_grid[ci / n_gamma];
    cell.mean_log_density = score_sum[ci] / folds;
    result.table.push_back(cell);
    if (cell.mean_log_density > result.table[best].mean_log_density) best = ci;
  }
  result.best_gamma = result.table[best].gamma;
  result.best_rff_features = result.table[best].rff_features;
  return result;
}

TimingStats benchmark_predict(const FittedEstimator& estimator,
                              const PointSet& Q, int repeats) {
  if (repeats < 3)
    throw std::invalid_argument("benchmark_predict: repeats must be >= 3");

  const Vector warm = estimator.estimate_batch(Q, 1);
  TimingStats stats;
  stats.times_ms.reserve(repeats);
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const Vector out = estimator.estimate_batch(Q, 1);
    const auto t1 = std::chrono::steady_clock::now();
    if (Q.rows() > 0 && !(out.array() == warm.array()).all())
      throw std::runtime_error(
          "benchmark_predict: outputs differ between repeats");
    stats.times_ms.push_back(
        std::chrono::duration<double, std::milli>(t1 - t0).count());
  }

  std::vector<double> sorted = stats.times_ms;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  stats.median_ms = (sorted.size() % 2 == 1)
                        ? sorted[mid]
                        : 0.5 * (sorted[mid - 1] + sorted[mid]);
  const double mean =
      std::accumulate(sorted.begin(), sorted.end(), 0.0) / sorted.size();
  double var = 0.0;
  for (double t : sorted) var += (t - mean) * (t - mean);
  stats.std_ms = std::sqrt(var / (sorted.size() - 1));
  return stats;
}

std::vector<double> make_gamma_grid(int lo_exp, int hi_exp) {
  if (lo_exp > hi_exp)
    throw std::invalid_argument("make_gamma_grid: lo_exp > hi_exp");
  std::vector<double> grid;
  grid.reserve(hi_exp - lo_exp + 1);
  for (int e = lo_exp; e <= hi_exp; ++e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

namespace {

double mae_standard_error(const Vector& pred, const Vector& truth,
                          double mae) {
  const std::int64_t m = pred.size();
  if (m < 2) return 0.0;
  double var = 0.0;
  for (std::int64_t i = 0; i < m; ++i) {
    const double e = std::abs(pred[i] - truth[i]) - mae;
    var += e * e;
  }
  var /= static_cast<double>(m - 1);
  return std::sqrt(var / static_cast<double>(m));
}

}  // namespace

std::vector<EvalReport> run_experiment_grid(const GridConfig& config,
                                            std::ostream* log) {
  if (config.gamma_grid.empty())
    throw std::invalid_argument("run_experiment_grid: empty gamma grid");
  if (config.datasets.empty() || config.estimators.empty() ||
      config.sizes.empty())
    throw std::invalid_argument("run_experiment_grid: empty grid axis");
  for (std::int64_t s : config.sizes)
    if (s < 1)
      throw std::invalid_argument("run_experiment_grid: sizes must be >= 1");

  std::vector<EvalReport> reports;
  for (const std::string& dataset : config.datasets) {
    const SyntheticSpec spec = make_spec(dataset);
    for (const std::int64_t n : config.sizes) {
      for (int attempt = 0; attempt < config.attempts; ++attempt) {
        // Train/test draws are shared by every estimator of the cell so
        // MAE comparisons are paired, like the paper's tables.
        const std::uint64_t data_seed =
            derive_seed(config.master_seed, std::string_view(dataset),
                        static_cast<std::uint64_t>(n),
                        static_cast<std::uint64_t>(attempt));
        const PointSet train = sample_dataset(
            spec, n, derive_seed(data_seed, std::string_view("train")));
        const PointSet test =
            sample_dataset(spec, config.test_size,
                           derive_seed(data_seed, std::string_view("test")));
        const Vector truth = true_density_batch(spec, test);

        // One CV per engine class: the kernel-sum estimators share their
        // objective exactly; so do the two dm variants.
        std::optional<CvResult> cv_kde, cv_dm;
        auto cv_for = [&](EstimatorKind kind) -> const CvResult& {
          if (is_dm_kind(kind)) {
            if (!cv_dm)
              cv_dm = cross_validate(
                  train, EstimatorKind::kDmkde, config.gamma_grid,
                  config.d_grid, config.folds,
                  derive_seed(data_seed, std::string_view("cv-dm")),
                  config.threads);
            return *cv_dm;
          }
          if (!cv_kde)
            cv_kde = cross_validate(
                train, EstimatorKind::kRaw, config.gamma_grid, {},
                config.folds,
                derive_seed(data_seed, std::string_view("cv-kde")),
                config.threads);
          return *cv_kde;
        };

        for (const EstimatorConfig& ec : config.estimators) {
          EvalReport report;
          report.dataset = dataset;
          report.estimator = to_string(ec.kind);
          report.n_train = n;
          report.n_test = config.test_size;
          report.repeats = config.repeats;
          report.seed = derive_seed(config.master_seed,
                                    std::string_view(dataset),
                                    std::string_view(report.estimator),
                                    static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(attempt));
          try {
            const CvResult& cv = cv_for(ec.kind);
            EstimatorParams params = ec.params;
            params.rff_seed = derive_seed(report.seed, std::string_view("rff"));
            if (is_dm_kind(ec.kind))
              params.rff_features = cv.best_rff_features;
            const Bandwidth bw(cv.best_gamma, spec.dim);

            const FittedEstimator est = FittedEstimator::fit(
                ec.kind, train, bw, params, config.threads);
            const Vector pred = est.estimate_batch(test, config.threads);

            report.gamma = cv.best_gamma;
            if (is_dm_kind(ec.kind)) {
              report.rff_features = params.rff_features;
              if (ec.kind == EstimatorKind::kDmkdeLr)
                report.rank = est.dm()->rank();
            }
            report.mae = mean_absolute_error(pred, truth);
            report.mae_std = mae_standard_error(pred, truth, report.mae);

            const TimingStats timing =
                benchmark_predict(est, test, config.repeats);
            report.predict_time_ms = timing.median_ms;
            report.time_std_ms = timing.std_ms;
          } catch (const std::exception& e) {
            report.error = e.what();
          }
          if (log) {
            *log << dataset << " " << report.estimator << " n=" << n
                 << " attempt=" << attempt;
            if (report.error.empty())
              *log << " gamma=" << report.gamma << " mae=" << report.mae
                   << " time_ms=" << report.predict_time_ms;
            else
              *log << " FAILED: " << report.error;
            *log << std::endl;
          }
          reports.push_back(std::move(report));
        }
      }
    }
  }
  return reports;
}

}  // namespace kdebench
