#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kdebench/estimator.hpp"
#include "kdebench/synthetic.hpp"

namespace kdebench {

// One benchmark grid cell: MAE against the true density plus prediction
// timing. mae_std is the standard error of the mean absolute error over
// the test points; time fields come from benchmark_predict.
struct EvalReport {
  std::string dataset;
  std::string estimator;
  std::int64_t n_train = 0;
  std::int64_t n_test = 0;
  double gamma = 0.0;
  int rff_features = 0;  // 0 when not applicable
  int rank = 0;          // 0 when not applicable
  double mae = 0.0;
  double mae_std = 0.0;
  double predict_time_ms = 0.0;
  double time_std_ms = 0.0;
  int repeats = 0;
  std::uint64_t seed = 0;
  std::string error;  // nonempty when the cell failed
};

double mean_absolute_error(const Vector& pred, const Vector& truth);

struct CvCell {
  double gamma = 0.0;
  int rff_features = 0;
  double mean_log_density = 0.0;
};

struct CvResult {
  double best_gamma = 0.0;
  int best_rff_features = 0;
  std::vector<CvCell> table;
};

// Fold id per row index: a seeded permutation cut into `folds` contiguous
// blocks, so every index lands in exactly one fold.
std::vector<int> cv_fold_assignment(std::int64_t n, int folds,
                                    std::uint64_t seed);

// k-fold selection of gamma (and the RFF feature count for dm kinds) by
// mean held-out log-density, floored at log(1e-300). Folds are contiguous
// blocks of a seeded permutation. d_grid is ignored for non-dm kinds.
CvResult cross_validate(const PointSet& X, EstimatorKind kind,
                        const std::vector<double>& gamma_grid,
                        const std::vector<int>& d_grid, int folds,
                        std::uint64_t seed, int threads = 1,
                        const EstimatorParams& base = {});

struct TimingStats {
  std::vector<double> times_ms;
  double median_ms = 0.0;
  double std_ms = 0.0;
};

// One warm-up batch prediction, then `repeats` timed runs (single thread).
// Outputs must be identical across repeats.
TimingStats benchmark_predict(const FittedEstimator& estimator,
                              const PointSet& Q, int repeats);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::kRaw;
  EstimatorParams params;
};

struct GridConfig {
  std::vector<std::string> datasets;
  std::vector<EstimatorConfig> estimators;
  std::vector<std::int64_t> sizes;
  std::int64_t test_size = 10000;
  int folds = 5;
  std::vector<double> gamma_grid;
  std::vector<int> d_grid = {50, 100, 500, 1000};
  int attempts = 1;
  int repeats = 5;
  std::uint64_t master_seed = 42;
  int threads = 1;
};

// Powers of two 2^lo..2^hi inclusive.
std::vector<double> make_gamma_grid(int lo_exp, int hi_exp);

// Full protocol: per (dataset, estimator, size, attempt) cell, sample
// train/test, CV-select hyperparameters, fit, score MAE against the true
// density, time batch prediction. Cell failures are recorded in the
// report and the grid continues. Timing runs serially.
std::vector<EvalReport> run_experiment_grid(const GridConfig& config,
                                            std::ostream* log = nullptr);

}  // namespace kdebench
