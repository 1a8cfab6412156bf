// Acceptance suite: runs every shipping criterion end to end and prints
// one pass/fail line per criterion. Criterion ids can be passed as
// arguments to run a subset, e.g. `kdebench_acceptance 1 4 7`.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "kdebench/dm_kde.hpp"
#include "kdebench/estimator.hpp"
#include "kdebench/evaluation.hpp"
#include "kdebench/exact_kde.hpp"
#include "kdebench/io.hpp"
#include "kdebench/rng.hpp"
#include "kdebench/spatial_tree.hpp"
#include "kdebench/synthetic.hpp"
#include "kdebench/threading.hpp"
#include "oracles.hpp"

using namespace kdebench;

namespace {

struct CheckResult {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

PointSet normal_1d(std::int64_t n, std::uint64_t seed) {
  Pcg32 rng(seed);
  PointSet X(n, 1);
  for (std::int64_t i = 0; i < n; ++i) X(i, 0) = rng.normal(0.0, 2.0);
  return X;
}

double max_relative_dev(const Vector& got, const Vector& want) {
  double worst = 0.0;
  for (std::int64_t i = 0; i < got.size(); ++i) {
    const double denom = want[i] > 0.0 ? want[i] : 1e-300;
    worst = std::max(worst, std::abs(got[i] - want[i]) / denom);
  }
  return worst;
}

// --- 1. tree estimators at zero tolerance match exact KDE -----------------

CheckResult criterion1() {
  CheckResult r;
  double worst = 0.0;
  std::string worst_case;

  auto compare = [&](const std::string& label, const PointSet& X,
                     const PointSet& Q, double gamma) {
    const Bandwidth bw(gamma, static_cast<int>(X.cols()));
    const ExactKdeModel exact = fit_exact(X, bw);
    const Vector truth = estimate_exact_batch(exact, Q, ExactStrategy::kVectorized, 2);
    const SpatialTree kd = build_kd_tree(X, 40, bw);
    const SpatialTree ball = build_ball_tree(X, 40, bw);
    const double dev_kd =
        max_relative_dev(estimate_tree_batch(kd, Q, 0.0, 0.0, 2), truth);
    const double dev_ball =
        max_relative_dev(estimate_tree_batch(ball, Q, 0.0, 0.0, 2), truth);
    const double dev = std::max(dev_kd, dev_ball);
    if (dev > worst) {
      worst = dev;
      worst_case = label;
    }
  };

  compare("1d-normal", normal_1d(1000, 101), normal_1d(1000, 102), 0.5);
  for (const std::string& name : dataset_names()) {
    const SyntheticSpec spec = make_spec(name);
    compare(name, sample_dataset(spec, 1000, 103), sample_dataset(spec, 1000, 104),
            1.0);
  }

  r.pass = worst <= 1e-10;
  r.detail = "max relative deviation " + fmt(worst) + " (limit 1e-10, worst on " +
             worst_case + ")";
  return r;
}

// --- 2. tree tolerance guarantee ------------------------------------------

CheckResult criterion2() {
  CheckResult r;
  const SyntheticSpec spec = make_spec("arc");
  const PointSet X = sample_dataset(spec, 10000, 201);
  const PointSet Q = sample_dataset(spec, 1000, 202);
  const Bandwidth bw(4.0, 2);
  const ExactKdeModel exact_model = fit_exact(X, bw);
  const Vector truth =
      estimate_exact_batch(exact_model, Q, ExactStrategy::kVectorized, 2);
  const SpatialTree kd = build_kd_tree(X, 40, bw);
  const SpatialTree ball = build_ball_tree(X, 40, bw);

  std::ostringstream detail;
  for (double rtol : {1e-2, 1e-4, 1e-6}) {
    for (const SpatialTree* tree : {&kd, &ball}) {
      const Vector got = estimate_tree_batch(*tree, Q, 0.0, rtol, 2);
      std::int64_t within = 0;
      double worst = 0.0;
      for (std::int64_t i = 0; i < Q.rows(); ++i) {
        const double rel = std::abs(got[i] - truth[i]) / truth[i];
        within += rel <= rtol;
        worst = std::max(worst, rel);
      }
      const double frac =
          static_cast<double>(within) / static_cast<double>(Q.rows());
      if (frac < 0.99 || worst > rtol + 1e-9) r.pass = false;
      if (tree == &kd)
        detail << "rtol=" << fmt(rtol) << ": " << fmt(100.0 * frac)
               << "% within (max " << fmt(worst) << ")  ";
    }
  }
  r.detail = detail.str();
  return r;
}

// --- 3. Born-rule identity --------------------------------------------------

CheckResult criterion3() {
  CheckResult r;
  Pcg32 rng(301);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(100));
    const int d_count = 1 + static_cast<int>(rng.below(200));
    PointSet X(n, 2);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < 2; ++k) X(i, k) = rng.normal();
    const RffMap map = sample_rff_map(2, d_count, 1.0, 3000 + trial);
    const DensityMatrixModel model = fit_dmkde(X, map);

    Point q(2);
    q << rng.normal(), rng.normal();
    const Vector phi_q = transform(map, q);
    double expansion = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dot = phi_q.dot(transform(map, X.row(i)));
      expansion += dot * dot;
    }
    expansion /= n;
    const double born = estimate_dm(model, q) * dm_normalizer(model.bw);
    worst = std::max(worst, std::abs(born - expansion));
  }
  r.pass = worst <= 1e-10;
  r.detail = "max |born - expansion| = " + fmt(worst) + " (limit 1e-10)";
  return r;
}

// --- 4. RFF convergence ------------------------------------------------------

CheckResult criterion4() {
  CheckResult r;
  Pcg32 rng(401);
  std::ostringstream detail;
  for (int d_count : {100, 1000}) {
    const double limit = 4.0 / std::sqrt(static_cast<double>(d_count));
    double worst = 0.0;
    for (int pair = 0; pair < 20; ++pair) {
      Point x(2), y(2);
      for (int k = 0; k < 2; ++k) {
        x[k] = rng.normal();
        y[k] = rng.normal();
      }
      const double truth = std::exp(-0.5 * (x - y).squaredNorm());
      double mean = 0.0;
      for (int s = 0; s < 20; ++s) {
        const RffMap map =
            sample_rff_map(2, d_count, 0.5, 4000 + 100 * pair + s);
        mean += transform(map, x).dot(transform(map, y));
      }
      mean /= 20.0;
      worst = std::max(worst, std::abs(mean - truth));
    }
    if (worst > limit) r.pass = false;
    detail << "D=" << d_count << ": max dev " << fmt(worst) << " (limit "
           << fmt(limit) << ")  ";
  }
  r.detail = detail.str();
  return r;
}

// --- 5. bandwidth-doubling correspondence -----------------------------------

CheckResult criterion5() {
  CheckResult r;
  const SyntheticSpec spec = make_spec("mixture2d");
  const PointSet X = sample_dataset(spec, 200, 501);
  const PointSet Q = sample_dataset(spec, 200, 502);
  const double gamma = 0.5;

  const RffMap map = sample_rff_map(2, 5000, gamma, 503);
  const DensityMatrixModel dm = fit_dmkde(X, map, 2);
  const ExactKdeModel exact = fit_exact(X, Bandwidth(2.0 * gamma, 2));

  const Vector a = estimate_dm_batch(dm, Q, 2);
  const Vector b = estimate_exact_batch(exact, Q, ExactStrategy::kVectorized, 2);
  std::vector<double> rel;
  for (std::int64_t i = 0; i < Q.rows(); ++i)
    rel.push_back(std::abs(a[i] - b[i]) / b[i]);
  const double med = testing::median_of(rel);
  r.pass = med <= 0.05;
  r.detail = "median relative deviation " + fmt(med) + " (limit 0.05, D=5000)";
  return r;
}

// --- 6. low-rank fidelity ----------------------------------------------------

CheckResult criterion6() {
  CheckResult r;
  const SyntheticSpec spec = make_spec("mixture2d");
  const PointSet X = sample_dataset(spec, 1000, 601);
  const PointSet Q = sample_dataset(spec, 100, 602);
  const RffMap map = sample_rff_map(2, 500, 2.0, 603);
  const DensityMatrixModel model = fit_dmkde(X, map, 2);

  const Vector full = estimate_dm_batch(model, Q, 2);
  const DensityMatrixModel exact_rank = factorize(model, 500);
  const double dev_full =
      max_relative_dev(estimate_dm_lowrank_batch(exact_rank, Q, 2), full);

  const DensityMatrixModel auto_rank = factorize(model, kAutoRank);
  std::vector<double> rel;
  const Vector lr = estimate_dm_lowrank_batch(auto_rank, Q, 2);
  for (std::int64_t i = 0; i < Q.rows(); ++i)
    rel.push_back(std::abs(lr[i] - full[i]) / (full[i] > 0 ? full[i] : 1e-300));
  const double med = testing::median_of(rel);

  r.pass = dev_full <= 1e-8 && med <= 1e-2;
  r.detail = "r=D max rel " + fmt(dev_full) + " (limit 1e-8); auto rank " +
             std::to_string(auto_rank.rank()) + "/500 median rel " + fmt(med) +
             " (limit 1e-2)";
  return r;
}

// --- 7. normalizing constants (paper numbers) --------------------------------

CheckResult criterion7() {
  CheckResult r;
  const std::pair<const char*, double> targets[] = {{"potential1", 6.52},
                                                    {"potential2", 8.0},
                                                    {"potential3", 13.9},
                                                    {"potential4", 13.9}};
  std::ostringstream detail;
  for (const auto& [name, target] : targets) {
    const SyntheticSpec spec = make_spec(name);
    const NormalizerEstimate z = estimate_normalizer(spec, 1000000, 701);
    const double rel = std::abs(z.z - target) / target;
    if (rel > 0.05) r.pass = false;
    detail << name << ": Z=" << fmt(z.z) << " vs " << fmt(target) << " ("
           << fmt(100.0 * rel) << "%)  ";
  }
  r.detail = detail.str();
  return r;
}

// --- 8. desk-scale Table 1 shape ---------------------------------------------

CheckResult criterion8() {
  CheckResult r;
  const int threads = default_thread_count();
  std::ostringstream detail;

  for (const std::string& name : {std::string("arc"), std::string("mixture2d")}) {
    const SyntheticSpec spec = make_spec(name);
    const PointSet train = sample_dataset(spec, 10000, 801);
    const PointSet test = sample_dataset(spec, 1000, 802);
    const Vector truth = true_density_batch(spec, test);

    const CvResult cv_kde = cross_validate(
        train, EstimatorKind::kRaw, make_gamma_grid(-10, 10), {}, 5, 803,
        threads);
    const Bandwidth bw(cv_kde.best_gamma, 2);

    const ExactKdeModel exact = fit_exact(train, bw);
    const double mae_exact = mean_absolute_error(
        estimate_exact_batch(exact, test, ExactStrategy::kVectorized, threads),
        truth);

    const SpatialTree kd = build_kd_tree(train, 40, bw);
    const SpatialTree ball = build_ball_tree(train, 40, bw);
    const double mae_kd =
        mean_absolute_error(estimate_tree_batch(kd, test, 0.0, 1e-8, threads), truth);
    const double mae_ball = mean_absolute_error(
        estimate_tree_batch(ball, test, 0.0, 1e-8, threads), truth);

    const CvResult cv_dm =
        cross_validate(train, EstimatorKind::kDmkde, make_gamma_grid(-10, 10),
                       {500}, 5, 804, threads);
    const RffMap map = sample_rff_map(2, cv_dm.best_rff_features,
                                      cv_dm.best_gamma, 805);
    const DensityMatrixModel dm = fit_dmkde(train, map, threads);
    const double mae_dm =
        mean_absolute_error(estimate_dm_batch(dm, test, threads), truth);

    const bool ok = mae_exact <= 0.005 && mae_kd <= 0.005 &&
                    mae_ball <= 0.005 && mae_dm <= 10.0 * mae_exact;
    if (!ok) r.pass = false;
    detail << name << ": exact " << fmt(mae_exact) << ", kd " << fmt(mae_kd)
           << ", ball " << fmt(mae_ball) << " (limits 0.005); dmkde "
           << fmt(mae_dm) << " (limit " << fmt(10.0 * mae_exact) << ")  ";
  }
  r.detail = detail.str();
  return r;
}

// --- 9. Table 2 trend ---------------------------------------------------------

CheckResult criterion9() {
  CheckResult r;
  const SyntheticSpec spec = make_spec("mixture2d");
  const Bandwidth bw(1.0, 2);
  const PointSet Q = sample_dataset(spec, 1000, 901);
  EstimatorParams dm_params;
  dm_params.rff_features = 500;
  dm_params.rff_seed = 902;

  // (a) dm prediction time is independent of the training size
  const PointSet tiny = sample_dataset(spec, 100, 903);
  const PointSet huge = sample_dataset(spec, 100000, 904);
  const FittedEstimator dm_tiny =
      FittedEstimator::fit(EstimatorKind::kDmkde, tiny, bw, dm_params, 2);
  const FittedEstimator dm_huge =
      FittedEstimator::fit(EstimatorKind::kDmkde, huge, bw, dm_params, 2);
  const double t_dm_tiny = benchmark_predict(dm_tiny, Q, 5).median_ms;
  const double t_dm_huge = benchmark_predict(dm_huge, Q, 5).median_ms;
  const double dm_ratio = t_dm_huge / t_dm_tiny;

  // (b) exact prediction time grows at least 5x per decade beyond n=1e3
  double t_exact[3];
  const std::int64_t sizes[3] = {1000, 10000, 100000};
  for (int i = 0; i < 3; ++i) {
    const FittedEstimator raw = FittedEstimator::fit(
        EstimatorKind::kRaw, huge.topRows(sizes[i]), bw, {}, 2);
    t_exact[i] = benchmark_predict(raw, Q, 5).median_ms;
  }
  const double decade1 = t_exact[1] / t_exact[0];
  const double decade2 = t_exact[2] / t_exact[1];

  // (c) factorized dm beats exact KDE by at least 5x at n=1e5
  EstimatorParams lr_params = dm_params;
  lr_params.rank = kAutoRank;
  const FittedEstimator lr =
      FittedEstimator::fit(EstimatorKind::kDmkdeLr, huge, bw, lr_params, 2);
  const double t_lr = benchmark_predict(lr, Q, 5).median_ms;
  const double speedup = t_exact[2] / t_lr;

  r.pass = dm_ratio <= 1.5 && decade1 >= 5.0 && decade2 >= 5.0 && speedup >= 5.0;
  std::ostringstream detail;
  detail << "(a) dm time ratio n=1e5/1e2 = " << fmt(dm_ratio)
         << " (limit 1.5); (b) exact decade ratios " << fmt(decade1) << ", "
         << fmt(decade2) << " (limit >= 5); (c) dmkde-lr speedup "
         << fmt(speedup) << "x (limit >= 5, rank "
         << std::to_string(lr.dm()->rank()) << ")";
  r.detail = detail.str();
  return r;
}

// --- 10. model persistence ----------------------------------------------------

CheckResult criterion10() {
  CheckResult r;
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / ("kdebench_acc_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  const SyntheticSpec spec = make_spec("mixture2d");
  const PointSet X = sample_dataset(spec, 300, 1001);
  const PointSet Q = sample_dataset(spec, 100, 1002);
  const Bandwidth bw(1.5, 2);

  double worst = 0.0;
  for (EstimatorKind kind :
       {EstimatorKind::kRaw, EstimatorKind::kNaive, EstimatorKind::kTreeKd,
        EstimatorKind::kTreeBall, EstimatorKind::kDmkde,
        EstimatorKind::kDmkdeLr}) {
    EstimatorParams params;
    params.rff_features = 200;
    params.rff_seed = 1003;
    const FittedEstimator est = FittedEstimator::fit(kind, X, bw, params, 2);
    const std::string path = (dir / (to_string(kind) + ".json")).string();
    save_model(path, est);
    const FittedEstimator loaded = load_model(path);
    const Vector a = est.estimate_batch(Q, 1);
    const Vector b = loaded.estimate_batch(Q, 1);
    worst = std::max(worst, max_relative_dev(b, a));
  }
  fs::remove_all(dir);

  r.pass = worst <= 1e-15;
  r.detail = "max relative deviation after save/load " + fmt(worst) +
             " (limit 1e-15, all 6 kinds)";
  return r;
}

// --- 11. density-matrix invariants ---------------------------------------------

CheckResult criterion11() {
  CheckResult r;
  Pcg32 rng(1101);
  double worst_asym = 0.0, worst_eig = 0.0, lo_trace = 1e300, hi_trace = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int d_count = 50 + static_cast<int>(rng.below(151));
    const int n = 50 + static_cast<int>(rng.below(451));
    PointSet X(n, 2);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < 2; ++k) X(i, k) = rng.normal(0, 1.5);
    const double gamma = std::ldexp(1.0, static_cast<int>(rng.below(5)) - 2);
    const RffMap map = sample_rff_map(2, d_count, gamma, 1200 + trial);
    const DensityMatrixModel model = fit_dmkde(X, map);

    worst_asym = std::max(
        worst_asym, (model.rho - model.rho.transpose()).cwiseAbs().maxCoeff());
    const Eigen::SelfAdjointEigenSolver<Matrix> es(model.rho);
    worst_eig = std::min(worst_eig, es.eigenvalues().minCoeff());
    lo_trace = std::min(lo_trace, model.rho.trace());
    hi_trace = std::max(hi_trace, model.rho.trace());
  }
  r.pass = worst_asym <= 1e-12 && worst_eig >= -1e-10 && lo_trace >= 0.8 &&
           hi_trace <= 1.2;
  r.detail = "max asymmetry " + fmt(worst_asym) + ", min eigenvalue " +
             fmt(worst_eig) + ", trace in [" + fmt(lo_trace) + ", " +
             fmt(hi_trace) + "]";
  return r;
}

// --- 12. normalization of the estimates ----------------------------------------

CheckResult criterion12() {
  CheckResult r;
  const int threads = default_thread_count();
  const SyntheticSpec spec = make_spec("mixture2d");
  const PointSet X = sample_dataset(spec, 1000, 1201);

  const CvResult cv_kde = cross_validate(
      X, EstimatorKind::kRaw, make_gamma_grid(-6, 6), {}, 5, 1202, threads);
  const Bandwidth bw(cv_kde.best_gamma, 2);
  const double sigma = 1.0 / std::sqrt(2.0 * bw.gamma);
  const double lo0 = X.col(0).minCoeff() - 6 * sigma;
  const double hi0 = X.col(0).maxCoeff() + 6 * sigma;
  const double lo1 = X.col(1).minCoeff() - 6 * sigma;
  const double hi1 = X.col(1).maxCoeff() + 6 * sigma;

  auto box_integral = [&](const FittedEstimator& est, int m) {
    PointSet grid(m * m, 2);
    const double h0 = (hi0 - lo0) / (m - 1), h1 = (hi1 - lo1) / (m - 1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        grid(i * m + j, 0) = lo0 + h0 * i;
        grid(i * m + j, 1) = lo1 + h1 * j;
      }
    const Vector vals = est.estimate_batch(grid, threads);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      const double wi = (i == 0 || i == m - 1) ? 0.5 : 1.0;
      for (int j = 0; j < m; ++j) {
        const double wj = (j == 0 || j == m - 1) ? 0.5 : 1.0;
        total += wi * wj * vals[i * m + j];
      }
    }
    return total * h0 * h1;
  };

  const FittedEstimator exact =
      FittedEstimator::fit(EstimatorKind::kRaw, X, bw, {}, threads);
  const double mass_exact = box_integral(exact, 401);

  const CvResult cv_dm = cross_validate(
      X, EstimatorKind::kDmkde, make_gamma_grid(-4, 4), {1000}, 5, 1203,
      threads);
  EstimatorParams dm_params;
  dm_params.rff_features = 1000;
  dm_params.rff_seed = 1204;
  const FittedEstimator dm = FittedEstimator::fit(
      EstimatorKind::kDmkde, X, Bandwidth(cv_dm.best_gamma, 2), dm_params,
      threads);
  const double mass_dm = box_integral(dm, 201);

  const bool exact_ok = std::abs(mass_exact - 1.0) <= 0.02;
  const bool dm_ok = std::abs(mass_dm - 1.0) <= 0.02;
  r.pass = exact_ok && dm_ok;
  r.detail = "exact mass " + fmt(mass_exact) + (exact_ok ? " (ok)" : " (FAIL)") +
             ", dmkde mass " + fmt(mass_dm) + (dm_ok ? " (ok)" : " (FAIL)") +
             "; limits 1 +- 0.02";
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    const char* name;
    CheckResult (*fn)();
  };
  const Entry entries[] = {
      {1, "exact-oracle equivalence", criterion1},
      {2, "tree tolerance guarantee", criterion2},
      {3, "born-rule identity", criterion3},
      {4, "rff convergence", criterion4},
      {5, "bandwidth-doubling correspondence", criterion5},
      {6, "low-rank fidelity", criterion6},
      {7, "normalizing constants", criterion7},
      {8, "desk-scale efficacy", criterion8},
      {9, "prediction-time trend", criterion9},
      {10, "model persistence", criterion10},
      {11, "density-matrix invariants", criterion11},
      {12, "normalization of estimates", criterion12},
  };

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Entry& entry : entries) {
    if (!wanted.empty() && !wanted.count(entry.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult result;
    try {
      result = entry.fn();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] criterion %2d (%s): %s [%.1fs]\n",
                result.pass ? "PASS" : "FAIL", entry.id, entry.name,
                result.detail.c_str(), seconds);
    std::fflush(stdout);
    failures += !result.pass;
  }

  if (failures)
    std::printf("%d criterion(s) failed\n", failures);
  else
    std::printf("all criteria passed\n");
  return failures == 0 ? 0 : 1;
}
