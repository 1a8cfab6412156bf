// kdebench CLI: dataset generation, model fitting, density estimation and
// the benchmark grid.
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kdebench/estimator.hpp"
#include "kdebench/evaluation.hpp"
#include "kdebench/io.hpp"
#include "kdebench/synthetic.hpp"
#include "kdebench/threading.hpp"

namespace {

using namespace kdebench;

KdSplitRule parse_split_rule(const std::string& name) {
  if (name == "median") return KdSplitRule::kMedian;
  if (name == "sliding-midpoint") return KdSplitRule::kSlidingMidpoint;
  throw std::invalid_argument("unknown split rule '" + name +
                              "' (median|sliding-midpoint)");
}

EstimatorKind require_kind(const std::string& id) {
  const auto kind = parse_estimator(id);
  if (!kind)
    throw std::invalid_argument(
        "unknown estimator '" + id +
        "' (raw|naive|tree-kd|tree-ball|dmkde|dmkde-lr)");
  return *kind;
}

struct CommonOpts {
  std::string dataset;
  std::string estimator = "raw";
  std::int64_t n = 1000;
  std::int64_t test_n = 10000;
  double gamma = 0.0;
  double sigma = 0.0;
  int rff_d = 1000;
  int rank = kAutoRank;
  double atol = 0.0;
  double rtol = 1e-8;
  int leaf_size = 40;
  std::string split_rule = "median";
  int folds = 5;
  std::uint64_t seed = 42;
  int repeats = 5;
  int threads = default_thread_count();
  std::string out;
};

int cmd_generate(const CommonOpts& opt) {
  const SyntheticSpec spec = make_spec(opt.dataset);
  const PointSet X = sample_dataset(spec, opt.n, opt.seed);
  write_points_csv(opt.out, X);
  std::cout << "wrote " << X.rows() << " points (" << spec.name << ", d="
            << spec.dim << ") to " << opt.out << "\n";
  return 0;
}

double resolve_gamma(const CommonOpts& opt, bool has_gamma, bool has_sigma) {
  if (has_gamma && has_sigma)
    throw std::invalid_argument("pass either --gamma or --sigma, not both");
  if (has_sigma) return gamma_from_sigma(opt.sigma);
  if (has_gamma) return opt.gamma;
  throw std::invalid_argument("--gamma or --sigma is required");
}

int cmd_fit(const CommonOpts& opt, const std::string& data_path,
            bool has_gamma, bool has_sigma) {
  const PointSet X = read_points_csv(data_path);
  if (X.rows() == 0) throw data_error("fit: empty data file " + data_path);

  const double gamma = resolve_gamma(opt, has_gamma, has_sigma);
  const Bandwidth bw(gamma, static_cast<int>(X.cols()));

  EstimatorParams params;
  params.atol = opt.atol;
  params.rtol = opt.rtol;
  params.leaf_size = opt.leaf_size;
  params.split_rule = parse_split_rule(opt.split_rule);
  params.rff_features = opt.rff_d;
  params.rank = opt.rank;
  params.rff_seed = opt.seed;

  const auto t0 = std::chrono::steady_clock::now();
  const FittedEstimator est = FittedEstimator::fit(
      require_kind(opt.estimator), X, bw, params, opt.threads);
  const auto t1 = std::chrono::steady_clock::now();

  save_model(opt.out, est);
  std::cout << "fit " << est.id() << " on " << X.rows() << " points in "
            << std::chrono::duration<double, std::milli>(t1 - t0).count()
            << " ms; model written to " << opt.out << "\n";
  return 0;
}

int cmd_estimate(const CommonOpts& opt, const std::string& model_path,
                 const std::string& query_path, bool has_atol,
                 bool has_rtol) {
  FittedEstimator est = load_model(model_path);
  const PointSet Q = read_points_csv(query_path);
  if (Q.rows() > 0 && Q.cols() != est.dim())
    throw shape_error("estimate: query dimension " + std::to_string(Q.cols()) +
                      " does not match model dimension " +
                      std::to_string(est.dim()));

  if (has_atol || has_rtol) {
    EstimatorParams params = est.params();
    if (has_atol) params.atol = opt.atol;
    if (has_rtol) params.rtol = opt.rtol;
    est = est.with_params(params);
  }

  const Vector densities = est.estimate_batch(Q, opt.threads);
  write_density_csv(opt.out, densities);
  std::cout << "wrote " << densities.size() << " densities to " << opt.out
            << "\n";
  return 0;
}

struct BenchmarkOpts {
  std::string preset = "desk";
  std::vector<std::string> datasets;
  std::vector<std::string> estimators;
  std::vector<std::int64_t> sizes;
  std::vector<int> d_grid;
  int gamma_pow_lo = 0;
  int gamma_pow_hi = 0;
  int attempts = 0;
  std::string config_path;
  std::string out = "report";
};

GridConfig preset_config(const std::string& name) {
  GridConfig cfg;
  cfg.datasets = dataset_names();
  for (const char* id :
       {"raw", "naive", "tree-kd", "tree-ball", "dmkde", "dmkde-lr"})
    cfg.estimators.push_back({require_kind(id), {}});
  cfg.d_grid = {50, 100, 500, 1000};
  cfg.test_size = 10000;
  cfg.folds = 5;
  cfg.repeats = 5;
  cfg.master_seed = 42;
  if (name == "desk") {
    cfg.sizes = {10, 100, 1000, 10000};
    cfg.gamma_grid = make_gamma_grid(-10, 10);
    cfg.attempts = 1;
  } else if (name == "paper") {
    cfg.sizes = {10, 100, 1000, 10000, 100000};
    cfg.gamma_grid = make_gamma_grid(-20, 20);
    cfg.attempts = 3;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "' (desk|paper)");
  }
  return cfg;
}

EstimatorConfig estimator_config_from_json(const nlohmann::json& j) {
  EstimatorConfig ec;
  if (j.is_string()) {
    ec.kind = require_kind(j.get<std::string>());
    return ec;
  }
  ec.kind = require_kind(j.at("kind").get<std::string>());
  ec.params.atol = j.value("atol", ec.params.atol);
  ec.params.rtol = j.value("rtol", ec.params.rtol);
  ec.params.leaf_size = j.value("leaf_size", ec.params.leaf_size);
  ec.params.rank = j.value("rank", ec.params.rank);
  if (j.contains("split_rule"))
    ec.params.split_rule = parse_split_rule(j["split_rule"].get<std::string>());
  return ec;
}

void apply_config_file(GridConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw data_error("config parse error in " + path + ": " + e.what());
  }
  if (j.contains("datasets"))
    cfg.datasets = j["datasets"].get<std::vector<std::string>>();
  if (j.contains("estimators")) {
    cfg.estimators.clear();
    for (const auto& e : j["estimators"])
      cfg.estimators.push_back(estimator_config_from_json(e));
  }
  if (j.contains("sizes"))
    cfg.sizes = j["sizes"].get<std::vector<std::int64_t>>();
  if (j.contains("test_n")) cfg.test_size = j["test_n"].get<std::int64_t>();
  if (j.contains("folds")) cfg.folds = j["folds"].get<int>();
  if (j.contains("gamma_pow_lo") || j.contains("gamma_pow_hi")) {
    const int lo = j.value("gamma_pow_lo", -10);
    const int hi = j.value("gamma_pow_hi", 10);
    cfg.gamma_grid = make_gamma_grid(lo, hi);
  }
  if (j.contains("rff_d_grid"))
    cfg.d_grid = j["rff_d_grid"].get<std::vector<int>>();
  if (j.contains("attempts")) cfg.attempts = j["attempts"].get<int>();
  if (j.contains("repeats")) cfg.repeats = j["repeats"].get<int>();
  if (j.contains("seed")) cfg.master_seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
}

int cmd_benchmark(const CommonOpts& opt, const BenchmarkOpts& bopt,
                  const CLI::App* sub) {
  // Precedence: flags > config file > preset.
  GridConfig cfg = preset_config(bopt.preset);
  cfg.threads = opt.threads;
  if (!bopt.config_path.empty()) apply_config_file(cfg, bopt.config_path);

  if (!bopt.datasets.empty()) cfg.datasets = bopt.datasets;
  if (!bopt.estimators.empty()) {
    cfg.estimators.clear();
    for (const std::string& id : bopt.estimators) {
      EstimatorConfig ec;
      ec.kind = require_kind(id);
      ec.params.atol = opt.atol;
      ec.params.rtol = opt.rtol;
      ec.params.leaf_size = opt.leaf_size;
      ec.params.split_rule = parse_split_rule(opt.split_rule);
      ec.params.rank = opt.rank;
      cfg.estimators.push_back(ec);
    }
  }
  if (!bopt.sizes.empty()) cfg.sizes = bopt.sizes;
  if (!bopt.d_grid.empty()) cfg.d_grid = bopt.d_grid;
  if (sub->count("--test-n")) cfg.test_size = opt.test_n;
  if (sub->count("--folds")) cfg.folds = opt.folds;
  if (sub->count("--repeats")) cfg.repeats = opt.repeats;
  if (sub->count("--seed")) cfg.master_seed = opt.seed;
  if (bopt.attempts > 0) cfg.attempts = bopt.attempts;
  if (sub->count("--gamma-pow-lo") || sub->count("--gamma-pow-hi")) {
    const int lo = sub->count("--gamma-pow-lo") ? bopt.gamma_pow_lo : -10;
    const int hi = sub->count("--gamma-pow-hi") ? bopt.gamma_pow_hi : 10;
    cfg.gamma_grid = make_gamma_grid(lo, hi);
  }

  const std::vector<EvalReport> reports = run_experiment_grid(cfg, &std::cerr);
  write_report_csv(bopt.out + ".csv", reports);
  write_report_jsonl(bopt.out + ".jsonl", reports);
  write_aggregate_csv(bopt.out + "_agg.csv", reports);
  std::cout << "wrote " << reports.size() << " report rows to " << bopt.out
            << ".csv / .jsonl / _agg.csv\n";

  const bool all_failed =
      !reports.empty() &&
      std::all_of(reports.begin(), reports.end(),
                  [](const EvalReport& r) { return !r.error.empty(); });
  return all_failed ? 4 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kdebench: KDE estimators, DMKDE and the benchmark harness"};
  app.require_subcommand(1);

  CommonOpts opt;
  BenchmarkOpts bopt;
  std::string data_path, model_path, query_path;

  auto* gen = app.add_subcommand("generate", "sample a synthetic dataset");
  gen->add_option("--dataset", opt.dataset, "dataset name")->required();
  gen->add_option("--n", opt.n, "number of points");
  gen->add_option("--seed", opt.seed, "RNG seed");
  gen->add_option("--out", opt.out, "output CSV")->required();

  auto* fit = app.add_subcommand("fit", "fit an estimator to a dataset CSV");
  fit->add_option("--data", data_path, "training CSV")->required();
  fit->add_option("--estimator", opt.estimator,
                  "raw|naive|tree-kd|tree-ball|dmkde|dmkde-lr");
  fit->add_option("--gamma", opt.gamma, "bandwidth gamma");
  fit->add_option("--sigma", opt.sigma, "bandwidth sigma (gamma=1/(2 sigma^2))");
  fit->add_option("--rff-d", opt.rff_d, "RFF feature count (dm kinds)");
  fit->add_option("--rank", opt.rank, "factorization rank, -1 = auto");
  fit->add_option("--leaf-size", opt.leaf_size, "tree leaf size");
  fit->add_option("--split-rule", opt.split_rule, "median|sliding-midpoint");
  fit->add_option("--atol", opt.atol, "tree absolute tolerance");
  fit->add_option("--rtol", opt.rtol, "tree relative tolerance");
  fit->add_option("--seed", opt.seed, "RFF seed");
  fit->add_option("--threads", opt.threads, "worker pool size");
  fit->add_option("--out", opt.out, "output model file")->required();

  auto* est = app.add_subcommand("estimate", "evaluate a model on queries");
  est->add_option("--model", model_path, "model file")->required();
  est->add_option("--queries", query_path, "query CSV")->required();
  est->add_option("--atol", opt.atol, "override tree absolute tolerance");
  est->add_option("--rtol", opt.rtol, "override tree relative tolerance");
  est->add_option("--threads", opt.threads, "worker pool size");
  est->add_option("--out", opt.out, "output CSV")->required();

  auto* bench = app.add_subcommand("benchmark", "run the evaluation grid");
  bench->add_option("--preset", bopt.preset, "desk|paper");
  bench->add_option("--config", bopt.config_path, "JSON config file");
  bench->add_option("--dataset", bopt.datasets, "datasets (repeatable)");
  bench->add_option("--estimator", bopt.estimators, "estimators (repeatable)");
  bench->add_option("--sizes", bopt.sizes, "training sizes (repeatable)");
  bench->add_option("--test-n", opt.test_n, "test set size");
  bench->add_option("--folds", opt.folds, "CV folds");
  bench->add_option("--gamma-pow-lo", bopt.gamma_pow_lo, "min power of 2");
  bench->add_option("--gamma-pow-hi", bopt.gamma_pow_hi, "max power of 2");
  bench->add_option("--rff-d", bopt.d_grid, "RFF feature grid (repeatable)");
  bench->add_option("--attempts", bopt.attempts, "attempts per cell");
  bench->add_option("--repeats", opt.repeats, "timing repeats");
  bench->add_option("--seed", opt.seed, "master seed");
  bench->add_option("--atol", opt.atol, "tree absolute tolerance");
  bench->add_option("--rtol", opt.rtol, "tree relative tolerance");
  bench->add_option("--leaf-size", opt.leaf_size, "tree leaf size");
  bench->add_option("--split-rule", opt.split_rule, "median|sliding-midpoint");
  bench->add_option("--rank", opt.rank, "dmkde-lr rank, -1 = auto");
  bench->add_option("--threads", opt.threads, "worker pool size");
  bench->add_option("--out", bopt.out, "report path prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(opt);
    if (fit->parsed())
      return cmd_fit(opt, data_path, fit->count("--gamma") > 0,
                     fit->count("--sigma") > 0);
    if (est->parsed())
      return cmd_estimate(opt, model_path, query_path,
                          est->count("--atol") > 0, est->count("--rtol") > 0);
    if (bench->parsed()) return cmd_benchmark(opt, bopt, bench);
    return 2;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
