#include "kdebench/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <system_error>
#include <tuple>

#include <json.hpp>

namespace kdebench {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  return out;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json pointset_to_json(const PointSet& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

template <typename Mat>
Mat matrix_from_json(const json& rows) {
  if (!rows.is_array()) throw io_error("model file: expected matrix");
  const auto r = static_cast<Eigen::Index>(rows.size());
  Mat m;
  if (r == 0) return m;
  const auto c = static_cast<Eigen::Index>(rows[0].size());
  m.resize(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != c)
      throw io_error("model file: ragged matrix");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

Vector vector_from_json(const json& arr) {
  Vector v(arr.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_points_csv(const std::string& path, const PointSet& X,
                      bool header) {
  std::ofstream out = open_out(path);
  if (header) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (j) out << ',';
      out << 'x' << (j + 1);
    }
    out << '\n';
  }
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (j) out << ',';
      out << format_double(X(i, j));
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

PointSet read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open for reading: " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<double> row;
    std::size_t pos = 0;
    bool numeric = true;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      // trim spaces
      std::size_t a = pos, b = comma;
      while (a < b && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
      while (b > a && std::isspace(static_cast<unsigned char>(line[b - 1])))
        --b;
      double value = 0.0;
      const auto res = std::from_chars(line.data() + a, line.data() + b, value);
      if (res.ec != std::errc() || res.ptr != line.data() + b) {
        numeric = false;
        break;
      }
      row.push_back(value);
      if (comma == line.size()) break;
      pos = comma + 1;
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header row
      }
      throw data_error("csv parse error in " + path + ": '" + line + "'");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw data_error("csv row length mismatch in " + path);
    rows.push_back(std::move(row));
  }

  PointSet X(static_cast<Eigen::Index>(rows.size()),
             rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return X;
}

void write_density_csv(const std::string& path, const Vector& densities) {
  std::ofstream out = open_out(path);
  out << "density\n";
  for (Eigen::Index i = 0; i < densities.size(); ++i)
    out << format_double(densities[i]) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

namespace {

const char* split_rule_name(KdSplitRule rule) {
  return rule == KdSplitRule::kMedian ? "median" : "sliding-midpoint";
}

KdSplitRule split_rule_from(const std::string& name) {
  if (name == "median") return KdSplitRule::kMedian;
  if (name == "sliding-midpoint") return KdSplitRule::kSlidingMidpoint;
  throw io_error("model file: unknown split rule '" + name + "'");
}

}  // namespace

void save_model(const std::string& path, const FittedEstimator& estimator) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = estimator.id();
  j["d"] = estimator.dim();
  j["gamma"] = estimator.gamma();

  if (const ExactKdeModel* m = estimator.exact()) {
    j["train"] = pointset_to_json(m->train);
  } else if (const SpatialTree* t = estimator.tree()) {
    PointSet original(t->points.rows(), t->points.cols());
    for (std::int64_t i = 0; i < t->points.rows(); ++i)
      original.row(t->order[static_cast<std::size_t>(i)]) = t->points.row(i);
    j["train"] = pointset_to_json(original);
    j["leaf_size"] = t->leaf_size;
    j["split_rule"] = split_rule_name(t->split_rule);
    j["atol"] = estimator.params().atol;
    j["rtol"] = estimator.params().rtol;
  } else if (const DensityMatrixModel* dm = estimator.dm()) {
    j["rff_d"] = dm->feature_count();
    j["seed"] = dm->map.seed;
    j["W"] = matrix_to_json(dm->map.W);
    j["b"] = vector_to_json(dm->map.b);
    j["n_train"] = dm->n_train;
    if (estimator.kind() == EstimatorKind::kDmkdeLr) {
      j["lambda"] = vector_to_json(dm->eigvals);
      j["V"] = matrix_to_json(dm->eigvecs);
    } else {
      j["rho"] = matrix_to_json(dm->rho);
    }
  }

  std::ofstream out = open_out(path);
  out << j.dump() << '\n';
  if (!out) throw io_error("write failed: " + path);
}

FittedEstimator load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open for reading: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error("model parse error in " + path + ": " + e.what());
  }

  try {
    if (j.at("format_version").get<int>() != kFormatVersion)
      throw io_error("model file: unsupported format_version");
    const std::string kind_id = j.at("kind").get<std::string>();
    const auto kind = parse_estimator(kind_id);
    if (!kind) throw io_error("model file: unknown kind '" + kind_id + "'");
    const int d = j.at("d").get<int>();
    const double gamma = j.at("gamma").get<double>();
    const Bandwidth bw(gamma, d);

    EstimatorParams params;
    switch (*kind) {
      case EstimatorKind::kRaw:
      case EstimatorKind::kNaive: {
        PointSet train = matrix_from_json<PointSet>(j.at("train"));
        return {*kind, params, fit_exact(std::move(train), bw)};
      }
      case EstimatorKind::kTreeKd:
      case EstimatorKind::kTreeBall: {
        const PointSet train = matrix_from_json<PointSet>(j.at("train"));
        params.leaf_size = j.at("leaf_size").get<int>();
        params.split_rule =
            split_rule_from(j.at("split_rule").get<std::string>());
        params.atol = j.value("atol", 0.0);
        params.rtol = j.value("rtol", 1e-8);
        if (*kind == EstimatorKind::kTreeKd)
          return {*kind, params,
                  build_kd_tree(train, params.leaf_size, bw, params.split_rule)};
        return {*kind, params, build_ball_tree(train, params.leaf_size, bw)};
      }
      case EstimatorKind::kDmkde:
      case EstimatorKind::kDmkdeLr: {
        DensityMatrixModel model{RffMap{}, bw, 0, {}, {}, {}};
        model.map.W = matrix_from_json<Matrix>(j.at("W"));
        model.map.b = vector_from_json(j.at("b"));
        model.map.gamma = gamma;
        model.map.seed = j.at("seed").get<std::uint64_t>();
        model.n_train = j.at("n_train").get<std::int64_t>();
        params.rff_features = model.feature_count();
        if (*kind == EstimatorKind::kDmkdeLr) {
          model.eigvals = vector_from_json(j.at("lambda"));
          model.eigvecs = matrix_from_json<Matrix>(j.at("V"));
          params.rank = model.rank();
        } else {
          model.rho = matrix_from_json<Matrix>(j.at("rho"));
        }
        return {*kind, params, std::move(model)};
      }
    }
    throw io_error("model file: bad kind");
  } catch (const json::exception& e) {
    throw io_error("model field error in " + path + ": " + e.what());
  }
}

namespace {

void write_report_row(std::ostream& out, const EvalReport& r) {
  out << r.dataset << ',' << r.estimator << ',' << r.n_train << ','
      << r.n_test << ',' << format_double(r.gamma) << ',' << r.rff_features
      << ',' << r.rank << ',' << format_double(r.mae) << ','
      << format_double(r.mae_std) << ',' << format_double(r.predict_time_ms)
      << ',' << format_double(r.time_std_ms) << ',' << r.repeats << ','
      << r.seed << ',' << r.error << '\n';
}

}  // namespace

void write_report_csv(const std::string& path,
                      const std::vector<EvalReport>& reports) {
  std::ofstream out = open_out(path);
  out << "dataset,estimator,n_train,n_test,gamma,rff_d,rank,mae,mae_std,"
         "predict_time_ms,time_std_ms,repeats,seed,error\n";
  for (const EvalReport& r : reports) write_report_row(out, r);
  if (!out) throw io_error("write failed: " + path);
}

void write_report_jsonl(const std::string& path,
                        const std::vector<EvalReport>& reports) {
  std::ofstream out = open_out(path);
  for (const EvalReport& r : reports) {
    json j{{"dataset", r.dataset},
           {"estimator", r.estimator},
           {"n_train", r.n_train},
           {"n_test", r.n_test},
           {"gamma", r.gamma},
           {"rff_d", r.rff_features},
           {"rank", r.rank},
           {"mae", r.mae},
           {"mae_std", r.mae_std},
           {"predict_time_ms", r.predict_time_ms},
           {"time_std_ms", r.time_std_ms},
           {"repeats", r.repeats},
           {"seed", r.seed}};
    if (!r.error.empty()) j["error"] = r.error;
    out << j.dump() << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

void write_aggregate_csv(const std::string& path,
                         const std::vector<EvalReport>& reports) {
  std::map<std::tuple<std::string, std::string, std::int64_t>,
           std::pair<std::vector<double>, std::vector<double>>>
      cells;
  for (const EvalReport& r : reports) {
    if (!r.error.empty()) continue;
    auto& cell = cells[{r.dataset, r.estimator, r.n_train}];
    cell.first.push_back(r.mae);
    cell.second.push_back(r.predict_time_ms);
  }

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  };

  std::ofstream out = open_out(path);
  out << "dataset,estimator,n,mae_median,time_median\n";
  for (const auto& [key, cell] : cells) {
    out << std::get<0>(key) << ',' << std::get<1>(key) << ','
        << std::get<2>(key) << ',' << format_double(median(cell.first)) << ','
        << format_double(median(cell.second)) << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace kdebench
