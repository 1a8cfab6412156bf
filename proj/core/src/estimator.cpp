#include "kdebench/estimator.hpp"

#include <stdexcept>

namespace kdebench {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kRaw: return "raw";
    case EstimatorKind::kNaive: return "naive";
    case EstimatorKind::kTreeKd: return "tree-kd";
    case EstimatorKind::kTreeBall: return "tree-ball";
    case EstimatorKind::kDmkde: return "dmkde";
    case EstimatorKind::kDmkdeLr: return "dmkde-lr";
  }
  return "?";
}

std::optional<EstimatorKind> parse_estimator(const std::string& id) {
  if (id == "raw") return EstimatorKind::kRaw;
  if (id == "naive") return EstimatorKind::kNaive;
  if (id == "tree-kd") return EstimatorKind::kTreeKd;
  if (id == "tree-ball") return EstimatorKind::kTreeBall;
  if (id == "dmkde") return EstimatorKind::kDmkde;
  if (id == "dmkde-lr") return EstimatorKind::kDmkdeLr;
  return std::nullopt;
}

FittedEstimator FittedEstimator::fit(EstimatorKind kind, const PointSet& X,
                                     const Bandwidth& bw,
                                     const EstimatorParams& params,
                                     int threads) {
  switch (kind) {
    case EstimatorKind::kRaw:
    case EstimatorKind::kNaive:
      return {kind, params, fit_exact(X, bw)};
    case EstimatorKind::kTreeKd:
      return {kind, params,
              build_kd_tree(X, params.leaf_size, bw, params.split_rule)};
    case EstimatorKind::kTreeBall:
      return {kind, params, build_ball_tree(X, params.leaf_size, bw)};
    case EstimatorKind::kDmkde:
    case EstimatorKind::kDmkdeLr: {
      const RffMap map = sample_rff_map(bw.dim, params.rff_features, bw.gamma,
                                        params.rff_seed);
      DensityMatrixModel model = fit_dmkde(X, map, threads);
      if (kind == EstimatorKind::kDmkdeLr)
        model = factorize(model, params.rank);
      return {kind, params, std::move(model)};
    }
  }
  throw std::logic_error("FittedEstimator::fit: bad kind");
}

double FittedEstimator::estimate(PointRef x) const {
  switch (kind_) {
    case EstimatorKind::kRaw:
    case EstimatorKind::kNaive:
      return estimate_exact(std::get<ExactKdeModel>(model_), x);
    case EstimatorKind::kTreeKd:
    case EstimatorKind::kTreeBall:
      return estimate_tree(std::get<SpatialTree>(model_), x, params_.atol,
                           params_.rtol);
    case EstimatorKind::kDmkde:
      return estimate_dm(std::get<DensityMatrixModel>(model_), x);
    case EstimatorKind::kDmkdeLr:
      return estimate_dm_lowrank(std::get<DensityMatrixModel>(model_), x);
  }
  throw std::logic_error("FittedEstimator::estimate: bad kind");
}

Vector FittedEstimator::estimate_batch(const PointSet& Q, int threads) const {
  switch (kind_) {
    case EstimatorKind::kRaw:
      return estimate_exact_batch(std::get<ExactKdeModel>(model_), Q,
                                  ExactStrategy::kVectorized, threads);
    case EstimatorKind::kNaive:
      return estimate_exact_batch(std::get<ExactKdeModel>(model_), Q,
                                  ExactStrategy::kPerPoint, threads);
    case EstimatorKind::kTreeKd:
    case EstimatorKind::kTreeBall:
      return estimate_tree_batch(std::get<SpatialTree>(model_), Q,
                                 params_.atol, params_.rtol, threads);
    case EstimatorKind::kDmkde:
      return estimate_dm_batch(std::get<DensityMatrixModel>(model_), Q,
                               threads);
    case EstimatorKind::kDmkdeLr:
      return estimate_dm_lowrank_batch(std::get<DensityMatrixModel>(model_), Q,
                                       threads);
  }
  throw std::logic_error("FittedEstimator::estimate_batch: bad kind");
}

int FittedEstimator::dim() const {
  if (const auto* m = std::get_if<ExactKdeModel>(&model_)) return m->bw.dim;
  if (const auto* t = std::get_if<SpatialTree>(&model_)) return t->bw.dim;
  return std::get<DensityMatrixModel>(model_).bw.dim;
}

double FittedEstimator::gamma() const {
  if (const auto* m = std::get_if<ExactKdeModel>(&model_)) return m->bw.gamma;
  if (const auto* t = std::get_if<SpatialTree>(&model_)) return t->bw.gamma;
  return std::get<DensityMatrixModel>(model_).bw.gamma;
}

const ExactKdeModel* FittedEstimator::exact() const {
  return std::get_if<ExactKdeModel>(&model_);
}

const SpatialTree* FittedEstimator::tree() const {
  return std::get_if<SpatialTree>(&model_);
}

const DensityMatrixModel* FittedEstimator::dm() const {
  return std::get_if<DensityMatrixModel>(&model_);
}

}  // namespace kdebench
