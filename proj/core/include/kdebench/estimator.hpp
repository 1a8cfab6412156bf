#pragma once

#include <optional>
#include <string>
#include <variant>

#include "kdebench/dm_kde.hpp"
#include "kdebench/exact_kde.hpp"
#include "kdebench/spatial_tree.hpp"

namespace kdebench {

// raw     exact KDE, vectorized batch path
// naive   exact KDE, per-point scalar loop (same estimates, slower path)
// tree-kd / tree-ball   pruned tree traversal
// dmkde   full density-matrix Born rule
// dmkde-lr  factorized Born rule, O(D*r) per query
enum class EstimatorKind { kRaw, kNaive, kTreeKd, kTreeBall, kDmkde, kDmkdeLr };

std::string to_string(EstimatorKind kind);
std::optional<EstimatorKind> parse_estimator(const std::string& id);

constexpr bool is_dm_kind(EstimatorKind k) {
  return k == EstimatorKind::kDmkde || k == EstimatorKind::kDmkdeLr;
}
constexpr bool is_tree_kind(EstimatorKind k) {
  return k == EstimatorKind::kTreeKd || k == EstimatorKind::kTreeBall;
}

// Fit/query parameters that are not part of the underlying model structs.
struct EstimatorParams {
  double atol = 0.0;
  double rtol = 1e-8;
  int leaf_size = 40;
  KdSplitRule split_rule = KdSplitRule::kMedian;
  int rff_features = 1000;
  int rank = kAutoRank;
  std::uint64_t rff_seed = 20;
};

// One fitted estimator of any kind behind a common estimate interface.
class FittedEstimator {
 public:
  static FittedEstimator fit(EstimatorKind kind, const PointSet& X,
                             const Bandwidth& bw, const EstimatorParams& params,
                             int threads = 1);

  double estimate(PointRef x) const;
  Vector estimate_batch(const PointSet& Q, int threads = 1) const;

  EstimatorKind kind() const { return kind_; }
  std::string id() const { return to_string(kind_); }
  int dim() const;
  double gamma() const;
  const EstimatorParams& params() const { return params_; }

  const ExactKdeModel* exact() const;
  const SpatialTree* tree() const;
  const DensityMatrixModel* dm() const;

  // Same model, different query parameters (tree tolerances etc).
  FittedEstimator with_params(const EstimatorParams& params) const {
    return {kind_, params, model_};
  }

  // Wraps an already-built model (model loading, tests).
  FittedEstimator(EstimatorKind kind, EstimatorParams params,
                  std::variant<ExactKdeModel, SpatialTree, DensityMatrixModel>
                      model)
      : kind_(kind), params_(params), model_(std::move(model)) {}

 private:
  EstimatorKind kind_;
  EstimatorParams params_;
  std::variant<ExactKdeModel, SpatialTree, DensityMatrixModel> model_;
};

}  // namespace kdebench
