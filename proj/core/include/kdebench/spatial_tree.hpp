#pragma once

#include <cstdint>
#include <vector>

#include "kdebench/common.hpp"
#include "kdebench/kernels.hpp"

namespace kdebench {

enum class TreeKind { kKd, kBall };
enum class KdSplitRule { kMedian, kSlidingMidpoint };

struct TreeNode {
  std::int32_t left = -1;  // child node index; leaf iff left < 0
  std::int32_t right = -1;
  std::int32_t begin = 0;  // row range into SpatialTree::points
  std::int32_t end = 0;
  std::int32_t count = 0;
  Point lo, hi;    // axis-aligned box (kd nodes)
  Point center;    // hypersphere (ball nodes)
  double radius = 0.0;

  bool is_leaf() const { return left < 0; }
};

// Binary space partition over the training set. Training rows are stored
// permuted so every leaf owns a contiguous row range.
struct SpatialTree {
  TreeKind kind = TreeKind::kKd;
  KdSplitRule split_rule = KdSplitRule::kMedian;
  int leaf_size = 40;
  Bandwidth bw;
  PointSet points;
  std::vector<std::int32_t> order;  // points.row(i) == X.row(order[i])
  std::vector<TreeNode> nodes;      // nodes[0] is the root

  std::int64_t size() const { return points.rows(); }
};

struct KernelBounds {
  double kmin = 0.0;
  double kmax = 0.0;
};

// Brackets exp(-gamma*|x - p|^2) over every point p in the node, from the
// min/max distance between x and the node geometry.
KernelBounds node_kernel_bounds(const TreeNode& node, PointRef x,
                                const Bandwidth& bw);

struct TreeEvalStats {
  std::int64_t kernel_evals = 0;
  std::int64_t nodes_pruned = 0;
  std::int64_t nodes_visited = 0;
};

// Split rule: widest-spread dimension (lowest index on ties); kMedian
// splits at the median, kSlidingMidpoint at the box midpoint slid to the
// nearest occupied coordinate. Zero-spread spans become leaves.
SpatialTree build_kd_tree(const PointSet& X, int leaf_size, Bandwidth bw,
                          KdSplitRule rule = KdSplitRule::kMedian);

// Ball nodes: center = centroid, radius = max distance to centroid;
// splits on the widest-spread dimension at the median.
SpatialTree build_ball_tree(const PointSet& X, int leaf_size, Bandwidth bw);

// Approximates S = sum_i exp(-gamma*|x - x_i|^2) with the guarantee
// |S_hat - S| <= n*atol + rtol*S, then rescales by 1/(n*(pi/gamma)^(d/2))
// like the exact estimator. A node is pruned (replaced by
// count*(kmin+kmax)/2) when
//     count*(kmax - kmin)/2 <= atol*count + rtol*S_lower*count/n
// with S_lower a running lower bound on S. The count-proportional share of
// the relative budget keeps the summed error of disjoint pruned nodes
// within rtol*S.
double estimate_tree(const SpatialTree& tree, PointRef x, double atol,
                     double rtol, TreeEvalStats* stats = nullptr);

Vector estimate_tree_batch(const SpatialTree& tree, const PointSet& Q,
                           double atol, double rtol, int threads = 1);

}  // namespace kdebench
