#include "kdebench/spatial_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "kdebench/threading.hpp"

namespace kdebench {

namespace {

class Builder {
 public:
  Builder(const PointSet& X, SpatialTree& tree)
      : X_(X), tree_(tree), dim_(static_cast<int>(X.cols())) {}

  std::int32_t build(std::int32_t begin, std::int32_t end) {
    const auto idx = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    TreeNode nd;
    nd.begin = begin;
    nd.end = end;
    nd.count = end - begin;

    Point lo = X_.row(tree_.order[begin]);
    Point hi = lo;
    for (std::int32_t i = begin + 1; i < end; ++i) {
      lo = lo.cwiseMin(X_.row(tree_.order[i]));
      hi = hi.cwiseMax(X_.row(tree_.order[i]));
    }
    if (tree_.kind == TreeKind::kKd) {
      nd.lo = lo;
      nd.hi = hi;
    } else {
      Point center = Point::Zero(dim_);
      for (std::int32_t i = begin; i < end; ++i)
        center += X_.row(tree_.order[i]);
      center /= static_cast<double>(nd.count);
      double r2 = 0.0;
      for (std::int32_t i = begin; i < end; ++i)
        r2 = std::max(r2, (X_.row(tree_.order[i]) - center).squaredNorm());
      nd.center = center;
      nd.radius = std::sqrt(r2);
    }

    // Widest spread picks the split dimension; lowest index wins ties.
    int split_dim = 0;
    double spread = hi[0] - lo[0];
    for (int k = 1; k < dim_; ++k) {
      if (hi[k] - lo[k] > spread) {
        spread = hi[k] - lo[k];
        split_dim = k;
      }
    }

    if (nd.count <= tree_.leaf_size || spread <= 0.0) {
      tree_.nodes[idx] = std::move(nd);
      return idx;
    }

    std::int32_t mid;
    if (tree_.kind == TreeKind::kKd &&
        tree_.split_rule == KdSplitRule::kSlidingMidpoint) {
      mid = partition_midpoint(begin, end, split_dim, lo[split_dim],
                               hi[split_dim]);
    } else {
      mid = begin + nd.count / 2;
      std::nth_element(tree_.order.begin() + begin, tree_.order.begin() + mid,
                       tree_.order.begin() + end,
                       [this, split_dim](std::int32_t a, std::int32_t b) {
                         return X_(a, split_dim) < X_(b, split_dim);
                       });
    }

    nd.left = build(begin, mid);
    nd.right = build(mid, end);
    tree_.nodes[idx] = std::move(nd);
    return idx;
  }

 private:
  // Midpoint split; if one side comes out empty, slide the plane to the
  // extreme occupied coordinate so at least one point separates.
  std::int32_t partition_midpoint(std::int32_t begin, std::int32_t end, int k,
                                  double lo, double hi) {
    const double cut = 0.5 * (lo + hi);
    auto it = std::partition(
        tree_.order.begin() + begin, tree_.order.begin() + end,
        [this, k, cut](std::int32_t i) { return X_(i, k) < cut; });
    auto mid = static_cast<std::int32_t>(it - tree_.order.begin());
    if (mid == begin) {
      double minc = std::numeric_limits<double>::infinity();
      for (std::int32_t i = begin; i < end; ++i)
        minc = std::min(minc, X_(tree_.order[i], k));
      it = std::partition(
          tree_.order.begin() + begin, tree_.order.begin() + end,
          [this, k, minc](std::int32_t i) { return X_(i, k) <= minc; });
      mid = static_cast<std::int32_t>(it - tree_.order.begin());
    } else if (mid == end) {
      double maxc = -std::numeric_limits<double>::infinity();
      for (std::int32_t i = begin; i < end; ++i)
        maxc = std::max(maxc, X_(tree_.order[i], k));
      it = std::partition(
          tree_.order.begin() + begin, tree_.order.begin() + end,
          [this, k, maxc](std::int32_t i) { return X_(i, k) < maxc; });
      mid = static_cast<std::int32_t>(it - tree_.order.begin());
    }
    return mid;
  }

  const PointSet& X_;
  SpatialTree& tree_;
  int dim_;
};

SpatialTree build_tree(const PointSet& X, int leaf_size, Bandwidth bw,
                       TreeKind kind, KdSplitRule rule) {
  if (X.rows() == 0) throw std::invalid_argument("build tree: empty point set");
  if (X.cols() != bw.dim)
    throw shape_error("build tree: data dimension does not match bandwidth");
  if (leaf_size < 1)
    throw std::invalid_argument("build tree: leaf_size must be >= 1");
  require_finite(X, "build tree");

  SpatialTree tree{kind, rule, leaf_size, bw, {}, {}, {}};
  const auto n = static_cast<std::int32_t>(X.rows());
  tree.order.resize(n);
  std::iota(tree.order.begin(), tree.order.end(), 0);
  tree.nodes.reserve(static_cast<std::size_t>(2 * n / leaf_size + 2));

  Builder builder(X, tree);
  builder.build(0, n);

  tree.points.resize(n, X.cols());
  for (std::int32_t i = 0; i < n; ++i)
    tree.points.row(i) = X.row(tree.order[i]);
  return tree;
}

}  // namespace

SpatialTree build_kd_tree(const PointSet& X, int leaf_size, Bandwidth bw,
                          KdSplitRule rule) {
  return build_tree(X, leaf_size, bw, TreeKind::kKd, rule);
}

SpatialTree build_ball_tree(const PointSet& X, int leaf_size, Bandwidth bw) {
  return build_tree(X, leaf_size, bw, TreeKind::kBall, KdSplitRule::kMedian);
}

KernelBounds node_kernel_bounds(const TreeNode& node, PointRef x,
                                const Bandwidth& bw) {
  double dmin2 = 0.0, dmax2 = 0.0;
  if (node.center.size() > 0) {
    const double delta = (x - node.center).norm();
    const double dmin = std::max(0.0, delta - node.radius);
    const double dmax = delta + node.radius;
    dmin2 = dmin * dmin;
    dmax2 = dmax * dmax;
  } else {
    for (int k = 0; k < node.lo.size(); ++k) {
      const double below = node.lo[k] - x[k];
      const double above = x[k] - node.hi[k];
      const double dmin_k = std::max({below, above, 0.0});
      const double dmax_k =
          std::max(std::abs(x[k] - node.lo[k]), std::abs(x[k] - node.hi[k]));
      dmin2 += dmin_k * dmin_k;
      dmax2 += dmax_k * dmax_k;
    }
  }
  return {std::exp(-bw.gamma * dmax2), std::exp(-bw.gamma * dmin2)};
}

namespace {

class Traversal {
 public:
  Traversal(const SpatialTree& tree, PointRef x, double atol, double rtol,
            TreeEvalStats* stats)
      : tree_(tree),
        x_(x),
        atol_(atol),
        rtol_(rtol),
        stats_(stats),
        n_(static_cast<double>(tree.size())) {}

  double run() {
    const KernelBounds kb = node_kernel_bounds(tree_.nodes[0], x_, tree_.bw);
    lower_ = n_ * kb.kmin;
    return visit(0, kb);
  }

 private:
  double visit(std::int32_t idx, const KernelBounds& kb) {
    const TreeNode& nd = tree_.nodes[idx];
    if (stats_) ++stats_->nodes_visited;
    const auto c = static_cast<double>(nd.count);
    const double gap = 0.5 * c * (kb.kmax - kb.kmin);
    if (gap <= atol_ * c + rtol_ * lower_ * (c / n_)) {
      if (stats_) ++stats_->nodes_pruned;
      return 0.5 * c * (kb.kmin + kb.kmax);
    }
    if (nd.is_leaf()) {
      const double s =
          (-tree_.bw.gamma * (tree_.points.middleRows(nd.begin, nd.count)
                                  .rowwise() -
                              x_)
                                 .rowwise()
                                 .squaredNorm()
                                 .array())
              .exp()
              .sum();
      if (stats_) stats_->kernel_evals += nd.count;
      lower_ += s - c * kb.kmin;
      return s;
    }

    const TreeNode& l = tree_.nodes[nd.left];
    const TreeNode& r = tree_.nodes[nd.right];
    const KernelBounds kl = node_kernel_bounds(l, x_, tree_.bw);
    const KernelBounds kr = node_kernel_bounds(r, x_, tree_.bw);
    lower_ += l.count * kl.kmin + r.count * kr.kmin - c * kb.kmin;

    // Nearer child first: raises the lower bound before the far subtree
    // is considered for pruning.
    if (kl.kmax >= kr.kmax)
      return visit(nd.left, kl) + visit(nd.right, kr);
    return visit(nd.right, kr) + visit(nd.left, kl);
  }

  const SpatialTree& tree_;
  PointRef x_;
  double atol_, rtol_;
  TreeEvalStats* stats_;
  double n_;
  double lower_ = 0.0;
};

}  // namespace

double estimate_tree(const SpatialTree& tree, PointRef x, double atol,
                     double rtol, TreeEvalStats* stats) {
  if (x.size() != tree.bw.dim)
    throw shape_error("estimate_tree: query dimension mismatch");
  if (!(atol >= 0.0) || !(rtol >= 0.0))
    throw std::invalid_argument("estimate_tree: tolerances must be >= 0");
  Traversal traversal(tree, x, atol, rtol, stats);
  const double s = traversal.run();
  return s / (static_cast<double>(tree.size()) * kde_normalizer(tree.bw));
}

Vector estimate_tree_batch(const SpatialTree& tree, const PointSet& Q,
                           double atol, double rtol, int threads) {
  if (Q.rows() > 0 && Q.cols() != tree.bw.dim)
    throw shape_error("estimate_tree_batch: query dimension mismatch");
  if (!(atol >= 0.0) || !(rtol >= 0.0))
    throw std::invalid_argument("estimate_tree_batch: tolerances must be >= 0");
  Vector out(Q.rows());
  parallel_for(Q.rows(), threads, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      Traversal traversal(tree, Q.row(i), atol, rtol, nullptr);
      out[i] =
          traversal.run() /
          (static_cast<double>(tree.size()) * kde_normalizer(tree.bw));
    }
  });
  return out;
}

}  // namespace kdebench
