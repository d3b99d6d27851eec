#pragma once

// Two-pass Gaussian message passing on the phylogeny.
//
// Tip rows of F are jointly MVN with covariance psi + J/kappa0 per factor
// column. The conditional law of one tip row given the others (and of any
// internal node's latent value given all tips) follows from belief
// propagation on the tree: a post-order pass accumulates each subtree's
// evidence as a (mean, variance) message, a pre-order walk carries root-side
// information back down. The root pseudo-observation (mean zero, variance
// 1/kappa0) enters as the root's prior message. Means are per-factor vectors;
// variances are shared across factors because the column variance is the
// identity, so one pass costs O(N K).
//
// A message variance of +inf encodes "no information" (an excluded or absent
// subtree); a variance of 0 encodes an exact observation, which is how tips
// and zero-length branches are handled without special cases.

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "pfa/errors.hpp"
#include "pfa/random.hpp"
#include "pfa/tree.hpp"

namespace pfa {

// Conditional prior of one tip row given the remaining rows: per-factor
// Gaussian with common precision (identity column variance).
struct TipConditional {
  Eigen::VectorXd mean;       // length K
  Eigen::VectorXd precision;  // length K, entries all equal
};

// Conditional of an internal node's latent value given every tip row.
struct NodeConditional {
  Eigen::VectorXd mean;      // length K
  Eigen::VectorXd variance;  // length K, entries all equal
};

class TreeGaussian {
 public:
  // Reusable buffers; callers that share nothing may pass none.
  struct Workspace {
    std::vector<double> var;   // at-node message variance (before the branch push)
    Eigen::MatrixXd mean;      // at-node message means, one row per node
  };

  TreeGaussian(const Phylogeny& tree, double kappa0)
      : num_nodes_(tree.num_nodes()),
        num_tips_(tree.num_tips()),
        root_(tree.root()),
        root_variance_(1.0 / kappa0),
        parent_(num_nodes_, -1),
        sibling_(num_nodes_, -1),
        children_(num_nodes_, {-1, -1}),
        branch_(num_nodes_, 0.0),
        tip_index_(num_nodes_, -1),
        tip_node_(tree.tips()),
        postorder_(tree.postorder()) {
    if (!(kappa0 > 0.0)) throw ValidationError("kappa0 must be positive");
    for (int id = 0; id < num_nodes_; ++id) {
      const TreeNode& n = tree.node(id);
      parent_[id] = n.parent;
      branch_[id] = (id == root_) ? 0.0 : n.branch;
      tip_index_[id] = tree.tip_index(id);
      if (!n.is_tip()) {
        children_[id] = n.children;
        sibling_[n.children[0]] = n.children[1];
        sibling_[n.children[1]] = n.children[0];
      }
    }
  }

  int num_tips() const { return num_tips_; }
  int num_nodes() const { return num_nodes_; }

  // Conditional prior of F.row(tip) given every other row of F (row `tip`
  // itself is ignored).
  TipConditional tip_conditional(const Eigen::MatrixXd& F, int tip, Workspace* ws = nullptr) const {
    if (tip < 0 || tip >= num_tips_) throw ValidationError("tip index out of range");
    const int K = static_cast<int>(F.cols());
    Workspace local;
    Workspace& w = ws ? *ws : local;
    upward_pass(F, tip, w);

    auto [mean, var] = downward_to(tip_node_[tip], w, K);
    TipConditional out;
    out.mean = std::move(mean);
    out.precision = Eigen::VectorXd::Constant(K, 1.0 / var);
    return out;
  }

  // Conditional of the latent value at an internal node (root allowed) given
  // all tip rows of F.
  NodeConditional node_conditional(const Eigen::MatrixXd& F, int node,
                                   Workspace* ws = nullptr) const {
    if (node < 0 || node >= num_nodes_) throw ValidationError("node id out of range");
    if (tip_index_[node] >= 0)
      throw ValidationError("node conditional requires an internal node, not a tip");
    const int K = static_cast<int>(F.cols());
    Workspace local;
    Workspace& w = ws ? *ws : local;
    upward_pass(F, /*excluded_tip=*/-1, w);

    auto [down_mean, down_var] = downward_to(node, w, K);
    auto [m, v] = combine(w.mean.row(node).transpose().eval(), w.var[node], down_mean, down_var);
    NodeConditional out;
    out.mean = std::move(m);
    out.variance = Eigen::VectorXd::Constant(K, v);
    return out;
  }

 private:
  static std::pair<Eigen::VectorXd, double> combine(const Eigen::VectorXd& m1, double v1,
                                                    const Eigen::VectorXd& m2, double v2) {
    if (v1 == kInf) return {m2, v2};
    if (v2 == kInf) return {m1, v1};
    if (v1 == 0.0) return {m1, 0.0};
    if (v2 == 0.0) return {m2, 0.0};
    const double s = v1 + v2;
    return {(v2 / s) * m1 + (v1 / s) * m2, v1 * v2 / s};
  }

  double delivered_var(const Workspace& w, int id) const {
    return w.var[id] == kInf ? kInf : w.var[id] + branch_[id];
  }

  // Evidence below each node, excluding `excluded_tip` when nonnegative.
  void upward_pass(const Eigen::MatrixXd& F, int excluded_tip, Workspace& w) const {
    const int K = static_cast<int>(F.cols());
    w.var.assign(num_nodes_, kInf);
    if (w.mean.rows() != num_nodes_ || w.mean.cols() != K) w.mean.setZero(num_nodes_, K);

    for (int id : postorder_) {
      const int t = tip_index_[id];
      if (t >= 0) {
        if (t != excluded_tip) {
          w.mean.row(id) = F.row(t);
          w.var[id] = 0.0;
        }
        continue;
      }
      const int c1 = children_[id][0];
      const int c2 = children_[id][1];
      auto [m, v] = combine(w.mean.row(c1).transpose().eval(), delivered_var(w, c1),
                            w.mean.row(c2).transpose().eval(), delivered_var(w, c2));
      if (v != kInf) w.mean.row(id) = m;
      w.var[id] = v;
    }
  }

  // Root-side belief at `target`: the root prior combined with the up message
  // of every off-path sibling, pushed through each branch on the way down.
  std::pair<Eigen::VectorXd, double> downward_to(int target, const Workspace& w, int K) const {
    std::vector<int> path;  // target, parent(target), ..., child-of-root
    for (int id = target; id != root_; id = parent_[id]) path.push_back(id);

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(K);
    double var = root_variance_;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const int child = *it;
      const int sib = sibling_[child];
      auto [m, v] =
          combine(mean, var, w.mean.row(sib).transpose().eval(), delivered_var(w, sib));
      mean = std::move(m);
      var = (v == kInf) ? kInf : v + branch_[child];
    }
    return {mean, var};
  }

  int num_nodes_;
  int num_tips_;
  int root_;
  double root_variance_;
  std::vector<int> parent_;
  std::vector<int> sibling_;
  std::vector<std::array<int, 2>> children_;
  std::vector<double> branch_;
  std::vector<int> tip_index_;
  std::vector<int> tip_node_;
  std::vector<int> postorder_;
};

}  // namespace pfa
