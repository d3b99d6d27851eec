#pragma once

// Rooted bifurcating phylogenies: validation, traversal orders, depth scaling
// and the across-taxa covariance induced by Brownian diffusion on the tree.

#include <Eigen/Dense>
#include <array>
#include <string>
#include <unordered_set>
#include <vector>

#include "pfa/errors.hpp"

namespace pfa {

struct TreeNode {
  int parent = -1;
  std::array<int, 2> children{-1, -1};  // {-1, -1} marks a tip
  double branch = 0.0;                  // length of the edge to the parent; unused at the root
  std::string label;                    // nonempty for tips

  bool is_tip() const { return children[0] < 0; }
};

// Immutable after construction. Node ids index `nodes`; tips additionally get
// a dense tip index (0..N-1) in left-to-right input order, which fixes the row
// order of every matrix keyed by taxon.
class Phylogeny {
 public:
  Phylogeny(std::vector<TreeNode> nodes, int root) : nodes_(std::move(nodes)), root_(root) {
    validate();
    build_indices();
  }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_tips() const { return static_cast<int>(tips_.size()); }
  int root() const { return root_; }
  const TreeNode& node(int id) const { return nodes_[id]; }
  const std::vector<int>& tips() const { return tips_; }  // node ids in tip order
  int tip_node(int tip_index) const { return tips_[tip_index]; }
  int tip_index(int node_id) const { return tip_index_[node_id]; }  // -1 for internals
  const std::vector<std::string>& taxon_labels() const { return labels_; }

  // Children before parents / parents before children; each node once.
  const std::vector<int>& postorder() const { return postorder_; }
  const std::vector<int>& preorder() const { return preorder_; }

  // Sum of branch lengths from the root, per node.
  std::vector<double> node_depths() const {
    std::vector<double> depth(nodes_.size(), 0.0);
    for (int id : preorder_) {
      if (id != root_) depth[id] = depth[nodes_[id].parent] + nodes_[id].branch;
    }
    return depth;
  }

  double max_tip_depth() const {
    const auto depth = node_depths();
    double m = 0.0;
    for (int t : tips_) m = std::max(m, depth[t]);
    return m;
  }

  // All branch lengths divided by the maximum root-to-tip path length, so the
  // deepest tip sits at depth exactly one.
  Phylogeny scaled_to_unit_depth() const {
    const double m = max_tip_depth();
    if (m <= 0.0) throw ValidationError("cannot scale tree: every tip is at depth zero");
    std::vector<TreeNode> scaled = nodes_;
    for (auto& n : scaled) n.branch /= m;
    scaled[root_].branch = 0.0;
    return Phylogeny(std::move(scaled), root_);
  }

 private:
  void validate() const {
    if (nodes_.empty()) throw ValidationError("tree has no nodes");
    if (root_ < 0 || root_ >= static_cast<int>(nodes_.size()))
      throw ValidationError("tree root id out of range");
    if (nodes_[root_].parent != -1) throw ValidationError("root must not have a parent");

    int tips = 0;
    int internals = 0;
    std::unordered_set<std::string> seen;
    for (int id = 0; id < static_cast<int>(nodes_.size()); ++id) {
      const TreeNode& n = nodes_[id];
      if (n.is_tip()) {
        ++tips;
        if (n.label.empty()) throw ValidationError("tip with empty taxon label");
        if (!seen.insert(n.label).second)
          throw ValidationError("duplicate taxon label '" + n.label + "'");
      } else {
        ++internals;
        if (n.children[1] < 0)
          throw ValidationError("internal node with a single child; tree must be bifurcating");
        for (int c : n.children) {
          if (c < 0 || c >= static_cast<int>(nodes_.size()) || nodes_[c].parent != id)
            throw ValidationError("inconsistent parent/child links");
        }
      }
      if (id != root_) {
        if (n.parent < 0) throw ValidationError("disconnected node (no parent)");
        if (!std::isfinite(n.branch) || n.branch < 0.0)
          throw ValidationError("branch length must be finite and nonnegative");
      }
    }
    if (tips < 1) throw ValidationError("tree must have at least one tip");
    if (internals != tips - 1)
      throw ValidationError("node count inconsistent with a bifurcating tree");

    // Reachability from the root catches cycles among otherwise consistent links.
    std::vector<int> stack{root_};
    int reached = 0;
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      ++reached;
      const TreeNode& n = nodes_[id];
      if (!n.is_tip()) {
        stack.push_back(n.children[0]);
        stack.push_back(n.children[1]);
      }
    }
    if (reached != static_cast<int>(nodes_.size()))
      throw ValidationError("tree is not connected");
  }

  void build_indices() {
    tip_index_.assign(nodes_.size(), -1);
    preorder_.clear();
    postorder_.clear();
    preorder_.reserve(nodes_.size());
    postorder_.reserve(nodes_.size());

    // Iterative DFS, visiting children in stored order.
    std::vector<std::pair<int, int>> stack{{root_, 0}};
    while (!stack.empty()) {
      auto& [id, phase] = stack.back();
      const TreeNode& n = nodes_[id];
      if (phase == 0) {
        preorder_.push_back(id);
        if (n.is_tip()) {
          tip_index_[id] = static_cast<int>(tips_.size());
          tips_.push_back(id);
          labels_.push_back(n.label);
          postorder_.push_back(id);
          stack.pop_back();
        } else {
          phase = 1;
          stack.emplace_back(n.children[0], 0);
        }
      } else if (phase == 1) {
        phase = 2;
        stack.emplace_back(n.children[1], 0);
      } else {
        postorder_.push_back(id);
        stack.pop_back();
      }
    }
  }

  std::vector<TreeNode> nodes_;
  int root_;
  std::vector<int> tips_;
  std::vector<std::string> labels_;
  std::vector<int> tip_index_;
  std::vector<int> postorder_;
  std::vector<int> preorder_;
};

inline Phylogeny scale_to_unit_depth(const Phylogeny& tree) { return tree.scaled_to_unit_depth(); }

// Across-taxa covariance structure: psi holds shared root-path lengths, and
// the full row covariance of tip values is psi + J / kappa0, where J is the
// all-ones matrix contributed by integrating out the root value against its
// N(mu0, 1/kappa0) prior.
struct TreeCovariance {
  Eigen::MatrixXd psi;
  double kappa0 = 1.0;
  Eigen::VectorXd mu0;  // empty means the zero vector

  Eigen::MatrixXd full() const {
    return psi + Eigen::MatrixXd::Constant(psi.rows(), psi.cols(), 1.0 / kappa0);
  }
};

inline TreeCovariance tree_covariance(const Phylogeny& tree, double kappa0) {
  if (!(kappa0 > 0.0)) throw ValidationError("kappa0 must be positive");
  const int n = tree.num_tips();
  const auto depth = tree.node_depths();

  TreeCovariance cov;
  cov.kappa0 = kappa0;
  cov.psi = Eigen::MatrixXd::Zero(n, n);

  // psi[a,b] is the depth of MRCA(a,b): fill pairs straddling each internal
  // node from per-subtree tip lists gathered in postorder.
  std::vector<std::vector<int>> below(tree.num_nodes());
  for (int id : tree.postorder()) {
    const TreeNode& node = tree.node(id);
    if (node.is_tip()) {
      const int t = tree.tip_index(id);
      below[id] = {t};
      cov.psi(t, t) = depth[id];
      continue;
    }
    const auto& left = below[node.children[0]];
    const auto& right = below[node.children[1]];
    for (int a : left) {
      for (int b : right) {
        cov.psi(a, b) = depth[id];
        cov.psi(b, a) = depth[id];
      }
    }
    below[id].reserve(left.size() + right.size());
    below[id].insert(below[id].end(), left.begin(), left.end());
    below[id].insert(below[id].end(), right.begin(), right.end());
    below[node.children[0]].clear();
    below[node.children[1]].clear();
  }
  return cov;
}

}  // namespace pfa
