#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lsnet {

struct PhyloNode {
  std::string label;          // empty for internal nodes (internal labels are dropped)
  int parent = -1;            // -1 for the root
  double length = 0.0;        // branch length to the parent, original units
  std::vector<int> children;  // empty for tips
};

// Rooted tree with branch lengths. Immutable once constructed; the
// constructor enforces the structural invariants (single root, no cycles,
// finite non-negative lengths, unique non-empty leaf labels).
class PhyloTree {
 public:
  PhyloTree(std::vector<PhyloNode> nodes, int root);

  const std::vector<PhyloNode>& nodes() const { return nodes_; }
  const PhyloNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  int root() const { return root_; }
  bool is_leaf(int id) const { return node(id).children.empty(); }

  // Leaves in left-to-right (preorder) order.
  const std::vector<int>& leaves() const { return leaves_; }
  std::vector<std::string> leaf_labels() const;
  std::size_t tip_count() const { return leaves_.size(); }
  std::optional<int> find_leaf(std::string_view label) const;

  // Root-to-node depth in original units (root edge excluded).
  const std::vector<double>& depths() const { return depths_; }
  // Maximum root-to-tip depth.
  double tree_depth() const { return tree_depth_; }

  std::vector<int> preorder() const;

 private:
  std::vector<PhyloNode> nodes_;
  int root_;
  std::vector<int> leaves_;
  std::vector<double> depths_;
  double tree_depth_ = 0.0;
  std::map<std::string, int, std::less<>> leaf_index_;
};

PhyloTree parse_newick(std::string_view text);
PhyloTree read_newick_file(const std::string& path);

// Branch lengths are written with 12 significant digits.
std::string to_newick(const PhyloTree& tree);

// Restrict the tree to the given tips; unary nodes are suppressed and their
// branch lengths summed, so patristic distances among kept tips are unchanged.
PhyloTree prune_to(const PhyloTree& tree, std::span<const std::string> tips);

// Rename leaves; labels absent from the mapping are kept.
PhyloTree relabel(const PhyloTree& tree, const std::map<std::string, std::string>& mapping);

// Sum of branch lengths on the path between two leaves (original units).
double patristic_distance(const PhyloTree& tree, std::string_view a, std::string_view b);

// Random coalescent-shaped tree with `tips` leaves labelled prefix1..prefixN.
// Non-ultrametric trees get extra tip-edge length drawn uniformly in [0, jitter].
PhyloTree random_tree(std::size_t tips, std::mt19937_64& rng, const std::string& prefix = "t",
                      double jitter = 0.0);

// Normalized tip and MRCA depths for an ordered set of tips. Depths are
// divided by the depth of the full tree, so over all tips of the tree the
// maximum is exactly 1; a subset may sit below 1.
class PairwiseMrcaDepths {
 public:
  PairwiseMrcaDepths(std::shared_ptr<const PhyloTree> tree, std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  double tip_depth(std::size_t h) const { return tip_depth_[h]; }
  double mrca_depth(std::size_t h, std::size_t i) const { return mrca_depth_[h * size() + i]; }
  // T_hi = (t_h - t_k) + (t_i - t_k), unit-free.
  double distance(std::size_t h, std::size_t i) const {
    return tip_depth(h) + tip_depth(i) - 2.0 * mrca_depth(h, i);
  }
  double tree_depth_original() const { return tree_depth_original_; }

  const PhyloTree& tree() const { return *tree_; }
  int tip_node(std::size_t h) const { return tip_nodes_[h]; }

  // Same tree, different (sub)set/order of tips.
  PairwiseMrcaDepths select(std::span<const std::string> labels) const;

 private:
  std::shared_ptr<const PhyloTree> tree_;
  std::vector<std::string> labels_;
  std::vector<int> tip_nodes_;
  std::vector<double> tip_depth_;
  std::vector<double> mrca_depth_;
  double tree_depth_original_ = 0.0;
};

// Tips in the tree's leaf order.
PairwiseMrcaDepths pairwise_depths(const PhyloTree& tree);
// Tips in the caller's order (e.g. the host rows of an interaction matrix).
PairwiseMrcaDepths pairwise_depths(const PhyloTree& tree, std::span<const std::string> order);

}  // namespace lsnet
