#include "lsnet/newick.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "lsnet/error.hpp"

namespace lsnet {

PhyloTree::PhyloTree(std::vector<PhyloNode> nodes, int root) : nodes_(std::move(nodes)), root_(root) {
  const int n = static_cast<int>(nodes_.size());
  if (n == 0) throw Error(ErrorCode::EmptyTree, "tree has no nodes");
  if (root_ < 0 || root_ >= n || nodes_[root_].parent != -1)
    throw Error(ErrorCode::Internal, "invalid root");

  for (int id = 0; id < n; ++id) {
    const auto& nd = nodes_[id];
    if (id != root_ && (nd.parent < 0 || nd.parent >= n))
      throw Error(ErrorCode::Internal, "node " + std::to_string(id) + " has no parent");
    if (!std::isfinite(nd.length) || nd.length < 0.0)
      throw Error(ErrorCode::NegativeBranchLength, "node " + std::to_string(id));
    for (int c : nd.children)
      if (c < 0 || c >= n || nodes_[c].parent != id)
        throw Error(ErrorCode::Internal, "inconsistent parent/child links at node " + std::to_string(id));
  }

  depths_.assign(nodes_.size(), 0.0);
  std::vector<int> stack{root_};
  std::vector<char> seen(nodes_.size(), 0);
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (seen[id]) throw Error(ErrorCode::Internal, "cycle in tree");
    seen[id] = 1;
    const auto& nd = nodes_[id];
    if (nd.children.empty()) {
      leaves_.push_back(id);
      tree_depth_ = std::max(tree_depth_, depths_[id]);
    }
    for (auto it = nd.children.rbegin(); it != nd.children.rend(); ++it) {
      depths_[*it] = depths_[id] + nodes_[*it].length;
      stack.push_back(*it);
    }
  }
  if (std::count(seen.begin(), seen.end(), 1) != n)
    throw Error(ErrorCode::Internal, "tree has unreachable nodes");

  for (int leaf : leaves_) {
    const auto& label = nodes_[leaf].label;
    if (label.empty()) throw Error(ErrorCode::EmptyLabel, "leaf without label");
    if (!leaf_index_.emplace(label, leaf).second) throw Error(ErrorCode::DuplicateLeafLabel, label);
  }
}

std::vector<std::string> PhyloTree::leaf_labels() const {
  std::vector<std::string> out;
  out.reserve(leaves_.size());
  for (int leaf : leaves_) out.push_back(nodes_[leaf].label);
  return out;
}

std::optional<int> PhyloTree::find_leaf(std::string_view label) const {
  auto it = leaf_index_.find(label);
  if (it == leaf_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> PhyloTree::preorder() const {
  std::vector<int> order;
  order.reserve(nodes_.size());
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    order.push_back(id);
    const auto& ch = nodes_[id].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

namespace {

bool is_delimiter(char c) {
  return c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == '[' || c == ']' || c == '\'' ||
         std::isspace(static_cast<unsigned char>(c));
}

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  PhyloTree parse() {
    skip();
    if (at_end() || peek() == ';') throw ParseError(ErrorCode::EmptyTree, pos_, "no tree before ';'");
    if (peek() == ')') throw ParseError(ErrorCode::UnbalancedParentheses, pos_, "unexpected ')'");
    const int root = parse_subtree(-1);
    // root edge length is optional and ignored
    nodes_[root].length = 0.0;
    skip();
    if (at_end()) throw ParseError(ErrorCode::NewickSyntax, pos_, "missing terminating ';'");
    if (peek() == ')') throw ParseError(ErrorCode::UnbalancedParentheses, pos_, "unexpected ')'");
    if (peek() != ';') throw ParseError(ErrorCode::NewickSyntax, pos_, "expected ';'");
    ++pos_;
    skip();
    if (!at_end()) throw ParseError(ErrorCode::NewickSyntax, pos_, "trailing content after ';'");

    std::size_t tips = 0;
    for (const auto& nd : nodes_)
      if (nd.children.empty()) ++tips;
    if (tips < 2) throw ParseError(ErrorCode::TooFewTips, pos_, "tree needs at least two tips");
    return PhyloTree(std::move(nodes_), root);
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip() {
    while (!at_end()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '[') {
        const std::size_t start = pos_;
        auto close = text_.find(']', pos_);
        if (close == std::string_view::npos) throw ParseError(ErrorCode::NewickSyntax, start, "unterminated comment");
        pos_ = close + 1;
      } else {
        break;
      }
    }
  }

  int new_node(int parent) {
    nodes_.push_back(PhyloNode{});
    const int id = static_cast<int>(nodes_.size()) - 1;
    nodes_[id].parent = parent;
    if (parent >= 0) nodes_[parent].children.push_back(id);
    return id;
  }

  int parse_subtree(int parent) {
    skip();
    const int id = new_node(parent);
    if (!at_end() && peek() == '(') {
      const std::size_t open = pos_;
      ++pos_;
      while (true) {
        parse_subtree(id);
        skip();
        if (at_end()) throw ParseError(ErrorCode::UnbalancedParentheses, open, "'(' is never closed");
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() == ')') {
          ++pos_;
          break;
        }
        if (peek() == ';') throw ParseError(ErrorCode::UnbalancedParentheses, open, "'(' is never closed");
        throw ParseError(ErrorCode::NewickSyntax, pos_, std::string("unexpected '") + peek() + "'");
      }
      skip();
      parse_label();  // internal labels are not used
    } else {
      const std::size_t start = pos_;
      std::string label = parse_label();
      if (label.empty()) throw ParseError(ErrorCode::EmptyLabel, start, "leaf without label");
      if (!leaf_labels_.insert(label).second) throw ParseError(ErrorCode::DuplicateLeafLabel, start, label);
      nodes_[id].label = std::move(label);
    }
    skip();
    if (!at_end() && peek() == ':') {
      ++pos_;
      skip();
      nodes_[id].length = parse_length();
    } else if (parent >= 0) {
      throw ParseError(ErrorCode::MissingBranchLength, pos_, "branch length required on non-root edge");
    }
    return id;
  }

  std::string parse_label() {
    std::string out;
    if (at_end()) return out;
    if (peek() == '\'') {
      const std::size_t start = pos_;
      ++pos_;
      while (true) {
        if (at_end()) throw ParseError(ErrorCode::NewickSyntax, start, "unterminated quoted label");
        char c = text_[pos_++];
        if (c == '\'') {
          if (!at_end() && peek() == '\'') {
            out.push_back('\'');
            ++pos_;
            continue;
          }
          break;
        }
        out.push_back(c);
      }
      return out;
    }
    while (!at_end() && !is_delimiter(peek())) out.push_back(text_[pos_++]);
    return out;
  }

  double parse_length() {
    const std::size_t start = pos_;
    while (!at_end() && !is_delimiter(peek())) ++pos_;
    std::string_view token = text_.substr(start, pos_ - start);
    if (token.empty()) throw ParseError(ErrorCode::NewickSyntax, start, "empty branch length");
    double value = 0.0;
    const char* first = token.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value))
      throw ParseError(ErrorCode::NewickSyntax, start, "bad branch length '" + std::string(token) + "'");
    if (value < 0.0) throw ParseError(ErrorCode::NegativeBranchLength, start, std::string(token));
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<PhyloNode> nodes_;
  std::set<std::string> leaf_labels_;
};

std::string quote_label(const std::string& label) {
  bool plain = !label.empty();
  for (char c : label)
    if (is_delimiter(c)) plain = false;
  if (plain) return label;
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string format_length(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

PhyloTree parse_newick(std::string_view text) { return NewickParser(text).parse(); }

PhyloTree read_newick_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open tree file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_newick(ss.str());
}

std::string to_newick(const PhyloTree& tree) {
  std::string out;
  std::function<void(int)> emit = [&](int id) {
    const auto& nd = tree.node(id);
    if (!nd.children.empty()) {
      out.push_back('(');
      for (std::size_t k = 0; k < nd.children.size(); ++k) {
        if (k) out.push_back(',');
        emit(nd.children[k]);
      }
      out.push_back(')');
    } else {
      out += quote_label(nd.label);
    }
    if (id != tree.root()) {
      out.push_back(':');
      out += format_length(nd.length);
    }
  };
  emit(tree.root());
  out.push_back(';');
  return out;
}

PhyloTree prune_to(const PhyloTree& tree, std::span<const std::string> tips) {
  std::vector<char> keep(tree.nodes().size(), 0);
  for (const auto& t : tips) {
    auto leaf = tree.find_leaf(t);
    if (!leaf) throw Error(ErrorCode::UnknownTip, t);
    keep[*leaf] = 1;
  }
  if (std::count(keep.begin(), keep.end(), 1) < 2) throw Error(ErrorCode::TooFewTips, "prune needs at least two tips");

  // kept-descendant counts, children before parents
  std::vector<int> kept(tree.nodes().size(), 0);
  auto order = tree.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& nd = tree.node(*it);
    kept[*it] = keep[*it];
    for (int c : nd.children) kept[*it] += kept[c];
  }

  std::vector<PhyloNode> out;
  std::function<void(int, int, double)> build = [&](int id, int parent, double carried) {
    const auto& nd = tree.node(id);
    std::vector<int> live;
    for (int c : nd.children)
      if (kept[c] > 0) live.push_back(c);
    const double length = carried + (id == tree.root() ? 0.0 : nd.length);
    if (!nd.children.empty() && live.size() == 1) {
      build(live.front(), parent, length);
      return;
    }
    PhyloNode copy;
    copy.label = nd.children.empty() ? nd.label : std::string();
    copy.parent = parent;
    copy.length = parent < 0 ? 0.0 : length;
    out.push_back(std::move(copy));
    const int self = static_cast<int>(out.size()) - 1;
    if (parent >= 0) out[parent].children.push_back(self);
    for (int c : live) build(c, self, 0.0);
  };
  build(tree.root(), -1, 0.0);
  return PhyloTree(std::move(out), 0);
}

PhyloTree relabel(const PhyloTree& tree, const std::map<std::string, std::string>& mapping) {
  auto nodes = tree.nodes();
  for (auto& nd : nodes) {
    if (!nd.children.empty()) continue;
    auto it = mapping.find(nd.label);
    if (it != mapping.end()) nd.label = it->second;
  }
  return PhyloTree(std::move(nodes), tree.root());
}

double patristic_distance(const PhyloTree& tree, std::string_view a, std::string_view b) {
  auto la = tree.find_leaf(a);
  auto lb = tree.find_leaf(b);
  if (!la) throw Error(ErrorCode::UnknownTip, std::string(a));
  if (!lb) throw Error(ErrorCode::UnknownTip, std::string(b));
  // walk both leaves to the root, then cancel the shared part
  std::map<int, double> up;
  double acc = 0.0;
  for (int id = *la; id != -1; id = tree.node(id).parent) {
    up[id] = acc;
    acc += tree.node(id).length;
  }
  acc = 0.0;
  for (int id = *lb; id != -1; id = tree.node(id).parent) {
    auto it = up.find(id);
    if (it != up.end()) return acc + it->second;
    acc += tree.node(id).length;
  }
  throw Error(ErrorCode::Internal, "leaves share no ancestor");
}

PhyloTree random_tree(std::size_t tips, std::mt19937_64& rng, const std::string& prefix, double jitter) {
  if (tips < 2) throw Error(ErrorCode::TooFewTips, "random tree needs at least two tips");
  std::vector<PhyloNode> nodes(tips);
  std::vector<double> height(tips, 0.0);
  std::vector<int> lineages(tips);
  for (std::size_t i = 0; i < tips; ++i) {
    nodes[i].label = prefix + std::to_string(i + 1);
    lineages[i] = static_cast<int>(i);
  }
  double t = 0.0;
  while (lineages.size() > 1) {
    const double k = static_cast<double>(lineages.size());
    t += std::exponential_distribution<double>(k * (k - 1.0) / 2.0)(rng);
    std::uniform_int_distribution<std::size_t> pick(0, lineages.size() - 1);
    std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (b == a) b = pick(rng);
    const int left = lineages[a];
    const int right = lineages[b];
    PhyloNode parent;
    parent.children = {left, right};
    nodes.push_back(parent);
    height.push_back(t);
    const int id = static_cast<int>(nodes.size()) - 1;
    for (int c : {left, right}) {
      nodes[c].parent = id;
      nodes[c].length = t - height[c];
    }
    lineages.erase(lineages.begin() + static_cast<std::ptrdiff_t>(std::max(a, b)));
    lineages[std::min(a, b)] = id;
  }
  if (jitter > 0.0) {
    std::uniform_real_distribution<double> extra(0.0, jitter);
    for (std::size_t i = 0; i < tips; ++i) nodes[i].length += extra(rng);
  }
  const int root = lineages.front();
  nodes[root].parent = -1;
  return PhyloTree(std::move(nodes), root);
}

PairwiseMrcaDepths::PairwiseMrcaDepths(std::shared_ptr<const PhyloTree> tree, std::vector<std::string> labels)
    : tree_(std::move(tree)), labels_(std::move(labels)) {
  const std::size_t n = labels_.size();
  const double scale = tree_->tree_depth();
  if (!(scale > 0.0)) throw Error(ErrorCode::DegenerateDistance, "tree has zero depth");
  tree_depth_original_ = scale;

  std::vector<std::vector<int>> paths(n);  // root ... tip
  tip_nodes_.reserve(n);
  tip_depth_.reserve(n);
  for (std::size_t h = 0; h < n; ++h) {
    auto leaf = tree_->find_leaf(labels_[h]);
    if (!leaf) throw Error(ErrorCode::UnknownTip, labels_[h]);
    tip_nodes_.push_back(*leaf);
    tip_depth_.push_back(tree_->depths()[*leaf] / scale);
    for (int id = *leaf; id != -1; id = tree_->node(id).parent) paths[h].push_back(id);
    std::reverse(paths[h].begin(), paths[h].end());
  }

  mrca_depth_.assign(n * n, 0.0);
  for (std::size_t h = 0; h < n; ++h) {
    mrca_depth_[h * n + h] = tip_depth_[h];
    for (std::size_t i = h + 1; i < n; ++i) {
      const auto& a = paths[h];
      const auto& b = paths[i];
      std::size_t k = 0;
      while (k + 1 < a.size() && k + 1 < b.size() && a[k + 1] == b[k + 1]) ++k;
      const double d = std::min(tree_->depths()[a[k]] / scale, std::min(tip_depth_[h], tip_depth_[i]));
      mrca_depth_[h * n + i] = d;
      mrca_depth_[i * n + h] = d;
    }
  }
}

PairwiseMrcaDepths PairwiseMrcaDepths::select(std::span<const std::string> labels) const {
  return PairwiseMrcaDepths(tree_, std::vector<std::string>(labels.begin(), labels.end()));
}

PairwiseMrcaDepths pairwise_depths(const PhyloTree& tree) {
  return PairwiseMrcaDepths(std::make_shared<const PhyloTree>(tree), tree.leaf_labels());
}

PairwiseMrcaDepths pairwise_depths(const PhyloTree& tree, std::span<const std::string> order) {
  return PairwiseMrcaDepths(std::make_shared<const PhyloTree>(tree),
                            std::vector<std::string>(order.begin(), order.end()));
}

}  // namespace lsnet
