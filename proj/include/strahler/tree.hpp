#ifndef STRAHLER_TREE_HPP
#define STRAHLER_TREE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strahler/errors.hpp"

namespace strahler {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// Unlabelled binary tree stored as an index-based node arena.
/// Every node has either no children (leaf) or exactly two.
struct BinaryTree {
  struct Node {
    NodeId left = kNoNode;
    NodeId right = kNoNode;
    bool is_leaf() const { return left == kNoNode; }
  };

  std::vector<Node> nodes;
  NodeId root = 0;

  static BinaryTree leaf();
  /// Joins two trees below a fresh root.
  static BinaryTree branch(const BinaryTree& l, const BinaryTree& r);

  std::size_t size() const { return nodes.size(); }
  std::size_t leaf_count() const;
  bool is_leaf(NodeId v) const { return nodes[v].is_leaf(); }
};

/// Shape-only structural equality.
bool operator==(const BinaryTree& a, const BinaryTree& b);
inline bool operator!=(const BinaryTree& a, const BinaryTree& b) { return !(a == b); }

/// Binary tree with exactly one leaf marked as the hole x.
struct BinaryContext {
  std::vector<BinaryTree::Node> nodes;
  NodeId root = 0;
  NodeId hole = 0;

  /// The bare hole, i.e. the identity context.
  static BinaryContext identity();

  std::size_t size() const { return nodes.size(); }
  bool is_leaf(NodeId v) const { return nodes[v].is_leaf(); }
};

bool operator==(const BinaryContext& a, const BinaryContext& b);
inline bool operator!=(const BinaryContext& a, const BinaryContext& b) { return !(a == b); }

/// Explicit node-graph form of a tree: named nodes with child lists.
struct AdjacencyTree {
  std::string root;
  /// Empty list = leaf; otherwise exactly two entries.
  std::map<std::string, std::vector<std::string>> children;
};

/// Parses the preorder term representation over {a,b}. Accepts exactly the
/// language generated by S -> a | bSS; throws MalformedTerm with the first
/// offending position otherwise. Iterative, so arbitrarily long inputs are fine.
BinaryTree parse_term(const std::string& text);

/// Same, but exactly one leaf must be the placeholder x.
BinaryContext parse_context(const std::string& text);

/// Preorder serialization; inverse of parse_term.
std::string to_term(const BinaryTree& t);
std::string to_term(const BinaryContext& c);

/// Replaces the hole of ctx by the argument.
BinaryTree substitute(const BinaryContext& ctx, const BinaryTree& arg);
BinaryContext substitute(const BinaryContext& ctx, const BinaryContext& arg);

/// Conversion from the node-graph form. Throws NotATree on a node with two
/// parents, a cycle, an unreachable node, or a dangling child reference.
BinaryTree from_adjacency(const AdjacencyTree& g);

/// Inverse direction; node names are preorder indices n0, n1, ...
AdjacencyTree to_adjacency(const BinaryTree& t);

/// Adjacency file format: `root <id>` then `<id> -> <id> <id>` | `<id> -> .`
AdjacencyTree parse_adjacency_file(const std::string& text);
std::string print_adjacency_file(const AdjacencyTree& g);

}  // namespace strahler

#endif
