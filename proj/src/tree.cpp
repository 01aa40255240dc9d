#include "strahler/tree.hpp"

#include <algorithm>
#include <sstream>

namespace strahler {

BinaryTree BinaryTree::leaf() {
  BinaryTree t;
  t.nodes.push_back({});
  t.root = 0;
  return t;
}

BinaryTree BinaryTree::branch(const BinaryTree& l, const BinaryTree& r) {
  BinaryTree t;
  t.nodes.reserve(1 + l.nodes.size() + r.nodes.size());
  t.nodes.push_back({});
  const NodeId loff = 1;
  for (const auto& n : l.nodes)
    t.nodes.push_back({n.is_leaf() ? kNoNode : n.left + loff,
                       n.is_leaf() ? kNoNode : n.right + loff});
  const NodeId roff = static_cast<NodeId>(1 + l.nodes.size());
  for (const auto& n : r.nodes)
    t.nodes.push_back({n.is_leaf() ? kNoNode : n.left + roff,
                       n.is_leaf() ? kNoNode : n.right + roff});
  t.nodes[0].left = l.root + loff;
  t.nodes[0].right = r.root + roff;
  t.root = 0;
  return t;
}

std::size_t BinaryTree::leaf_count() const {
  std::size_t n = 0;
  for (const auto& node : nodes)
    if (node.is_leaf()) ++n;
  return n;
}

BinaryContext BinaryContext::identity() {
  BinaryContext c;
  c.nodes.push_back({});
  c.root = 0;
  c.hole = 0;
  return c;
}

namespace {

// Simultaneous iterative descent; shape comparison only.
template <class Extra>
bool same_shape(const std::vector<BinaryTree::Node>& an, NodeId ar,
                const std::vector<BinaryTree::Node>& bn, NodeId br, const Extra& extra) {
  std::vector<std::pair<NodeId, NodeId>> work{{ar, br}};
  while (!work.empty()) {
    auto [u, v] = work.back();
    work.pop_back();
    if (an[u].is_leaf() != bn[v].is_leaf()) return false;
    if (!extra(u, v)) return false;
    if (!an[u].is_leaf()) {
      work.emplace_back(an[u].left, bn[v].left);
      work.emplace_back(an[u].right, bn[v].right);
    }
  }
  return true;
}

}  // namespace

bool operator==(const BinaryTree& a, const BinaryTree& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  return same_shape(a.nodes, a.root, b.nodes, b.root, [](NodeId, NodeId) { return true; });
}

bool operator==(const BinaryContext& a, const BinaryContext& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  return same_shape(a.nodes, a.root, b.nodes, b.root,
                    [&](NodeId u, NodeId v) { return (u == a.hole) == (v == b.hole); });
}

namespace {

struct Slot {
  NodeId parent;  // kNoNode for the root slot
  bool right;
};

// Shared preorder parser for terms and contexts. hole == nullptr forbids x.
void parse_into(const std::string& text, std::vector<BinaryTree::Node>& nodes,
                NodeId* hole) {
  std::size_t len = text.size();
  // One trailing newline permitted.
  if (len > 0 && text[len - 1] == '\n') --len;

  std::vector<Slot> pending{{kNoNode, false}};
  for (std::size_t pos = 0; pos < len; ++pos) {
    const char c = text[pos];
    if (pending.empty()) throw MalformedTerm(pos, "trailing input after complete term");
    if (c != 'a' && c != 'b' && !(hole != nullptr && c == 'x'))
      throw MalformedTerm(pos, std::string("unexpected character '") + c + "'");

    const Slot slot = pending.back();
    pending.pop_back();
    const NodeId id = static_cast<NodeId>(nodes.size());
    nodes.push_back({});
    if (slot.parent != kNoNode) {
      if (slot.right)
        nodes[slot.parent].right = id;
      else
        nodes[slot.parent].left = id;
    }
    if (c == 'b') {
      // Right slot pushed first so the left subtree is parsed next (preorder).
      pending.push_back({id, true});
      pending.push_back({id, false});
    } else if (c == 'x') {
      if (*hole != kNoNode) throw MalformedTerm(pos, "second occurrence of x");
      *hole = id;
    }
  }
  if (!pending.empty()) throw MalformedTerm(len, "unexpected end of input");
}

}  // namespace

BinaryTree parse_term(const std::string& text) {
  BinaryTree t;
  parse_into(text, t.nodes, nullptr);
  t.root = 0;
  return t;
}

BinaryContext parse_context(const std::string& text) {
  BinaryContext c;
  NodeId hole = kNoNode;
  parse_into(text, c.nodes, &hole);
  if (hole == kNoNode) throw MalformedTerm(text.size(), "context has no occurrence of x");
  c.root = 0;
  c.hole = hole;
  return c;
}

namespace {

std::string serialize(const std::vector<BinaryTree::Node>& nodes, NodeId root, NodeId hole) {
  std::string out;
  out.reserve(nodes.size());
  std::vector<NodeId> work{root};
  while (!work.empty()) {
    const NodeId v = work.back();
    work.pop_back();
    if (nodes[v].is_leaf()) {
      out.push_back(v == hole ? 'x' : 'a');
    } else {
      out.push_back('b');
      work.push_back(nodes[v].right);
      work.push_back(nodes[v].left);
    }
  }
  return out;
}

}  // namespace

std::string to_term(const BinaryTree& t) { return serialize(t.nodes, t.root, kNoNode); }
std::string to_term(const BinaryContext& c) { return serialize(c.nodes, c.root, c.hole); }

namespace {

// Copies src into dst with an index offset; returns offset applied.
NodeId append_arena(std::vector<BinaryTree::Node>& dst,
                    const std::vector<BinaryTree::Node>& src) {
  const NodeId off = static_cast<NodeId>(dst.size());
  for (const auto& n : src)
    dst.push_back({n.is_leaf() ? kNoNode : n.left + off,
                   n.is_leaf() ? kNoNode : n.right + off});
  return off;
}

// Copies ctx minus its hole node; child references to the hole are redirected
// to sub_root. Callers handle the bare-hole context themselves.
template <class Out>
void splice(Out& out, const BinaryContext& ctx, NodeId sub_root) {
  out.nodes.reserve(out.nodes.size() + ctx.nodes.size() - 1);
  std::vector<NodeId> remap(ctx.nodes.size(), kNoNode);
  NodeId next = static_cast<NodeId>(out.nodes.size());
  for (NodeId v = 0; v < static_cast<NodeId>(ctx.nodes.size()); ++v)
    if (v != ctx.hole) remap[v] = next++;
  for (NodeId v = 0; v < static_cast<NodeId>(ctx.nodes.size()); ++v) {
    if (v == ctx.hole) continue;
    const auto& n = ctx.nodes[v];
    if (n.is_leaf())
      out.nodes.push_back({});
    else
      out.nodes.push_back({n.left == ctx.hole ? sub_root : remap[n.left],
                           n.right == ctx.hole ? sub_root : remap[n.right]});
  }
  out.root = remap[ctx.root];
}

}  // namespace

BinaryTree substitute(const BinaryContext& ctx, const BinaryTree& arg) {
  if (ctx.hole == ctx.root) return arg;
  BinaryTree out;
  out.nodes.clear();
  const NodeId arg_off = append_arena(out.nodes, arg.nodes);
  splice(out, ctx, arg.root + arg_off);
  return out;
}

BinaryContext substitute(const BinaryContext& ctx, const BinaryContext& arg) {
  if (ctx.hole == ctx.root) return arg;
  BinaryContext out;
  out.nodes.clear();
  const NodeId arg_off = append_arena(out.nodes, arg.nodes);
  out.hole = arg.hole + arg_off;
  splice(out, ctx, arg.root + arg_off);
  return out;
}

BinaryTree from_adjacency(const AdjacencyTree& g) {
  if (g.children.find(g.root) == g.children.end())
    throw NotATree("root '" + g.root + "' has no node record");

  std::map<std::string, int> indegree;
  for (const auto& [id, kids] : g.children) {
    if (!kids.empty() && kids.size() != 2)
      throw NotATree("node '" + id + "' has " + std::to_string(kids.size()) + " children");
    indegree.try_emplace(id, 0);
    for (const auto& k : kids) {
      if (g.children.find(k) == g.children.end())
        throw NotATree("child '" + k + "' has no node record");
      ++indegree[k];
    }
  }
  for (const auto& [id, deg] : indegree) {
    if (id == g.root) {
      if (deg != 0) throw NotATree("root '" + id + "' has a parent");
    } else if (deg == 0) {
      throw NotATree("node '" + id + "' is unreachable from the root");
    } else if (deg > 1) {
      throw NotATree("node '" + id + "' has " + std::to_string(deg) + " parents");
    }
  }

  // In-degrees are all correct, so a traversal visiting every node exactly
  // once certifies tree-ness; anything left over sits on a cycle.
  BinaryTree t;
  std::vector<std::pair<const std::string*, Slot>> work;
  work.push_back({&g.root, Slot{kNoNode, false}});
  std::size_t visited = 0;
  while (!work.empty()) {
    auto [idp, slot] = work.back();
    work.pop_back();
    ++visited;
    if (visited > g.children.size()) throw NotATree("cycle through node '" + *idp + "'");
    const NodeId v = static_cast<NodeId>(t.nodes.size());
    t.nodes.push_back({});
    if (slot.parent != kNoNode) {
      if (slot.right)
        t.nodes[slot.parent].right = v;
      else
        t.nodes[slot.parent].left = v;
    }
    const auto& kids = g.children.at(*idp);
    if (!kids.empty()) {
      work.push_back({&kids[1], Slot{v, true}});
      work.push_back({&kids[0], Slot{v, false}});
    }
  }
  if (visited != g.children.size())
    throw NotATree("graph has nodes not reachable from the root");
  t.root = 0;
  return t;
}

AdjacencyTree to_adjacency(const BinaryTree& t) {
  // Preorder numbering keeps output deterministic for a given structure.
  std::vector<NodeId> order;
  order.reserve(t.nodes.size());
  std::vector<NodeId> work{t.root};
  std::vector<NodeId> name(t.nodes.size(), kNoNode);
  while (!work.empty()) {
    const NodeId v = work.back();
    work.pop_back();
    name[v] = static_cast<NodeId>(order.size());
    order.push_back(v);
    if (!t.nodes[v].is_leaf()) {
      work.push_back(t.nodes[v].right);
      work.push_back(t.nodes[v].left);
    }
  }
  AdjacencyTree g;
  g.root = "n0";
  for (const NodeId v : order) {
    const std::string id = "n" + std::to_string(name[v]);
    auto& kids = g.children[id];
    if (!t.nodes[v].is_leaf()) {
      kids.push_back("n" + std::to_string(name[t.nodes[v].left]));
      kids.push_back("n" + std::to_string(name[t.nodes[v].right]));
    }
  }
  return g;
}

AdjacencyTree parse_adjacency_file(const std::string& text) {
  AdjacencyTree g;
  std::istringstream in(text);
  std::string line;
  bool have_root = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line
    if (tok[0] == '#') continue;
    if (!have_root) {
      if (tok != "root") throw NotATree("line 1 must be 'root <id>'");
      if (!(ls >> g.root)) throw NotATree("missing root id");
      have_root = true;
      continue;
    }
    std::string arrow, a, b;
    if (!(ls >> arrow) || arrow != "->")
      throw NotATree("line " + std::to_string(lineno) + ": expected '<id> -> ...'");
    if (!(ls >> a)) throw NotATree("line " + std::to_string(lineno) + ": missing children");
    auto [it, fresh] = g.children.try_emplace(tok);
    if (!fresh) throw NotATree("duplicate node record for '" + tok + "'");
    if (a == ".") {
      if (ls >> b) throw NotATree("line " + std::to_string(lineno) + ": extra tokens");
    } else {
      if (!(ls >> b)) throw NotATree("line " + std::to_string(lineno) + ": expected two children");
      std::string extra;
      if (ls >> extra) throw NotATree("line " + std::to_string(lineno) + ": extra tokens");
      it->second = {a, b};
    }
  }
  if (!have_root) throw NotATree("empty adjacency input");
  return g;
}

std::string print_adjacency_file(const AdjacencyTree& g) {
  std::ostringstream out;
  out << "root " << g.root << "\n";
  // Root record first, then the rest in map order.
  auto emit = [&](const std::string& id, const std::vector<std::string>& kids) {
    out << id << " -> ";
    if (kids.empty())
      out << ".";
    else
      out << kids[0] << " " << kids[1];
    out << "\n";
  };
  if (auto it = g.children.find(g.root); it != g.children.end()) emit(it->first, it->second);
  for (const auto& [id, kids] : g.children)
    if (id != g.root) emit(id, kids);
  return out.str();
}

}  // namespace strahler
