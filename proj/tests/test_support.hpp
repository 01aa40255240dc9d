#ifndef STRAHLER_TEST_SUPPORT_HPP
#define STRAHLER_TEST_SUPPORT_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "strahler/gadgets.hpp"
#include "strahler/grammar.hpp"
#include "strahler/succinct.hpp"
#include "strahler/tree.hpp"

namespace strahler::testing {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Tree generators

inline BinaryTree complete_tree(int depth) {
  BinaryTree t = BinaryTree::leaf();
  for (int i = 0; i < depth; ++i) t = BinaryTree::branch(t, t);
  return t;
}

// b(b(...b(a,a)...,a),a): internal nodes form a left path.
inline BinaryTree left_caterpillar(int internals) {
  BinaryTree t = BinaryTree::leaf();
  for (int i = 0; i < internals; ++i) t = BinaryTree::branch(t, BinaryTree::leaf());
  return t;
}

// Uniformly random split into odd-sized halves; node_count must be odd.
inline BinaryTree random_tree(Rng& rng, int node_count) {
  if (node_count <= 1) return BinaryTree::leaf();
  const int pairs = (node_count - 1) / 2;  // left gets 2l-1 nodes, l in [1, pairs]
  std::uniform_int_distribution<int> dist(1, pairs);
  const int left = 2 * dist(rng) - 1;
  return BinaryTree::branch(random_tree(rng, left), random_tree(rng, node_count - 1 - left));
}

inline BinaryTree random_tree_up_to(Rng& rng, int max_nodes) {
  std::uniform_int_distribution<int> dist(0, (max_nodes - 1) / 2);
  return random_tree(rng, 2 * dist(rng) + 1);
}

// All shapes with exactly node_count nodes.
inline void all_trees_exact(int node_count, std::vector<BinaryTree>& out) {
  if (node_count == 1) {
    out.push_back(BinaryTree::leaf());
    return;
  }
  for (int left = 1; left <= node_count - 2; left += 2) {
    std::vector<BinaryTree> ls, rs;
    all_trees_exact(left, ls);
    all_trees_exact(node_count - 1 - left, rs);
    for (const auto& l : ls)
      for (const auto& r : rs) out.push_back(BinaryTree::branch(l, r));
  }
}

inline std::vector<BinaryTree> all_trees_up_to(int max_nodes) {
  std::vector<BinaryTree> out;
  for (int n = 1; n <= max_nodes; n += 2) all_trees_exact(n, out);
  return out;
}

// Independent membership check for the term language S -> a | bSS.
inline bool bin_member(const std::string& w) {
  std::size_t pos = 0;
  auto consume = [&](auto&& self) -> bool {
    if (pos >= w.size()) return false;
    const char c = w[pos++];
    if (c == 'a') return true;
    if (c != 'b') return false;
    return self(self) && self(self);
  };
  return consume(consume) && pos == w.size();
}

// ---------------------------------------------------------------------------
// Contexts

inline BinaryContext random_context(Rng& rng, int max_nodes) {
  // Random tree, then mark a random leaf as the hole.
  const BinaryTree t = random_tree_up_to(rng, max_nodes);
  std::vector<NodeId> leaves;
  for (NodeId v = 0; v < static_cast<NodeId>(t.nodes.size()); ++v)
    if (t.nodes[v].is_leaf()) leaves.push_back(v);
  std::uniform_int_distribution<std::size_t> dist(0, leaves.size() - 1);
  BinaryContext c;
  c.nodes = t.nodes;
  c.root = t.root;
  c.hole = leaves[dist(rng)];
  return c;
}

// ---------------------------------------------------------------------------
// Dags

inline Dag random_dag(Rng& rng, int node_count) {
  // Topological construction: node i draws children from {i+1, ..., n-1};
  // the unreachable remainder is dropped by round-tripping the file form.
  Dag d;
  d.nodes.resize(node_count);
  d.names.resize(node_count);
  std::uniform_int_distribution<int> coin(0, 99);
  for (int v = 0; v < node_count; ++v) {
    d.names[v] = "n" + std::to_string(v);
    if (v + 1 < node_count && (v == 0 || coin(rng) < 70)) {
      std::uniform_int_distribution<int> pick(v + 1, node_count - 1);
      d.nodes[v].kids = {pick(rng), pick(rng)};
    }
  }
  d.root = 0;
  return parse_dag_file(print_dag_file(d));
}

// All dags on exactly node_count nodes in canonical topological form (node 0
// the root, children above the parent index), keeping those where every node
// is reachable.
inline std::vector<Dag> all_dags_exact(int node_count) {
  std::vector<Dag> out;
  // Option per node: -1 = leaf, otherwise child pair encoded as a*(n)+b.
  std::vector<int> choice(node_count, -1);
  auto emit = [&]() {
    Dag d;
    d.nodes.resize(node_count);
    d.names.resize(node_count);
    for (int v = 0; v < node_count; ++v) {
      d.names[v] = "n" + std::to_string(v);
      if (choice[v] >= 0)
        d.nodes[v].kids = {choice[v] / node_count, choice[v] % node_count};
    }
    d.root = 0;
    std::vector<bool> seen(node_count, false);
    seen[0] = true;
    std::vector<NodeId> work{0};
    int count = 1;
    while (!work.empty()) {
      const NodeId v = work.back();
      work.pop_back();
      for (const NodeId k : d.nodes[v].kids)
        if (!seen[k]) {
          seen[k] = true;
          ++count;
          work.push_back(k);
        }
    }
    if (count == node_count) out.push_back(std::move(d));
  };
  auto rec = [&](auto&& self, int v) -> void {
    if (v == node_count) {
      emit();
      return;
    }
    choice[v] = -1;
    self(self, v + 1);
    for (int a = v + 1; a < node_count; ++a)
      for (int b = v + 1; b < node_count; ++b) {
        choice[v] = a * node_count + b;
        self(self, v + 1);
      }
    choice[v] = -1;
  };
  rec(rec, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Tslps

inline Tslp random_tslp(Rng& rng, int var_count, std::int64_t max_val_nodes) {
  using RK = Tslp::RuleKind;
  for (int attempt = 0; attempt < 200; ++attempt) {
    Tslp g;
    g.names.resize(var_count);
    g.rules.resize(var_count);
    g.is_context.resize(var_count);
    // Classes first; the last variable is a tree leaf so every class has a
    // target to reference.
    std::uniform_int_distribution<int> coin(0, 99);
    for (int v = 0; v < var_count; ++v) {
      g.names[v] = "V" + std::to_string(v);
      g.is_context[v] = v != 0 && v != var_count - 1 && coin(rng) < 40;
    }
    auto pick_from = [&](int lo, bool want_ctx) -> NodeId {
      std::vector<NodeId> cands;
      for (int u = lo; u < var_count; ++u)
        if (g.is_context[u] == want_ctx) cands.push_back(u);
      if (cands.empty()) return kNoNode;
      std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
      return cands[pick(rng)];
    };
    bool ok = true;
    for (int v = 0; v < var_count && ok; ++v) {
      if (v == var_count - 1) {
        g.rules[v] = {RK::Leaf, kNoNode, kNoNode};
        g.is_context[v] = false;
        continue;
      }
      if (!g.is_context[v]) {
        const int dice = coin(rng);
        if (dice < 15) {
          g.rules[v] = {RK::Leaf, kNoNode, kNoNode};
        } else if (dice < 60) {
          const NodeId b = pick_from(v + 1, false), c = pick_from(v + 1, false);
          if (b == kNoNode || c == kNoNode) ok = false;
          else g.rules[v] = {RK::Pair, b, c};
        } else {
          const NodeId dctx = pick_from(v + 1, true), c = pick_from(v + 1, false);
          if (dctx == kNoNode || c == kNoNode) ok = false;
          else g.rules[v] = {RK::Apply, dctx, c};
        }
      } else {
        const int dice = coin(rng);
        if (dice < 60) {
          const NodeId b = pick_from(v + 1, false);
          if (b == kNoNode) ok = false;
          else g.rules[v] = {coin(rng) < 50 ? RK::CtxLeft : RK::CtxRight, b, kNoNode};
        } else {
          const NodeId d1 = pick_from(v + 1, true), d2 = pick_from(v + 1, true);
          if (d1 == kNoNode || d2 == kNoNode) ok = false;
          else g.rules[v] = {RK::Compose, d1, d2};
        }
      }
    }
    if (!ok) continue;
    g.start = 0;
    // Drop unreachable variables by reparsing only the reachable rules.
    std::vector<bool> seen(var_count, false);
    seen[0] = true;
    std::vector<NodeId> work{0};
    while (!work.empty()) {
      const NodeId v = work.back();
      work.pop_back();
      const auto& r = g.rules[v];
      std::vector<NodeId> refs;
      if (r.kind == RK::Leaf) continue;
      if (r.kind == RK::CtxLeft || r.kind == RK::CtxRight) refs = {r.first};
      else refs = {r.first, r.second};
      for (const NodeId u : refs)
        if (!seen[u]) {
          seen[u] = true;
          work.push_back(u);
        }
    }
    Tslp pruned;
    std::vector<NodeId> remap(var_count, kNoNode);
    for (int v = 0; v < var_count; ++v) {
      if (!seen[v]) continue;
      remap[v] = static_cast<NodeId>(pruned.rules.size());
      pruned.rules.push_back(g.rules[v]);
      pruned.names.push_back(g.names[v]);
      pruned.is_context.push_back(g.is_context[v]);
    }
    for (auto& r : pruned.rules) {
      if (r.first != kNoNode) r.first = remap[r.first];
      if (r.second != kNoNode && r.kind != RK::CtxLeft && r.kind != RK::CtxRight)
        r.second = remap[r.second];
    }
    pruned.start = 0;
    validate(pruned);
    if (tslp_val_size(pruned) > max_val_nodes) continue;
    return pruned;
  }
  // Statistically unreachable for sensible parameters.
  Tslp g;
  g.names = {"S"};
  g.rules = {{RK::Leaf, kNoNode, kNoNode}};
  g.is_context = {false};
  g.start = 0;
  return g;
}

// ---------------------------------------------------------------------------
// Grammars

inline CnfGrammar random_grammar(Rng& rng, int nonterminals, double eps_prob = 0.4,
                                 int max_pair_prods = 3) {
  CnfGrammar g;
  for (int v = 0; v < nonterminals; ++v) g.names.push_back("N" + std::to_string(v));
  g.start = 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<NodeId> pick(0, nonterminals - 1);
  std::uniform_int_distribution<int> count(0, max_pair_prods);
  for (NodeId v = 0; v < nonterminals; ++v) {
    if (unit(rng) < eps_prob) g.prods.push_back({v, true, kNoNode, kNoNode});
    const int k = count(rng);
    for (int i = 0; i < k; ++i) g.prods.push_back({v, false, pick(rng), pick(rng)});
  }
  return g;
}

// Brute-force self-doubling oracle: breadth-first sentential-form search for
// A =>* (nullable)* A (nullable)* A (nullable)*, capped by form length.
inline bool self_doubling_oracle(const CnfGrammar& g, NodeId a, int max_len = 6,
                                 int max_forms = 200000) {
  const auto nullable = productive_set(g);
  std::set<std::vector<NodeId>> seen;
  std::vector<std::vector<NodeId>> frontier{{a}};
  seen.insert(frontier[0]);
  int budget = max_forms;
  while (!frontier.empty() && budget > 0) {
    std::vector<std::vector<NodeId>> next;
    for (const auto& form : frontier) {
      int count_a = 0;
      bool rest_nullable = true;
      for (const NodeId s : form) {
        if (s == a && count_a < 2)
          ++count_a;
        else if (!nullable[s])
          rest_nullable = false;
      }
      if (count_a >= 2 && rest_nullable) return true;
      for (std::size_t i = 0; i < form.size(); ++i) {
        for (const auto& p : g.prods) {
          if (p.lhs != form[i]) continue;
          std::vector<NodeId> f2;
          f2.insert(f2.end(), form.begin(), form.begin() + i);
          if (!p.eps) {
            f2.push_back(p.b);
            f2.push_back(p.c);
          }
          f2.insert(f2.end(), form.begin() + i + 1, form.end());
          if (static_cast<int>(f2.size()) > max_len) continue;
          if (seen.insert(f2).second) {
            next.push_back(std::move(f2));
            --budget;
          }
        }
      }
    }
    frontier = std::move(next);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Formulas and circuits

inline BoolFormula random_formula(Rng& rng, int max_depth) {
  BoolFormula f;
  std::uniform_int_distribution<int> coin(0, 99);
  auto rec = [&](auto&& self, int depth) -> int {
    if (depth == 0 || coin(rng) < 25) {
      f.nodes.push_back({coin(rng) < 50 ? BoolFormula::Kind::ConstTrue
                                        : BoolFormula::Kind::ConstFalse});
      return static_cast<int>(f.nodes.size() - 1);
    }
    const int id = static_cast<int>(f.nodes.size());
    f.nodes.push_back(
        {coin(rng) < 50 ? BoolFormula::Kind::And : BoolFormula::Kind::Or});
    const int l = self(self, depth - 1);
    const int r = self(self, depth - 1);
    f.nodes[id].left = l;
    f.nodes[id].right = r;
    return id;
  };
  f.root = rec(rec, max_depth);
  return f;
}

inline BoolFormula random_matrix(Rng& rng, int height, int vars) {
  // Complete shape of the given height with random literals.
  BoolFormula f;
  std::uniform_int_distribution<int> coin(0, 99);
  std::uniform_int_distribution<int> pickvar(1, vars);
  auto rec = [&](auto&& self, int depth) -> int {
    if (depth == 0) {
      f.nodes.push_back(
          {BoolFormula::Kind::Lit, -1, -1, pickvar(rng), coin(rng) < 50});
      return static_cast<int>(f.nodes.size() - 1);
    }
    const int id = static_cast<int>(f.nodes.size());
    f.nodes.push_back(
        {coin(rng) < 50 ? BoolFormula::Kind::And : BoolFormula::Kind::Or});
    const int l = self(self, depth - 1);
    const int r = self(self, depth - 1);
    f.nodes[id].left = l;
    f.nodes[id].right = r;
    return id;
  };
  f.root = rec(rec, height);
  return f;
}

inline LayeredCircuit random_layered_circuit(Rng& rng, int depth, int width) {
  LayeredCircuit c;
  std::uniform_int_distribution<int> coin(0, 99);
  std::vector<int> prev;
  for (int i = 0; i < width; ++i) {
    c.gates.push_back({coin(rng) < 50 ? LayeredCircuit::Kind::ConstTrue
                                      : LayeredCircuit::Kind::ConstFalse,
                       -1, -1});
    c.names.push_back("g" + std::to_string(c.gates.size() - 1));
    prev.push_back(static_cast<int>(c.gates.size() - 1));
  }
  for (int level = 1; level <= depth; ++level) {
    std::vector<int> cur;
    const int w = level == depth ? 1 : width;
    std::uniform_int_distribution<std::size_t> pick(0, prev.size() - 1);
    for (int i = 0; i < w; ++i) {
      c.gates.push_back({coin(rng) < 50 ? LayeredCircuit::Kind::And
                                        : LayeredCircuit::Kind::Or,
                         static_cast<int>(pick(rng)) + 0, 0});
      c.gates.back().a = static_cast<int>(prev[pick(rng)]);
      c.gates.back().b = static_cast<int>(prev[pick(rng)]);
      c.names.push_back("g" + std::to_string(c.gates.size() - 1));
      cur.push_back(static_cast<int>(c.gates.size() - 1));
    }
    prev = std::move(cur);
  }
  c.output = prev[0];
  return c;
}

// ---------------------------------------------------------------------------
// Register-minimality oracle

// Minimal peak register count over all evaluation orders where a binary op may
// overwrite one of its operands and loads take a fresh register: search over
// states (sets of computed-but-unconsumed nodes) with at most `limit` live.
inline bool evaluable_within(const BinaryTree& shape, int limit) {
  if (limit <= 0) return false;
  std::set<std::vector<NodeId>> seen;
  std::vector<std::vector<NodeId>> stack{{}};
  seen.insert({});
  const NodeId n = static_cast<NodeId>(shape.nodes.size());
  while (!stack.empty()) {
    const std::vector<NodeId> live = stack.back();
    stack.pop_back();
    if (live.size() == 1 && live[0] == shape.root) return true;
    // Loads: any leaf not currently represented by a live subtree.
    // A node is "done" iff it lies under some live root.
    std::vector<bool> done(n, false);
    for (const NodeId r : live) {
      std::vector<NodeId> work{r};
      while (!work.empty()) {
        const NodeId v = work.back();
        work.pop_back();
        done[v] = true;
        if (!shape.nodes[v].is_leaf()) {
          work.push_back(shape.nodes[v].left);
          work.push_back(shape.nodes[v].right);
        }
      }
    }
    auto push_state = [&](std::vector<NodeId> next) {
      std::sort(next.begin(), next.end());
      if (static_cast<int>(next.size()) <= limit && seen.insert(next).second)
        stack.push_back(next);
    };
    for (NodeId v = 0; v < n; ++v) {
      if (done[v]) continue;
      if (shape.nodes[v].is_leaf()) {
        auto next = live;
        next.push_back(v);
        push_state(std::move(next));
      } else {
        // Combine when both children are live roots.
        const auto l = std::find(live.begin(), live.end(), shape.nodes[v].left);
        const auto r = std::find(live.begin(), live.end(), shape.nodes[v].right);
        if (l != live.end() && r != live.end()) {
          std::vector<NodeId> next;
          for (const NodeId x : live)
            if (x != shape.nodes[v].left && x != shape.nodes[v].right) next.push_back(x);
          next.push_back(v);
          push_state(std::move(next));
        }
      }
    }
  }
  return false;
}

inline int min_registers_oracle(const BinaryTree& shape) {
  for (int r = 1;; ++r)
    if (evaluable_within(shape, r)) return r;
}

}  // namespace strahler::testing

#endif
