#include "strahler/grammar.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>
#include <unordered_map>

#include "strahler/context_algebra.hpp"
#include "strahler/errors.hpp"

namespace strahler {

CnfGrammar parse_grammar_file(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool have_start = false;
  std::string start_name;
  CnfGrammar g;
  std::map<std::string, NodeId> index;
  auto var = [&](const std::string& name) {
    auto [it, fresh] = index.try_emplace(name, static_cast<NodeId>(g.names.size()));
    if (fresh) g.names.push_back(name);
    return it->second;
  };
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok[0] == '#') continue;
    if (!have_start) {
      if (tok != "start") throw InputError("line 1 must be 'start <S>'");
      if (!(ls >> start_name)) throw InputError("missing start nonterminal");
      have_start = true;
      continue;
    }
    std::string arrow, a, b;
    if (!(ls >> arrow) || arrow != "->")
      throw InputError("line " + std::to_string(lineno) + ": expected '<A> -> ...'");
    if (!(ls >> a)) throw InputError("line " + std::to_string(lineno) + ": missing body");
    const NodeId lhs = var(tok);
    if (a == "eps") {
      std::string extra;
      if (ls >> extra) throw InputError("line " + std::to_string(lineno) + ": extra tokens");
      g.prods.push_back({lhs, true, kNoNode, kNoNode});
    } else {
      if (!(ls >> b))
        throw InputError("line " + std::to_string(lineno) + ": expected 'A -> B C'");
      std::string extra;
      if (ls >> extra) throw InputError("line " + std::to_string(lineno) + ": extra tokens");
      g.prods.push_back({lhs, false, var(a), var(b)});
    }
  }
  if (!have_start) throw InputError("empty grammar input");
  g.start = var(start_name);
  return g;
}

std::string print_grammar_file(const CnfGrammar& g) {
  std::ostringstream out;
  out << "start " << g.names[g.start] << "\n";
  for (const auto& p : g.prods) {
    out << g.names[p.lhs] << " -> ";
    if (p.eps)
      out << "eps";
    else
      out << g.names[p.b] << " " << g.names[p.c];
    out << "\n";
  }
  return out.str();
}

std::vector<bool> productive_set(const CnfGrammar& g) {
  std::vector<bool> prod(g.names.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.prods) {
      if (prod[p.lhs]) continue;
      if (p.eps || (prod[p.b] && prod[p.c])) {
        prod[p.lhs] = true;
        changed = true;
      }
    }
  }
  return prod;
}

namespace {

std::vector<bool> reachable_set(const CnfGrammar& g) {
  std::vector<bool> reach(g.names.size(), false);
  reach[g.start] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.prods) {
      if (!reach[p.lhs] || p.eps) continue;
      if (!reach[p.b]) reach[p.b] = changed = true;
      if (!reach[p.c]) reach[p.c] = changed = true;
    }
  }
  return reach;
}

}  // namespace

std::optional<PCertificate> derive_p_certificate(const CnfGrammar& g) {
  // Fixpoint rounds; recording the first witnessing production orders the
  // witness graph by round number, which makes it acyclic.
  PCertificate f;
  f.choice.assign(g.names.size(), -1);
  std::vector<bool> prod(g.names.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < g.prods.size(); ++i) {
      const auto& p = g.prods[i];
      if (prod[p.lhs]) continue;
      if (p.eps || (prod[p.b] && prod[p.c])) {
        prod[p.lhs] = true;
        f.choice[p.lhs] = static_cast<int>(i);
        changed = true;
      }
    }
  }
  const auto reach = reachable_set(g);
  for (std::size_t v = 0; v < g.names.size(); ++v)
    if (reach[v] && !prod[v]) return std::nullopt;
  return f;
}

bool verify_p_certificate(const CnfGrammar& g, const PCertificate& f) {
  if (f.choice.size() != g.names.size()) return false;
  const auto reach = reachable_set(g);
  for (std::size_t v = 0; v < g.names.size(); ++v) {
    if (reach[v] && f.choice[v] < 0) return false;
    if (f.choice[v] < 0) continue;
    if (static_cast<std::size_t>(f.choice[v]) >= g.prods.size()) return false;
    if (g.prods[f.choice[v]].lhs != static_cast<NodeId>(v)) return false;
  }
  // Witness graph must be acyclic over the certificate's domain.
  enum : char { kWhite, kGray, kBlack };
  std::vector<char> color(g.names.size(), kWhite);
  for (std::size_t s = 0; s < g.names.size(); ++s) {
    if (f.choice[s] < 0 || color[s] != kWhite) continue;
    std::vector<std::pair<NodeId, bool>> work{{static_cast<NodeId>(s), false}};
    while (!work.empty()) {
      auto [v, expanded] = work.back();
      work.pop_back();
      if (expanded) {
        color[v] = kBlack;
        continue;
      }
      if (color[v] == kBlack) continue;
      if (color[v] == kGray) return false;
      color[v] = kGray;
      work.push_back({v, true});
      const auto& p = g.prods[f.choice[v]];
      if (!p.eps)
        for (const NodeId w : {p.b, p.c}) {
          if (f.choice[w] < 0) return false;  // witness must be closed
          if (color[w] == kGray) return false;
          if (color[w] == kWhite) work.push_back({w, false});
        }
    }
  }
  return true;
}

MaxStrahler max_strahler(const CnfGrammar& g) {
  const auto prod = productive_set(g);
  if (!prod[g.start]) throw Unproductive("start nonterminal has no derivation tree");
  // Restriction to productive symbols preserves the derivation-tree set.
  const int n = static_cast<int>(g.names.size());
  const int cap = n + 1;
  std::vector<int> st(g.names.size(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.prods) {
      if (p.eps || !prod[p.lhs] || !prod[p.b] || !prod[p.c]) continue;
      const int v = std::min(cap, s_op(st[p.b], st[p.c]));
      if (v > st[p.lhs]) {
        st[p.lhs] = v;
        changed = true;
      }
    }
  }
  if (st[g.start] > n) return {true, 0};
  return {false, st[g.start]};
}

std::vector<bool> self_doubling(const CnfGrammar& g) {
  const auto nullable = productive_set(g);  // all terminal words are empty
  const std::size_t n = g.names.size();
  // reach1[x]: symbols Y with X =>* alpha Y beta, alpha and beta nullable.
  std::vector<std::vector<bool>> reach1(n, std::vector<bool>(n, false));
  for (std::size_t v = 0; v < n; ++v) reach1[v][v] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < n; ++v)
      for (const auto& p : g.prods) {
        if (p.eps || !reach1[v][p.lhs]) continue;
        if (nullable[p.c] && !reach1[v][p.b]) reach1[v][p.b] = changed = true;
        if (nullable[p.b] && !reach1[v][p.c]) reach1[v][p.c] = changed = true;
      }
  }
  std::vector<bool> result(n, false);
  for (std::size_t a = 0; a < n; ++a)
    for (const auto& p : g.prods) {
      if (p.eps || !reach1[a][p.lhs]) continue;
      if (reach1[p.b][a] && reach1[p.c][a]) {
        result[a] = true;
        break;
      }
    }
  return result;
}

namespace {

using Mask = std::uint64_t;

struct AcyclicSearch {
  const CnfGrammar& g;
  std::vector<std::vector<int>> prods_of;  // production indices per lhs
  std::vector<Mask> reach;                 // reachable nonterminals per symbol
  // Key: (used-set masked to reach[A], A, threshold). -1 in memo_max = no tree.
  std::map<std::tuple<Mask, NodeId, int>, int> memo_max;
  std::map<std::tuple<Mask, NodeId, int>, bool> memo_ge;

  explicit AcyclicSearch(const CnfGrammar& grammar) : g(grammar) {
    const std::size_t n = g.names.size();
    if (n > 64) throw LimitExceeded("acyclic search supports at most 64 nonterminals");
    prods_of.resize(n);
    for (std::size_t i = 0; i < g.prods.size(); ++i)
      prods_of[g.prods[i].lhs].push_back(static_cast<int>(i));
    reach.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) reach[v] = Mask{1} << v;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& p : g.prods) {
        if (p.eps) continue;
        const Mask want = reach[p.lhs] | reach[p.b] | reach[p.c];
        if (want != reach[p.lhs]) {
          reach[p.lhs] = want;
          changed = true;
        }
      }
    }
  }

  // The subproblem only depends on the used-set inside A's reach.
  std::tuple<Mask, NodeId, int> key(NodeId a, Mask used, int extra) const {
    return {used & reach[a], a, extra};
  }

  int max_st(NodeId a, Mask used) {
    const auto k = key(a, used, 0);
    if (auto it = memo_max.find(k); it != memo_max.end()) return it->second;
    int best = -1;
    for (const int pi : prods_of[a]) {
      const auto& p = g.prods[pi];
      if (p.eps) {
        best = std::max(best, 0);
        continue;
      }
      if (used & (Mask{1} << p.b)) continue;
      if (used & (Mask{1} << p.c)) continue;
      // Acyclicity constrains root-to-leaf paths only, so the two branches are
      // independent and s_op monotonicity lets each be maximized separately.
      const int l = max_st(p.b, used | (Mask{1} << p.b));
      if (l < 0) continue;
      const int r = max_st(p.c, used | (Mask{1} << p.c));
      if (r < 0) continue;
      best = std::max(best, s_op(l, r));
    }
    memo_max[k] = best;
    return best;
  }

  // The (A, U, i) procedure: case 1/2 at i = 0, the three alternatives at i > 0.
  bool at_least(NodeId a, Mask used, int i) {
    const auto k = key(a, used, i);
    if (auto it = memo_ge.find(k); it != memo_ge.end()) return it->second;
    bool ok = false;
    if (i == 0) {
      for (const int pi : prods_of[a])
        if (g.prods[pi].eps) {
          ok = true;
          break;
        }
    }
    for (const int pi : prods_of[a]) {
      if (ok) break;
      const auto& p = g.prods[pi];
      if (p.eps) continue;
      if (used & (Mask{1} << p.b)) continue;
      if (used & (Mask{1} << p.c)) continue;
      const Mask ub = used | (Mask{1} << p.b);
      const Mask uc = used | (Mask{1} << p.c);
      if (i == 0) {
        ok = at_least(p.b, ub, 0) && at_least(p.c, uc, 0);
      } else {
        ok = (at_least(p.b, ub, i) && at_least(p.c, uc, 0)) ||
             (at_least(p.c, uc, i) && at_least(p.b, ub, 0)) ||
             (at_least(p.b, ub, i - 1) && at_least(p.c, uc, i - 1));
      }
    }
    memo_ge[k] = ok;
    return ok;
  }
};

}  // namespace

std::optional<int> acyclic_max_strahler(const CnfGrammar& g) {
  AcyclicSearch search(g);
  const int r = search.max_st(g.start, Mask{1} << g.start);
  if (r < 0) return std::nullopt;
  return r;
}

bool acyclic_at_least(const CnfGrammar& g, int k) {
  // st >= 0 just asks for some acyclic derivation tree.
  if (k <= 0) return acyclic_max_strahler(g).has_value();
  AcyclicSearch search(g);
  return search.at_least(g.start, Mask{1} << g.start, k);
}

BinaryTree DerivationTree::shape() const {
  BinaryTree t;
  t.nodes.resize(nodes.size());
  for (std::size_t v = 0; v < nodes.size(); ++v)
    if (nodes[v].left >= 0) t.nodes[v] = {nodes[v].left, nodes[v].right};
  t.root = root;
  return t;
}

namespace {

struct Enumerator {
  const CnfGrammar& g;
  std::vector<std::vector<int>> prods_of;
  std::size_t max_count;

  std::vector<DerivationTree> expand(NodeId a, Mask used) {
    std::vector<DerivationTree> result;
    for (const int pi : prods_of[a]) {
      const auto& p = g.prods[pi];
      if (p.eps) {
        DerivationTree t;
        t.nodes.push_back({a, -1, -1});
        t.root = 0;
        result.push_back(std::move(t));
        continue;
      }
      if (used & (Mask{1} << p.b)) continue;
      if (used & (Mask{1} << p.c)) continue;
      const auto lefts = expand(p.b, used | (Mask{1} << p.b));
      const auto rights = expand(p.c, used | (Mask{1} << p.c));
      for (const auto& lt : lefts)
        for (const auto& rt : rights) {
          DerivationTree t;
          t.nodes.push_back({a, -1, -1});
          t.root = 0;
          const int loff = static_cast<int>(t.nodes.size());
          for (const auto& n : lt.nodes)
            t.nodes.push_back({n.nonterminal, n.left < 0 ? -1 : n.left + loff,
                               n.right < 0 ? -1 : n.right + loff});
          const int roff = static_cast<int>(t.nodes.size());
          for (const auto& n : rt.nodes)
            t.nodes.push_back({n.nonterminal, n.left < 0 ? -1 : n.left + roff,
                               n.right < 0 ? -1 : n.right + roff});
          t.nodes[0].left = lt.root + loff;
          t.nodes[0].right = rt.root + roff;
          if (result.size() >= max_count)
            throw LimitExceeded("more than " + std::to_string(max_count) +
                                " acyclic derivation trees");
          result.push_back(std::move(t));
        }
    }
    if (result.size() > max_count)
      throw LimitExceeded("more than " + std::to_string(max_count) +
                          " acyclic derivation trees");
    return result;
  }
};

}  // namespace

std::vector<DerivationTree> enumerate_acyclic_trees(const CnfGrammar& g,
                                                    std::size_t max_count) {
  if (g.names.size() > 64)
    throw LimitExceeded("acyclic enumeration supports at most 64 nonterminals");
  Enumerator e{g, {}, max_count};
  e.prods_of.resize(g.names.size());
  for (std::size_t i = 0; i < g.prods.size(); ++i)
    e.prods_of[g.prods[i].lhs].push_back(static_cast<int>(i));
  return e.expand(g.start, Mask{1} << g.start);
}

std::optional<int> brute_force_max_strahler(const CnfGrammar& g, int depth_cap) {
  if (depth_cap < 0 || g.names.size() > 4096)
    throw LimitExceeded("brute force oracle is for small grammars only");
  // best[d][A]: max st over derivation trees for A of production depth <= d;
  // -1 when none exists. s_op monotonicity makes componentwise maxima exact.
  const std::size_t n = g.names.size();
  std::vector<int> prev(n, -1), cur(n, -1);
  for (int d = 1; d <= depth_cap; ++d) {
    for (std::size_t v = 0; v < n; ++v) cur[v] = -1;
    for (const auto& p : g.prods) {
      if (p.eps)
        cur[p.lhs] = std::max(cur[p.lhs], 0);
      else if (prev[p.b] >= 0 && prev[p.c] >= 0)
        cur[p.lhs] = std::max(cur[p.lhs], s_op(prev[p.b], prev[p.c]));
    }
    std::swap(prev, cur);
  }
  if (prev[g.start] < 0) return std::nullopt;
  return prev[g.start];
}

}  // namespace strahler
