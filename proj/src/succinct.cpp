#include "strahler/succinct.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>
#include <unordered_map>

#include "strahler/errors.hpp"

namespace strahler {

namespace {

constexpr std::int64_t kSaturated = std::int64_t{1} << 62;

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  if (a >= kSaturated - b) return kSaturated;
  return a + b;
}

struct Slot {
  NodeId parent;
  bool right;
};

void place(BinaryTree& t, NodeId id, Slot slot) {
  if (slot.parent == kNoNode) return;
  if (slot.right)
    t.nodes[slot.parent].right = id;
  else
    t.nodes[slot.parent].left = id;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dag

namespace {

// Topological order (children before parents) over the reachable part.
// Throws InputError on a reachable cycle.
std::vector<NodeId> dag_topo(const Dag& d) {
  enum : char { kWhite, kGray, kBlack };
  std::vector<char> color(d.nodes.size(), kWhite);
  std::vector<NodeId> order;
  std::vector<std::pair<NodeId, bool>> work{{d.root, false}};
  while (!work.empty()) {
    auto [v, expanded] = work.back();
    work.pop_back();
    if (expanded) {
      color[v] = kBlack;
      order.push_back(v);
      continue;
    }
    if (color[v] == kBlack) continue;
    if (color[v] == kGray) throw InputError("cycle through node '" + d.names[v] + "'");
    color[v] = kGray;
    work.push_back({v, true});
    for (const NodeId k : d.nodes[v].kids)
      if (color[k] == kWhite)
        work.push_back({k, false});
      else if (color[k] == kGray)
        throw InputError("cycle through node '" + d.names[k] + "'");
  }
  return order;
}

}  // namespace

Dag parse_dag_file(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool have_root = false;
  std::string root_name;
  std::map<std::string, NodeId> index;
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> kid_names;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok[0] == '#') continue;
    if (!have_root) {
      if (tok != "root") throw InputError("line 1 must be 'root <id>'");
      if (!(ls >> root_name)) throw InputError("missing root id");
      have_root = true;
      continue;
    }
    std::string arrow, a, b;
    if (!(ls >> arrow) || arrow != "->")
      throw InputError("line " + std::to_string(lineno) + ": expected '<id> -> ...'");
    if (!(ls >> a)) throw InputError("line " + std::to_string(lineno) + ": missing children");
    if (index.count(tok)) throw InputError("duplicate node record for '" + tok + "'");
    index[tok] = static_cast<NodeId>(names.size());
    names.push_back(tok);
    if (a == ".") {
      kid_names.push_back({});
    } else {
      if (!(ls >> b))
        throw InputError("line " + std::to_string(lineno) + ": expected two children");
      kid_names.push_back({a, b});
    }
  }
  if (!have_root) throw InputError("empty dag input");
  auto root_it = index.find(root_name);
  if (root_it == index.end()) throw InputError("root '" + root_name + "' has no node record");

  Dag raw;
  raw.names = names;
  raw.root = root_it->second;
  for (std::size_t v = 0; v < names.size(); ++v) {
    Dag::Node n;
    for (const auto& kn : kid_names[v]) {
      auto it = index.find(kn);
      if (it == index.end()) throw InputError("child '" + kn + "' has no node record");
      n.kids.push_back(it->second);
    }
    raw.nodes.push_back(std::move(n));
  }

  // Normalization: keep the reachable part only, in first-visit order.
  const auto order = dag_topo(raw);
  std::vector<NodeId> remap(raw.nodes.size(), kNoNode);
  Dag d;
  // Preorder-stable remap: iterate original ids, keep reachable.
  std::vector<char> reachable(raw.nodes.size(), 0);
  for (const NodeId v : order) reachable[v] = 1;
  for (NodeId v = 0; v < static_cast<NodeId>(raw.nodes.size()); ++v) {
    if (!reachable[v]) continue;
    remap[v] = static_cast<NodeId>(d.nodes.size());
    d.nodes.push_back(raw.nodes[v]);
    d.names.push_back(raw.names[v]);
  }
  for (auto& n : d.nodes)
    for (auto& k : n.kids) k = remap[k];
  d.root = remap[raw.root];
  return d;
}

std::string print_dag_file(const Dag& d) {
  std::ostringstream out;
  out << "root " << d.names[d.root] << "\n";
  for (std::size_t v = 0; v < d.nodes.size(); ++v) {
    out << d.names[v] << " -> ";
    if (d.nodes[v].is_leaf())
      out << ".";
    else
      out << d.names[d.nodes[v].kids[0]] << " " << d.names[d.nodes[v].kids[1]];
    out << "\n";
  }
  return out.str();
}

Dag dag_from_tree(const BinaryTree& t) {
  Dag d;
  d.nodes.resize(t.nodes.size());
  d.names.resize(t.nodes.size());
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    d.names[v] = "n" + std::to_string(v);
    if (!t.nodes[v].is_leaf()) d.nodes[v].kids = {t.nodes[v].left, t.nodes[v].right};
  }
  d.root = t.root;
  return d;
}

std::int64_t dag_unfold_size(const Dag& d) {
  std::vector<std::int64_t> cnt(d.nodes.size(), 0);
  for (const NodeId v : dag_topo(d)) {
    std::int64_t c = 1;
    for (const NodeId k : d.nodes[v].kids) c = sat_add(c, cnt[k]);
    cnt[v] = c;
  }
  return cnt[d.root];
}

BinaryTree unfold(const Dag& d, std::int64_t node_budget) {
  const std::int64_t total = dag_unfold_size(d);
  if (total > node_budget)
    throw BudgetExceeded("unfolding has " +
                         (total >= kSaturated ? std::string(">= 2^62")
                                              : std::to_string(total)) +
                         " nodes, budget is " + std::to_string(node_budget));
  BinaryTree t;
  t.nodes.reserve(static_cast<std::size_t>(total));
  std::vector<std::pair<NodeId, Slot>> work{{d.root, Slot{kNoNode, false}}};
  while (!work.empty()) {
    auto [v, slot] = work.back();
    work.pop_back();
    const NodeId id = static_cast<NodeId>(t.nodes.size());
    t.nodes.push_back({});
    place(t, id, slot);
    if (!d.nodes[v].is_leaf()) {
      work.push_back({d.nodes[v].kids[1], Slot{id, true}});
      work.push_back({d.nodes[v].kids[0], Slot{id, false}});
    }
  }
  t.root = 0;
  return t;
}

int dag_strahler(const Dag& d) {
  // st of the unfolding at a node depends only on the node.
  std::vector<int> st(d.nodes.size(), 0);
  for (const NodeId v : dag_topo(d))
    if (!d.nodes[v].is_leaf())
      st[v] = s_op(st[d.nodes[v].kids[0]], st[d.nodes[v].kids[1]]);
  return st[d.root];
}

// ---------------------------------------------------------------------------
// Statement search

namespace {

struct SearchCtx {
  const Dag& d;
  StatementSearchResult& out;
  std::vector<Statement> stack;
  bool keep_snapshots;

  bool trivially_true(const Statement& s) const {
    if (s.kind == Statement::Kind::AtLeast && s.m <= 0) return true;
    const bool leaf = d.nodes[s.node].is_leaf();
    if (s.kind == Statement::Kind::Equals && s.m == 0 && leaf) return true;
    if (s.kind == Statement::Kind::AtLeast && s.m == 1 && !leaf) return true;
    return false;
  }

  bool trivially_wrong(const Statement& s) const {
    const bool leaf = d.nodes[s.node].is_leaf();
    if (leaf && s.m >= 1) return true;
    if (s.kind == Statement::Kind::Equals && s.m == 0 && !leaf) return true;
    return false;
  }

  void snapshot(const Statement& active) {
    if (!keep_snapshots) return;
    auto snap = stack;
    snap.push_back(active);
    out.snapshots.push_back(std::move(snap));
  }

  // num values must not increase from stack bottom to active, with every
  // integer appearing at most twice.
  void check_invariant(const Statement& active) {
    int prev = -1;
    int run = 0;
    auto feed = [&](int m) {
      if (prev >= 0) {
        if (m > prev) out.invariant_violated = true;
        run = (m == prev) ? run + 1 : 1;
        if (run > 2) out.invariant_violated = true;
      } else {
        run = 1;
      }
      prev = m;
    };
    for (const auto& s : stack) feed(s.m);
    feed(active.m);
  }

  void explore(Statement active) {
    snapshot(active);
    check_invariant(active);
    if (trivially_wrong(active)) return;
    if (trivially_true(active)) {
      if (stack.empty()) {
        out.accepted = true;
        ++out.accepting_paths;
        return;
      }
      const Statement popped = stack.back();
      stack.pop_back();
      explore(popped);
      stack.push_back(popped);
      return;
    }
    const NodeId v1 = d.nodes[active.node].kids[0];
    const NodeId v2 = d.nodes[active.node].kids[1];
    const int m = active.m;
    using K = Statement::Kind;
    auto branch = [&](Statement next_active, Statement pushed) {
      stack.push_back(pushed);
      explore(next_active);
      stack.pop_back();
    };
    if (active.kind == K::AtLeast) {
      // v has degree two and m >= 2 here.
      branch({K::AtLeast, v1, m - 1}, {K::AtLeast, v2, m - 1});
      for (int i = 0; i <= m - 2; ++i) branch({K::Equals, v2, i}, {K::AtLeast, v1, m});
      for (int i = 0; i <= m - 2; ++i) branch({K::Equals, v1, i}, {K::AtLeast, v2, m});
    } else {
      // v has degree two and m >= 1 here.
      branch({K::Equals, v1, m - 1}, {K::Equals, v2, m - 1});
      for (int i = 0; i <= m - 1; ++i) branch({K::Equals, v2, i}, {K::Equals, v1, m});
      for (int i = 0; i <= m - 1; ++i) branch({K::Equals, v1, i}, {K::Equals, v2, m});
    }
  }
};

}  // namespace

StatementSearchResult dag_statement_search(const Dag& d, int k, bool keep_snapshots) {
  StatementSearchResult res;
  SearchCtx ctx{d, res, {}, keep_snapshots};
  ctx.explore({Statement::Kind::AtLeast, d.root, k});
  return res;
}

// ---------------------------------------------------------------------------
// Tslp

namespace {

// Variables referenced by a rule, in rule order.
std::vector<NodeId> rule_refs(const Tslp::Rule& r) {
  switch (r.kind) {
    case Tslp::RuleKind::Leaf:
      return {};
    case Tslp::RuleKind::CtxLeft:
    case Tslp::RuleKind::CtxRight:
      return {r.first};
    default:
      return {r.first, r.second};
  }
}

std::vector<NodeId> tslp_topo(const Tslp& g) {
  enum : char { kWhite, kGray, kBlack };
  std::vector<char> color(g.rules.size(), kWhite);
  std::vector<NodeId> order;
  std::vector<std::pair<NodeId, bool>> work{{g.start, false}};
  while (!work.empty()) {
    auto [v, expanded] = work.back();
    work.pop_back();
    if (expanded) {
      color[v] = kBlack;
      order.push_back(v);
      continue;
    }
    if (color[v] == kBlack) continue;
    if (color[v] == kGray)
      throw InputError("rule cycle through variable '" + g.names[v] + "'");
    color[v] = kGray;
    work.push_back({v, true});
    for (const NodeId k : rule_refs(g.rules[v]))
      if (color[k] == kWhite)
        work.push_back({k, false});
      else if (color[k] == kGray)
        throw InputError("rule cycle through variable '" + g.names[k] + "'");
  }
  return order;
}

}  // namespace

void validate(const Tslp& g) {
  const std::size_t n = g.rules.size();
  if (g.names.size() != n || g.is_context.size() != n)
    throw InputError("tslp arrays out of sync");
  if (n == 0) throw InputError("tslp has no rules");
  if (g.start < 0 || static_cast<std::size_t>(g.start) >= n)
    throw InputError("start variable out of range");
  if (g.is_context[g.start]) throw InputError("start variable must be a tree variable");
  using RK = Tslp::RuleKind;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& r = g.rules[v];
    for (const NodeId ref : rule_refs(r))
      if (ref < 0 || static_cast<std::size_t>(ref) >= n)
        throw InputError("rule of '" + g.names[v] + "' references an unknown variable");
    const bool ctx = g.is_context[v];
    auto expect = [&](bool cond, const char* what) {
      if (!cond) throw InputError("rule of '" + g.names[v] + "': " + what);
    };
    switch (r.kind) {
      case RK::Leaf:
        expect(!ctx, "a-rule on a context variable");
        break;
      case RK::Pair:
        expect(!ctx, "b(B,C)-rule on a context variable");
        expect(!g.is_context[r.first] && !g.is_context[r.second],
               "b(B,C) operands must be tree variables");
        break;
      case RK::Apply:
        expect(!ctx, "D(C)-rule on a context variable");
        expect(g.is_context[r.first], "D in D(C) must be a context variable");
        expect(!g.is_context[r.second], "C in D(C) must be a tree variable");
        break;
      case RK::CtxLeft:
      case RK::CtxRight:
        expect(ctx, "b(x,B)/b(B,x)-rule on a tree variable");
        expect(!g.is_context[r.first], "the subtree of b(x,B)/b(B,x) must be a tree variable");
        break;
      case RK::Compose:
        expect(ctx, "D(C(x))-rule on a tree variable");
        expect(g.is_context[r.first] && g.is_context[r.second],
               "both parts of D(C(x)) must be context variables");
        break;
    }
  }
  const auto order = tslp_topo(g);  // also rejects cycles
  if (order.size() != n)
    throw InputError("tslp has variables not reachable from the start variable");
}

Tslp tslp_from_dag(const Dag& d) {
  Tslp g;
  g.names.reserve(d.nodes.size());
  for (std::size_t v = 0; v < d.nodes.size(); ++v) {
    const std::string& n = d.names[v];
    // a/b/x are reserved tokens in variable position.
    g.names.push_back(n == "a" || n == "b" || n == "x" ? n + "_" : n);
    g.is_context.push_back(false);
    if (d.nodes[v].is_leaf())
      g.rules.push_back({Tslp::RuleKind::Leaf, kNoNode, kNoNode});
    else
      g.rules.push_back({Tslp::RuleKind::Pair, d.nodes[v].kids[0], d.nodes[v].kids[1]});
  }
  g.start = d.root;
  validate(g);
  return g;
}

Tslp parse_tslp_file(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool have_start = false;
  std::string start_name;

  struct RawRule {
    std::string lhs;
    std::vector<std::string> toks;  // rhs tokens: names and punctuation
    std::size_t lineno;
  };
  std::vector<RawRule> raw;

  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok[0] == '#') continue;
    if (!have_start) {
      if (tok != "start") throw InputError("line 1 must be 'start <A>'");
      if (!(ls >> start_name)) throw InputError("missing start variable");
      have_start = true;
      continue;
    }
    std::string eq;
    if (!(ls >> eq) || eq != "=")
      throw InputError("line " + std::to_string(lineno) + ": expected '<A> = <rhs>'");
    RawRule rr;
    rr.lhs = tok;
    rr.lineno = lineno;
    std::string rest;
    std::getline(ls, rest);
    std::string cur;
    for (const char c : rest) {
      if (c == '(' || c == ')' || c == ',') {
        if (!cur.empty()) rr.toks.push_back(std::exchange(cur, {}));
        rr.toks.push_back(std::string(1, c));
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) rr.toks.push_back(std::exchange(cur, {}));
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) rr.toks.push_back(cur);
    raw.push_back(std::move(rr));
  }
  if (!have_start) throw InputError("empty tslp input");

  Tslp g;
  std::map<std::string, NodeId> index;
  auto var = [&](const std::string& name, std::size_t ln) {
    if (name == "a" || name == "b" || name == "x")
      throw InputError("line " + std::to_string(ln) + ": '" + name +
                       "' is reserved and cannot name a variable");
    auto [it, fresh] = index.try_emplace(name, static_cast<NodeId>(g.names.size()));
    if (fresh) {
      g.names.push_back(name);
      g.rules.push_back({});
      g.is_context.push_back(false);
    }
    return it->second;
  };

  std::vector<char> defined;
  for (const auto& rr : raw) {
    const NodeId lhs = var(rr.lhs, rr.lineno);
    if (static_cast<std::size_t>(lhs) >= defined.size()) defined.resize(lhs + 1, 0);
    if (defined[lhs])
      throw InputError("line " + std::to_string(rr.lineno) + ": duplicate rule for '" +
                       rr.lhs + "'");
    defined[lhs] = 1;

    const auto& t = rr.toks;
    auto bad = [&]() -> InputError {
      return InputError("line " + std::to_string(rr.lineno) + ": unrecognized rule shape");
    };
    using RK = Tslp::RuleKind;
    Tslp::Rule rule;
    bool is_ctx = false;
    if (t.size() == 1 && t[0] == "a") {
      rule.kind = RK::Leaf;
    } else if (t.size() == 6 && t[0] == "b" && t[1] == "(" && t[3] == "," && t[5] == ")") {
      if (t[2] == "x" && t[4] == "x") throw bad();
      if (t[2] == "x") {
        rule.kind = RK::CtxLeft;
        rule.first = var(t[4], rr.lineno);
        is_ctx = true;
      } else if (t[4] == "x") {
        rule.kind = RK::CtxRight;
        rule.first = var(t[2], rr.lineno);
        is_ctx = true;
      } else {
        rule.kind = RK::Pair;
        rule.first = var(t[2], rr.lineno);
        rule.second = var(t[4], rr.lineno);
      }
    } else if (t.size() == 4 && t[1] == "(" && t[3] == ")" && t[0] != "b") {
      rule.kind = RK::Apply;
      rule.first = var(t[0], rr.lineno);
      rule.second = var(t[2], rr.lineno);
    } else if (t.size() == 7 && t[1] == "(" && t[3] == "(" && t[4] == "x" && t[5] == ")" &&
               t[6] == ")" && t[0] != "b" && t[2] != "b") {
      rule.kind = RK::Compose;
      rule.first = var(t[0], rr.lineno);
      rule.second = var(t[2], rr.lineno);
      is_ctx = true;
    } else {
      throw bad();
    }
    g.rules[lhs] = rule;
    g.is_context[lhs] = is_ctx;
  }

  auto sit = index.find(start_name);
  if (sit == index.end()) throw InputError("start variable '" + start_name + "' has no rule");
  g.start = sit->second;

  defined.resize(g.names.size(), 0);
  for (std::size_t v = 0; v < g.names.size(); ++v)
    if (!defined[v]) throw InputError("variable '" + g.names[v] + "' has no rule");

  // Class consistency of references is only fixed once all rules are known.
  validate(g);
  return g;
}

std::string print_tslp_file(const Tslp& g) {
  std::ostringstream out;
  out << "start " << g.names[g.start] << "\n";
  using RK = Tslp::RuleKind;
  for (std::size_t v = 0; v < g.rules.size(); ++v) {
    const auto& r = g.rules[v];
    out << g.names[v] << " = ";
    switch (r.kind) {
      case RK::Leaf:
        out << "a";
        break;
      case RK::Pair:
        out << "b(" << g.names[r.first] << "," << g.names[r.second] << ")";
        break;
      case RK::Apply:
        out << g.names[r.first] << "(" << g.names[r.second] << ")";
        break;
      case RK::CtxLeft:
        out << "b(x," << g.names[r.first] << ")";
        break;
      case RK::CtxRight:
        out << "b(" << g.names[r.first] << ",x)";
        break;
      case RK::Compose:
        out << g.names[r.first] << "(" << g.names[r.second] << "(x))";
        break;
    }
    out << "\n";
  }
  return out.str();
}

int tslp_depth(const Tslp& g) {
  std::vector<int> height(g.rules.size(), 0);
  int depth = 0;
  for (const NodeId v : tslp_topo(g)) {
    int h = 0;
    for (const NodeId k : rule_refs(g.rules[v])) h = std::max(h, height[k] + 1);
    height[v] = h;
    depth = std::max(depth, h);
  }
  return depth;
}

std::int64_t tslp_size(const Tslp& g) {
  std::int64_t size = 0;
  for (const auto& r : g.rules) size += 1 + static_cast<std::int64_t>(rule_refs(r).size());
  return size;
}

namespace {

struct TslpCounts {
  std::vector<std::int64_t> nodes;   // context variables: hole excluded
  std::vector<std::int64_t> leaves;  // context variables: hole excluded
};

TslpCounts tslp_counts(const Tslp& g) {
  TslpCounts c;
  c.nodes.assign(g.rules.size(), 0);
  c.leaves.assign(g.rules.size(), 0);
  using RK = Tslp::RuleKind;
  for (const NodeId v : tslp_topo(g)) {
    const auto& r = g.rules[v];
    switch (r.kind) {
      case RK::Leaf:
        c.nodes[v] = 1;
        c.leaves[v] = 1;
        break;
      case RK::Pair:
        c.nodes[v] = sat_add(1, sat_add(c.nodes[r.first], c.nodes[r.second]));
        c.leaves[v] = sat_add(c.leaves[r.first], c.leaves[r.second]);
        break;
      case RK::Apply:
      case RK::Compose:
        c.nodes[v] = sat_add(c.nodes[r.first], c.nodes[r.second]);
        c.leaves[v] = sat_add(c.leaves[r.first], c.leaves[r.second]);
        break;
      case RK::CtxLeft:
      case RK::CtxRight:
        c.nodes[v] = sat_add(1, c.nodes[r.first]);
        c.leaves[v] = c.leaves[r.first];
        break;
    }
  }
  return c;
}

}  // namespace

std::int64_t tslp_val_size(const Tslp& g) { return tslp_counts(g).nodes[g.start]; }
std::int64_t tslp_leaf_count(const Tslp& g) { return tslp_counts(g).leaves[g.start]; }

BinaryTree tslp_val(const Tslp& g, std::int64_t node_budget) {
  const std::int64_t total = tslp_val_size(g);
  if (total > node_budget)
    throw BudgetExceeded("val has " +
                         (total >= kSaturated ? std::string(">= 2^62")
                                              : std::to_string(total)) +
                         " nodes, budget is " + std::to_string(node_budget));

  // Continuations: what to expand into a slot. A context expansion carries the
  // continuation for its hole.
  struct What {
    bool is_ctx;
    NodeId var;
    int hole;  // continuation index when is_ctx
  };
  std::vector<What> whats;
  struct Task {
    int what;
    Slot slot;
  };
  BinaryTree t;
  t.nodes.reserve(static_cast<std::size_t>(total));
  whats.push_back({false, g.start, -1});
  std::vector<Task> work{{0, Slot{kNoNode, false}}};
  using RK = Tslp::RuleKind;
  while (!work.empty()) {
    const Task task = work.back();
    work.pop_back();
    const What w = whats[task.what];
    const auto& r = g.rules[w.var];
    if (!w.is_ctx) {
      switch (r.kind) {
        case RK::Leaf: {
          const NodeId id = static_cast<NodeId>(t.nodes.size());
          t.nodes.push_back({});
          place(t, id, task.slot);
          break;
        }
        case RK::Pair: {
          const NodeId id = static_cast<NodeId>(t.nodes.size());
          t.nodes.push_back({});
          place(t, id, task.slot);
          whats.push_back({false, r.first, -1});
          work.push_back({static_cast<int>(whats.size() - 1), Slot{id, false}});
          whats.push_back({false, r.second, -1});
          work.push_back({static_cast<int>(whats.size() - 1), Slot{id, true}});
          break;
        }
        case RK::Apply: {
          whats.push_back({false, r.second, -1});
          const int inner = static_cast<int>(whats.size() - 1);
          whats.push_back({true, r.first, inner});
          work.push_back({static_cast<int>(whats.size() - 1), task.slot});
          break;
        }
        default:
          assert(false);
      }
    } else {
      switch (r.kind) {
        case RK::CtxLeft:
        case RK::CtxRight: {
          const NodeId id = static_cast<NodeId>(t.nodes.size());
          t.nodes.push_back({});
          place(t, id, task.slot);
          const bool hole_left = r.kind == RK::CtxLeft;
          work.push_back({w.hole, Slot{id, !hole_left}});
          whats.push_back({false, r.first, -1});
          work.push_back({static_cast<int>(whats.size() - 1), Slot{id, hole_left}});
          break;
        }
        case RK::Compose: {
          whats.push_back({true, r.second, w.hole});
          const int inner = static_cast<int>(whats.size() - 1);
          whats.push_back({true, r.first, inner});
          work.push_back({static_cast<int>(whats.size() - 1), task.slot});
          break;
        }
        default:
          assert(false);
      }
    }
  }
  t.root = 0;
  return t;
}

TslpTables tslp_analyze(const Tslp& g) {
  TslpTables tb;
  tb.st.assign(g.rules.size(), 0);
  tb.lh.assign(g.rules.size(), LhFunction{0, 0});
  using RK = Tslp::RuleKind;
  for (const NodeId v : tslp_topo(g)) {
    const auto& r = g.rules[v];
    switch (r.kind) {
      case RK::Leaf:
        tb.st[v] = 0;
        break;
      case RK::Pair:
        tb.st[v] = s_op(tb.st[r.first], tb.st[r.second]);
        break;
      case RK::Apply:
        tb.st[v] = apply_lh(tb.lh[r.first], tb.st[r.second]);
        break;
      case RK::CtxLeft:
      case RK::CtxRight:
        tb.lh[v] = lh_from_sibling(tb.st[r.first]);
        break;
      case RK::Compose:
        tb.lh[v] = compose_lh(tb.lh[r.first], tb.lh[r.second]);
        break;
    }
  }
  return tb;
}

int tslp_strahler(const Tslp& g) { return tslp_analyze(g).st[g.start]; }

namespace {

// Threshold decision through the caterpillar structure of Apply rules, with
// every value capped at k+1: context variables act pointwise as value
// transformers, walked spine-step by spine-step. One memo entry per
// (context variable, entering value) pair keeps this polynomial. This is the
// corrected form of the two-case path criterion, which is unsound: a
// caterpillar with hanging values 1,0,0 folds to 2 although no two hanging
// positions reach 1 (the lower s(0,0) join synthesizes the second 1).
struct PathDecider {
  const Tslp& g;
  int cap;  // values above the queried threshold collapse to cap = k+1
  std::vector<int> st_memo;                 // -1 until computed
  std::map<std::pair<NodeId, int>, int> ctx_memo;

  int capped(int v) const { return v > cap ? cap : v; }

  int st(NodeId a) {
    if (st_memo[a] >= 0) return st_memo[a];
    const auto& r = g.rules[a];
    using RK = Tslp::RuleKind;
    int result = 0;
    switch (r.kind) {
      case RK::Leaf:
        result = 0;
        break;
      case RK::Pair:
        result = capped(s_op(st(r.first), st(r.second)));
        break;
      case RK::Apply:
        result = ctxval(r.first, st(r.second));
        break;
      default:
        assert(false);
    }
    return st_memo[a] = result;
  }

  // Capped result of dropping a value of x into the hole of val(v).
  int ctxval(NodeId v, int x) {
    const auto key = std::make_pair(v, x);
    if (auto it = ctx_memo.find(key); it != ctx_memo.end()) return it->second;
    const auto& r = g.rules[v];
    using RK = Tslp::RuleKind;
    int result = 0;
    switch (r.kind) {
      case RK::CtxLeft:
      case RK::CtxRight:
        result = capped(s_op(st(r.first), x));
        break;
      case RK::Compose:
        result = ctxval(r.first, ctxval(r.second, x));
        break;
      default:
        assert(false);
    }
    ctx_memo[key] = result;
    return result;
  }
};

}  // namespace

bool tslp_at_least_via_paths(const Tslp& g, int k) {
  if (k <= 0) return true;
  PathDecider pd{g, k + 1, std::vector<int>(g.rules.size(), -1), {}};
  return pd.st(g.start) >= k;
}

// ---------------------------------------------------------------------------
// Balancing

namespace {

struct Balancer {
  const BinaryTree& t;
  std::vector<std::int64_t> size;
  Tslp g;
  NodeId leaf_var = kNoNode;

  NodeId add(Tslp::Rule r, bool ctx) {
    g.rules.push_back(r);
    g.is_context.push_back(ctx);
    g.names.emplace_back();
    return static_cast<NodeId>(g.rules.size() - 1);
  }

  NodeId shared_leaf() {
    if (leaf_var == kNoNode) leaf_var = add({Tslp::RuleKind::Leaf, kNoNode, kNoNode}, false);
    return leaf_var;
  }

  NodeId tree_var(NodeId v) {
    if (t.nodes[v].is_leaf()) return shared_leaf();
    // Heavy path from v down to a leaf; ties go left.
    std::vector<NodeId> spine;
    std::vector<std::int64_t> prefix{0};
    NodeId u = v;
    while (!t.nodes[u].is_leaf()) {
      spine.push_back(u);
      const NodeId l = t.nodes[u].left, r = t.nodes[u].right;
      const NodeId heavy = size[r] > size[l] ? r : l;
      const NodeId light = heavy == l ? r : l;
      prefix.push_back(prefix.back() + 1 + size[light]);
      u = heavy;
    }
    const NodeId ctx = ctx_seg(spine, prefix, 0, spine.size());
    return add({Tslp::RuleKind::Apply, ctx, shared_leaf()}, false);
  }

  // Context variable for spine nodes [i, j); the hole sits where spine[j]
  // (or the final heavy leaf) attaches.
  NodeId ctx_seg(const std::vector<NodeId>& spine, const std::vector<std::int64_t>& prefix,
                 std::size_t i, std::size_t j) {
    if (j - i == 1) {
      const NodeId u = spine[i];
      const NodeId l = t.nodes[u].left, r = t.nodes[u].right;
      const NodeId heavy = size[r] > size[l] ? r : l;
      const NodeId light = heavy == l ? r : l;
      const NodeId lv = tree_var(light);
      return add({heavy == l ? Tslp::RuleKind::CtxLeft : Tslp::RuleKind::CtxRight, lv,
                  kNoNode},
                 true);
    }
    // Weight-balanced split: first m where the left half reaches half weight.
    const std::int64_t total = prefix[j] - prefix[i];
    std::size_t m = i + 1;
    while (m + 1 < j && (prefix[m] - prefix[i]) * 2 < total) ++m;
    // Stepping back may balance better when one node overshoots.
    if (m > i + 1) {
      const std::int64_t over = (prefix[m] - prefix[i]) * 2 - total;
      const std::int64_t under = total - (prefix[m - 1] - prefix[i]) * 2;
      if (under < over) --m;
    }
    const NodeId top = ctx_seg(spine, prefix, i, m);
    const NodeId bottom = ctx_seg(spine, prefix, m, j);
    return add({Tslp::RuleKind::Compose, top, bottom}, true);
  }
};

}  // namespace

Tslp balance(const BinaryTree& t) {
  Balancer b{t, {}, {}, kNoNode};
  // Subtree sizes, iteratively.
  b.size.assign(t.nodes.size(), 1);
  std::vector<std::pair<NodeId, bool>> work{{t.root, false}};
  while (!work.empty()) {
    auto [v, expanded] = work.back();
    work.pop_back();
    if (t.nodes[v].is_leaf()) continue;
    if (!expanded) {
      work.push_back({v, true});
      work.push_back({t.nodes[v].left, false});
      work.push_back({t.nodes[v].right, false});
    } else {
      b.size[v] = 1 + b.size[t.nodes[v].left] + b.size[t.nodes[v].right];
    }
  }
  b.g.start = b.tree_var(t.root);
  for (std::size_t v = 0; v < b.g.names.size(); ++v)
    b.g.names[v] = static_cast<NodeId>(v) == b.g.start ? "S" : "N" + std::to_string(v);
  validate(b.g);
  return b.g;
}

}  // namespace strahler
