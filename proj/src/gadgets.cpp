#include "strahler/gadgets.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "strahler/context_algebra.hpp"
#include "strahler/errors.hpp"

namespace strahler {

// ---------------------------------------------------------------------------
// Boolean formulas

namespace {

std::vector<std::string> sexpr_tokens(const std::string& text) {
  std::vector<std::string> toks;
  std::string cur;
  for (const char c : text) {
    if (c == '(' || c == ')') {
      if (!cur.empty()) toks.push_back(std::exchange(cur, {}));
      toks.push_back(std::string(1, c));
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) toks.push_back(std::exchange(cur, {}));
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back(cur);
  return toks;
}

int parse_literal_var(const std::string& tok) {
  if (tok.size() < 2 || tok[0] != 'x') return 0;
  for (std::size_t i = 1; i < tok.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return 0;
  return std::stoi(tok.substr(1));
}

struct FormulaParser {
  const std::vector<std::string>& toks;
  std::size_t at = 0;
  bool allow_literals;

  std::string next() {
    if (at >= toks.size()) throw InputError("unexpected end of formula");
    return toks[at++];
  }

  int parse(BoolFormula& f) {
    const std::string tok = next();
    if (tok == "0") {
      f.nodes.push_back({BoolFormula::Kind::ConstFalse});
      return static_cast<int>(f.nodes.size() - 1);
    }
    if (tok == "1") {
      f.nodes.push_back({BoolFormula::Kind::ConstTrue});
      return static_cast<int>(f.nodes.size() - 1);
    }
    if (tok == "(") {
      const std::string op = next();
      if (op == "not") {
        if (!allow_literals) throw InputError("literals are not allowed here");
        const int var = parse_literal_var(next());
        if (var <= 0) throw InputError("'not' expects a variable x<i>");
        if (next() != ")") throw InputError("expected ')' after negated literal");
        f.nodes.push_back({BoolFormula::Kind::Lit, -1, -1, var, true});
        return static_cast<int>(f.nodes.size() - 1);
      }
      if (op != "and" && op != "or") throw InputError("unknown operator '" + op + "'");
      const int id = static_cast<int>(f.nodes.size());
      f.nodes.push_back({op == "and" ? BoolFormula::Kind::And : BoolFormula::Kind::Or});
      const int l = parse(f);
      const int r = parse(f);
      if (next() != ")") throw InputError("expected ')' after two operands");
      f.nodes[id].left = l;
      f.nodes[id].right = r;
      return id;
    }
    if (allow_literals) {
      const int var = parse_literal_var(tok);
      if (var > 0) {
        f.nodes.push_back({BoolFormula::Kind::Lit, -1, -1, var, false});
        return static_cast<int>(f.nodes.size() - 1);
      }
    }
    throw InputError("unexpected token '" + tok + "' in formula");
  }
};

}  // namespace

BoolFormula parse_formula(const std::string& text, bool allow_literals) {
  const auto toks = sexpr_tokens(text);
  FormulaParser p{toks, 0, allow_literals};
  BoolFormula f;
  f.root = p.parse(f);
  if (p.at != toks.size()) throw InputError("trailing tokens after formula");
  return f;
}

std::string print_formula(const BoolFormula& f) {
  std::ostringstream out;
  auto rec = [&](auto&& self, int v) -> void {
    const auto& n = f.nodes[v];
    switch (n.kind) {
      case BoolFormula::Kind::ConstTrue:
        out << "1";
        return;
      case BoolFormula::Kind::ConstFalse:
        out << "0";
        return;
      case BoolFormula::Kind::Lit:
        if (n.negated)
          out << "(not x" << n.var << ")";
        else
          out << "x" << n.var;
        return;
      default:
        out << "(" << (n.kind == BoolFormula::Kind::And ? "and" : "or") << " ";
        self(self, n.left);
        out << " ";
        self(self, n.right);
        out << ")";
    }
  };
  rec(rec, f.root);
  return out.str();
}

namespace {

bool is_internal(const BoolFormula::Node& n) {
  return n.kind == BoolFormula::Kind::And || n.kind == BoolFormula::Kind::Or;
}

int depth_of(const BoolFormula& f, int v) {
  const auto& n = f.nodes[v];
  if (!is_internal(n)) return 0;
  return 1 + std::max(depth_of(f, n.left), depth_of(f, n.right));
}

// min path length; uniform iff equal to depth at every node along the way
void path_range(const BoolFormula& f, int v, int& lo, int& hi) {
  const auto& n = f.nodes[v];
  if (!is_internal(n)) {
    lo = hi = 0;
    return;
  }
  int ll, lh, rl, rh;
  path_range(f, n.left, ll, lh);
  path_range(f, n.right, rl, rh);
  lo = 1 + std::min(ll, rl);
  hi = 1 + std::max(lh, rh);
}

}  // namespace

int formula_depth(const BoolFormula& f) { return depth_of(f, f.root); }

bool is_uniform_depth(const BoolFormula& f) {
  int lo, hi;
  path_range(f, f.root, lo, hi);
  return lo == hi;
}

namespace {

// Copies v into out, stretching every leaf to sit exactly `need` below.
int pad_rec(const BoolFormula& f, int v, int need, BoolFormula& out) {
  const auto& n = f.nodes[v];
  if (is_internal(n)) {
    const int id = static_cast<int>(out.nodes.size());
    out.nodes.push_back({n.kind});
    const int l = pad_rec(f, n.left, need - 1, out);
    const int r = pad_rec(f, n.right, need - 1, out);
    out.nodes[id].left = l;
    out.nodes[id].right = r;
    return id;
  }
  if (need == 0) {
    out.nodes.push_back(n);
    return static_cast<int>(out.nodes.size() - 1);
  }
  // z becomes (z or z), value unchanged.
  const int id = static_cast<int>(out.nodes.size());
  out.nodes.push_back({BoolFormula::Kind::Or});
  const int l = pad_rec(f, v, need - 1, out);
  const int r = pad_rec(f, v, need - 1, out);
  out.nodes[id].left = l;
  out.nodes[id].right = r;
  return id;
}

}  // namespace

BoolFormula pad_uniform(const BoolFormula& f) {
  BoolFormula out;
  out.root = pad_rec(f, f.root, formula_depth(f), out);
  return out;
}

bool eval_formula(const BoolFormula& f, const std::vector<bool>& assignment) {
  auto rec = [&](auto&& self, int v) -> bool {
    const auto& n = f.nodes[v];
    switch (n.kind) {
      case BoolFormula::Kind::ConstTrue:
        return true;
      case BoolFormula::Kind::ConstFalse:
        return false;
      case BoolFormula::Kind::Lit: {
        if (n.var <= 0 || static_cast<std::size_t>(n.var) > assignment.size())
          throw InputError("unbound variable x" + std::to_string(n.var));
        const bool b = assignment[n.var - 1];
        return n.negated ? !b : b;
      }
      case BoolFormula::Kind::And:
        return self(self, n.left) && self(self, n.right);
      default:
        return self(self, n.left) || self(self, n.right);
    }
  };
  return rec(rec, f.root);
}

// ---------------------------------------------------------------------------
// Formula and circuit gadgets

namespace {

// Shared pieces of gadget DAGs: a zero leaf and a one node b(zero, zero).
struct DagBuilder {
  Dag d;
  NodeId zero = kNoNode, one = kNoNode;

  NodeId add(std::vector<NodeId> kids) {
    d.nodes.push_back({std::move(kids)});
    d.names.push_back("g" + std::to_string(d.nodes.size() - 1));
    return static_cast<NodeId>(d.nodes.size() - 1);
  }
  NodeId leaf_zero() { return zero == kNoNode ? zero = add({}) : zero; }
  NodeId node_one() {
    if (one == kNoNode) {
      const NodeId z = leaf_zero();
      one = add({z, z});
    }
    return one;
  }
  NodeId f_and(NodeId x, NodeId y) { return add({add({x, x}), add({y, y})}); }
  NodeId f_or(NodeId x, NodeId y) {
    return add({add({add({x, x}), y}), add({x, add({y, y})})});
  }
};

BinaryTree tree_and(const BinaryTree& x, const BinaryTree& y) {
  return BinaryTree::branch(BinaryTree::branch(x, x), BinaryTree::branch(y, y));
}

BinaryTree tree_or(const BinaryTree& x, const BinaryTree& y) {
  return BinaryTree::branch(BinaryTree::branch(BinaryTree::branch(x, x), y),
                            BinaryTree::branch(x, BinaryTree::branch(y, y)));
}

BinaryTree tree_one() { return BinaryTree::branch(BinaryTree::leaf(), BinaryTree::leaf()); }

}  // namespace

FormulaGadget formula_to_tree(const BoolFormula& f) {
  if (!is_uniform_depth(f))
    throw InputError("formula gadget needs a uniform-depth formula; pad it first");
  FormulaGadget out;
  DagBuilder db;

  auto tree_rec = [&](auto&& self, int v) -> BinaryTree {
    const auto& n = f.nodes[v];
    switch (n.kind) {
      case BoolFormula::Kind::ConstTrue:
        return tree_one();
      case BoolFormula::Kind::ConstFalse:
        return BinaryTree::leaf();
      case BoolFormula::Kind::And:
        return tree_and(self(self, n.left), self(self, n.right));
      case BoolFormula::Kind::Or:
        return tree_or(self(self, n.left), self(self, n.right));
      default:
        throw InputError("formula gadget takes constant leaves only");
    }
  };
  auto dag_rec = [&](auto&& self, int v) -> NodeId {
    const auto& n = f.nodes[v];
    switch (n.kind) {
      case BoolFormula::Kind::ConstTrue:
        return db.node_one();
      case BoolFormula::Kind::ConstFalse:
        return db.leaf_zero();
      case BoolFormula::Kind::And:
        return db.f_and(self(self, n.left), self(self, n.right));
      default:
        return db.f_or(self(self, n.left), self(self, n.right));
    }
  };

  out.tree = tree_rec(tree_rec, f.root);
  db.d.root = dag_rec(dag_rec, f.root);
  out.dag = std::move(db.d);
  const int d = formula_depth(f);
  out.predicted = eval_formula(f) ? 2 * d + 1 : 2 * d;
  return out;
}

LayeredCircuit parse_circuit_file(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool have_output = false;
  std::string output_name;
  LayeredCircuit c;
  std::map<std::string, int> index;
  std::vector<std::array<std::string, 2>> kid_names;
  std::vector<char> has_kids;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok[0] == '#') continue;
    if (!have_output) {
      if (tok != "output") throw InputError("line 1 must be 'output <id>'");
      if (!(ls >> output_name)) throw InputError("missing output id");
      have_output = true;
      continue;
    }
    std::string arrow, kind;
    if (!(ls >> arrow) || arrow != "->" || !(ls >> kind))
      throw InputError("line " + std::to_string(lineno) + ": expected '<id> -> <kind> ...'");
    if (index.count(tok)) throw InputError("duplicate gate record for '" + tok + "'");
    index[tok] = static_cast<int>(c.gates.size());
    c.names.push_back(tok);
    LayeredCircuit::Gate g;
    if (kind == "0" || kind == "1") {
      g.kind = kind == "1" ? LayeredCircuit::Kind::ConstTrue : LayeredCircuit::Kind::ConstFalse;
      kid_names.push_back({});
      has_kids.push_back(0);
    } else if (kind == "and" || kind == "or") {
      g.kind = kind == "and" ? LayeredCircuit::Kind::And : LayeredCircuit::Kind::Or;
      std::array<std::string, 2> kn;
      if (!(ls >> kn[0] >> kn[1]))
        throw InputError("line " + std::to_string(lineno) + ": expected two inputs");
      kid_names.push_back(kn);
      has_kids.push_back(1);
    } else {
      throw InputError("line " + std::to_string(lineno) + ": unknown gate kind '" + kind + "'");
    }
    c.gates.push_back(g);
  }
  if (!have_output) throw InputError("empty circuit input");
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    if (!has_kids[i]) continue;
    for (int s = 0; s < 2; ++s) {
      auto it = index.find(kid_names[i][s]);
      if (it == index.end())
        throw InputError("gate input '" + kid_names[i][s] + "' has no record");
      (s == 0 ? c.gates[i].a : c.gates[i].b) = it->second;
    }
  }
  auto oit = index.find(output_name);
  if (oit == index.end()) throw InputError("output '" + output_name + "' has no record");
  c.output = oit->second;
  return c;
}

namespace {

struct CircuitLevels {
  std::vector<int> level;  // -1 until computed
};

int circuit_level(const LayeredCircuit& c, int v, CircuitLevels& st) {
  if (st.level[v] >= 0) return st.level[v];
  const auto& g = c.gates[v];
  int lv = 0;
  if (g.kind == LayeredCircuit::Kind::And || g.kind == LayeredCircuit::Kind::Or) {
    const int la = circuit_level(c, g.a, st);
    const int lb = circuit_level(c, g.b, st);
    if (la != lb)
      throw NotLayered("gate '" + c.names[v] + "' joins levels " + std::to_string(la) +
                       " and " + std::to_string(lb));
    lv = la + 1;
  }
  return st.level[v] = lv;
}

bool circuit_value(const LayeredCircuit& c, int v, std::vector<int>& memo) {
  if (memo[v] >= 0) return memo[v];
  const auto& g = c.gates[v];
  bool r;
  switch (g.kind) {
    case LayeredCircuit::Kind::ConstTrue:
      r = true;
      break;
    case LayeredCircuit::Kind::ConstFalse:
      r = false;
      break;
    case LayeredCircuit::Kind::And:
      r = circuit_value(c, g.a, memo) && circuit_value(c, g.b, memo);
      break;
    default:
      r = circuit_value(c, g.a, memo) || circuit_value(c, g.b, memo);
  }
  memo[v] = r;
  return r;
}

}  // namespace

CircuitGadget layered_circuit_to_dag(const LayeredCircuit& c) {
  CircuitLevels lv;
  lv.level.assign(c.gates.size(), -1);
  const int d = circuit_level(c, c.output, lv);

  CircuitGadget out;
  DagBuilder db;
  std::vector<NodeId> dag_of(c.gates.size(), kNoNode);
  auto rec = [&](auto&& self, int v) -> NodeId {
    if (dag_of[v] != kNoNode) return dag_of[v];
    const auto& g = c.gates[v];
    NodeId r;
    switch (g.kind) {
      case LayeredCircuit::Kind::ConstTrue:
        r = db.node_one();
        break;
      case LayeredCircuit::Kind::ConstFalse:
        r = db.leaf_zero();
        break;
      case LayeredCircuit::Kind::And:
        r = db.f_and(self(self, g.a), self(self, g.b));
        break;
      default:
        r = db.f_or(self(self, g.a), self(self, g.b));
    }
    return dag_of[v] = r;
  };
  db.d.root = rec(rec, c.output);
  out.dag = std::move(db.d);
  std::vector<int> memo(c.gates.size(), -1);
  out.predicted = circuit_value(c, c.output, memo) ? 2 * d + 1 : 2 * d;
  return out;
}

// ---------------------------------------------------------------------------
// Majority gadget

namespace {
const std::string kT2 = "bbaabaa";         // Strahler 2
const std::string kT3 = "b" + kT2 + kT2;   // Strahler 3
}  // namespace

MajorityGadget majority_tree(const std::string& bits) {
  for (const char c : bits)
    if (c != '0' && c != '1') throw InputError("majority input must be over {0,1}");
  // n = 0 degenerates: the prefix b T2 T2 has no holes, so the whole tree is T3.
  if (bits.empty()) return {kT3, 3};

  std::string v;
  v.reserve(bits.size() * 2);
  for (const char c : bits) {
    v.push_back(c);
    v.push_back(c);
  }
  const std::size_t n = bits.size();

  auto f_of = [](const std::string& w) {
    std::string out;
    std::size_t i = 0;
    bool first_block = true;
    while (i < w.size()) {
      std::size_t zeros = 0;
      while (i < w.size() && w[i] == '0') {
        ++zeros;
        ++i;
      }
      assert(zeros % 2 == 0);
      const std::size_t k = zeros / 2;
      if (first_block) {
        out.append(k, 'b');
        out.append(k, 'a');
        first_block = false;
      } else {
        out.append(1 + k, 'b');
        out.append(k, 'a');
      }
      if (i < w.size()) ++i;  // consume the '1'; its block is emitted next round
    }
    // Trailing '1' with no zeros after it still owes its block.
    if (!w.empty() && w.back() == '1') out.append(1, 'b');
    return out;
  };

  std::string vbar = v;
  for (char& c : vbar) c = c == '0' ? '1' : '0';

  MajorityGadget out;
  out.term = f_of(v) + "b" + kT2 + f_of(vbar) + kT2 + std::string(n - 1, 'a') + kT3 +
             std::string(n, 'a');
  const std::size_t zeros_v = 2 * static_cast<std::size_t>(
                                      std::count(bits.begin(), bits.end(), '0'));
  out.predicted = zeros_v >= n ? 3 : 4;
  return out;
}

// ---------------------------------------------------------------------------
// Line graph gadget

namespace {

struct FreshNames {
  std::set<std::string> taken;
  int counter = 0;
  std::string get(const std::string& stem) {
    std::string cand = stem;
    while (taken.count(cand)) cand = stem + std::to_string(counter++);
    taken.insert(cand);
    return cand;
  }
};

// Adds the shape below a fresh root; returns the root id.
std::string attach_shape(AdjacencyTree& g, const BinaryTree& shape, FreshNames& fresh) {
  std::vector<std::string> id_of(shape.nodes.size());
  for (std::size_t v = 0; v < shape.nodes.size(); ++v) id_of[v] = fresh.get("t");
  for (std::size_t v = 0; v < shape.nodes.size(); ++v) {
    auto& kids = g.children[id_of[v]];
    if (!shape.nodes[v].is_leaf()) {
      kids.push_back(id_of[shape.nodes[v].left]);
      kids.push_back(id_of[shape.nodes[v].right]);
    }
  }
  return id_of[shape.root];
}

}  // namespace

LineGraphGadget linegraph_tree(const std::vector<std::string>& order, const std::string& u,
                               const std::string& v) {
  if (order.empty()) throw InvalidNodes("empty node order");
  std::size_t ui = order.size(), vi = order.size();
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == u) ui = i;
    if (order[i] == v) vi = i;
  }
  if (ui == order.size()) throw InvalidNodes("node '" + u + "' is not in the graph");
  if (vi == order.size()) throw InvalidNodes("node '" + v + "' is not in the graph");
  if (ui == vi) throw InvalidNodes("u and v must differ");

  FreshNames fresh;
  for (const auto& id : order) fresh.taken.insert(id);
  std::vector<std::string> nodes = order;
  if (nodes.back() == u || nodes.back() == v) nodes.push_back(fresh.get("w"));

  const BinaryTree st2 = parse_term(kT2);
  const BinaryTree st1 = parse_term("baa");

  LineGraphGadget out;
  out.tree.root = nodes.front();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto& kids = out.tree.children[nodes[i]];
    if (i + 1 == nodes.size()) {
      // The sink gets two fresh leaves.
      kids.push_back(fresh.get("t"));
      kids.push_back(fresh.get("t"));
      out.tree.children[kids[0]];
      out.tree.children[kids[1]];
      break;
    }
    kids.push_back(nodes[i + 1]);
    if (nodes[i] == u)
      kids.push_back(attach_shape(out.tree, st2, fresh));
    else if (nodes[i] == v)
      kids.push_back(attach_shape(out.tree, st1, fresh));
    else
      kids.push_back(fresh.get("t"));
    if (nodes[i] != u && nodes[i] != v) out.tree.children[kids[1]];
  }
  out.predicted = ui < vi ? 3 : 2;
  return out;
}

LineGraphInstance parse_linegraph_file(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  LineGraphInstance inst;
  bool have_nodes = false, have_query = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok[0] == '#') continue;
    if (tok == "nodes") {
      std::string id;
      while (ls >> id) inst.order.push_back(id);
      have_nodes = true;
    } else if (tok == "query") {
      if (!(ls >> inst.u >> inst.v)) throw InputError("query needs two node ids");
      have_query = true;
    } else {
      throw InputError("unexpected line '" + line + "'");
    }
  }
  if (!have_nodes || !have_query)
    throw InputError("line graph file needs 'nodes ...' and 'query u v'");
  return inst;
}

// ---------------------------------------------------------------------------
// Dag reachability gadgets

namespace {

std::vector<bool> dag_reachable(const Dag& d) {
  std::vector<bool> seen(d.nodes.size(), false);
  std::vector<NodeId> work{d.root};
  seen[d.root] = true;
  while (!work.empty()) {
    const NodeId v = work.back();
    work.pop_back();
    for (const NodeId k : d.nodes[v].kids)
      if (!seen[k]) {
        seen[k] = true;
        work.push_back(k);
      }
  }
  return seen;
}

NodeId find_node(const Dag& d, const std::string& name) {
  for (std::size_t v = 0; v < d.names.size(); ++v)
    if (d.names[v] == name) return static_cast<NodeId>(v);
  throw InvalidNodes("node '" + name + "' is not in the dag");
}

}  // namespace

DagReachTslpGadget dag_reach_tslp(const Dag& d, const std::string& target) {
  const NodeId vt = find_node(d, target);
  if (!d.nodes[vt].is_leaf()) throw MalformedInstance("target must be a leaf");
  if (d.nodes[d.root].is_leaf()) throw MalformedInstance("root must have degree two");

  const auto reachable = dag_reachable(d);
  FreshNames fresh;
  // Node names land in variable position, where a/b/x are reserved tokens.
  auto sanitized = [](const std::string& name) {
    return name == "a" || name == "b" || name == "x" ? name + "_" : name;
  };
  for (std::size_t v = 0; v < d.names.size(); ++v)
    if (reachable[v]) fresh.taken.insert(sanitized(d.names[v]));
  const std::string sname = fresh.get("S");
  const std::string aname = fresh.get("A");
  const std::string bname = fresh.get("B");

  DagReachTslpGadget out;
  Tslp& g = out.tslp;
  std::vector<NodeId> var_of(d.nodes.size(), kNoNode);
  for (std::size_t v = 0; v < d.nodes.size(); ++v) {
    if (!reachable[v]) continue;
    var_of[v] = static_cast<NodeId>(g.names.size());
    g.names.push_back(sanitized(d.names[v]));
    g.rules.push_back({});
    g.is_context.push_back(true);
  }
  const NodeId a_var = static_cast<NodeId>(g.names.size());
  g.names.push_back(aname);
  g.rules.push_back({Tslp::RuleKind::Leaf, kNoNode, kNoNode});
  g.is_context.push_back(false);
  const NodeId b_var = static_cast<NodeId>(g.names.size());
  g.names.push_back(bname);
  g.rules.push_back({Tslp::RuleKind::Pair, a_var, a_var});
  g.is_context.push_back(false);
  const NodeId s_var = static_cast<NodeId>(g.names.size());
  g.names.push_back(sname);
  g.rules.push_back({Tslp::RuleKind::Apply, var_of[d.root], b_var});
  g.is_context.push_back(false);
  g.start = s_var;

  for (std::size_t v = 0; v < d.nodes.size(); ++v) {
    if (!reachable[v]) continue;
    auto& rule = g.rules[var_of[v]];
    if (!d.nodes[v].is_leaf()) {
      rule = {Tslp::RuleKind::Compose, var_of[d.nodes[v].kids[0]],
              var_of[d.nodes[v].kids[1]]};
    } else if (static_cast<NodeId>(v) == vt) {
      rule = {Tslp::RuleKind::CtxLeft, b_var, kNoNode};
    } else {
      rule = {Tslp::RuleKind::CtxLeft, a_var, kNoNode};
    }
  }
  validate(g);
  out.predicted = reachable[vt] ? 2 : 1;
  return out;
}

DagReachGrammarGadget dag_reach_grammar(const Dag& d, const std::string& target) {
  const NodeId vt = find_node(d, target);
  if (!d.nodes[vt].is_leaf()) throw MalformedInstance("target must be a leaf");
  if (d.nodes[d.root].is_leaf()) throw MalformedInstance("root must have degree two");

  FreshNames fresh;
  // "eps" is the empty-body keyword of the grammar file format.
  auto sanitized = [](const std::string& name) {
    return name == "eps" ? name + "_" : name;
  };
  std::vector<std::string> names;
  for (const auto& name : d.names) {
    names.push_back(sanitized(name));
    fresh.taken.insert(names.back());
  }
  const std::string aname = fresh.get("A");
  const std::string bname = fresh.get("B");

  DagReachGrammarGadget out;
  CnfGrammar& g = out.grammar;
  g.names = names;
  const NodeId a_nt = static_cast<NodeId>(g.names.size());
  g.names.push_back(aname);
  const NodeId b_nt = static_cast<NodeId>(g.names.size());
  g.names.push_back(bname);
  g.start = d.root;

  out.certificate.choice.assign(g.names.size(), -1);
  auto add = [&](CnfGrammar::Production p, bool witness) {
    g.prods.push_back(p);
    if (witness) out.certificate.choice[p.lhs] = static_cast<int>(g.prods.size() - 1);
  };
  for (std::size_t v = 0; v < d.nodes.size(); ++v) {
    const NodeId id = static_cast<NodeId>(v);
    if (!d.nodes[v].is_leaf()) {
      add({id, false, d.nodes[v].kids[0], a_nt}, true);
      add({id, false, d.nodes[v].kids[1], a_nt}, false);
    } else if (id == vt) {
      add({id, false, b_nt, b_nt}, true);
    } else {
      add({id, true, kNoNode, kNoNode}, true);
    }
  }
  add({b_nt, false, a_nt, a_nt}, true);
  add({a_nt, true, kNoNode, kNoNode}, true);

  out.predicted = dag_reachable(d)[vt] ? 2 : 1;
  return out;
}

DagReachInstance parse_dagreach_file(const std::string& text) {
  const auto nl = text.find('\n');
  if (nl == std::string::npos) throw InputError("dagreach file needs a target and a dag");
  std::istringstream first(text.substr(0, nl));
  std::string tok, target;
  if (!(first >> tok) || tok != "target" || !(first >> target))
    throw InputError("line 1 must be 'target <id>'");
  DagReachInstance inst;
  inst.target = target;
  inst.dag = parse_dag_file(text.substr(nl + 1));
  return inst;
}

// ---------------------------------------------------------------------------
// X3HS gadget

X3hsInstance parse_x3hs_file(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  X3hsInstance inst;
  bool have_n = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok[0] == '#') continue;
    if (!have_n) {
      if (tok != "n") throw MalformedInstance("line 1 must be 'n <int>'");
      if (!(ls >> inst.n)) throw MalformedInstance("missing universe size");
      have_n = true;
      continue;
    }
    if (tok != "set") throw MalformedInstance("expected 'set a b c'");
    std::array<int, 3> s;
    if (!(ls >> s[0] >> s[1] >> s[2])) throw MalformedInstance("sets have exactly 3 members");
    inst.sets.push_back(s);
  }
  if (!have_n) throw MalformedInstance("empty x3hs input");
  return inst;
}

bool exact_hitting_set_exists(const X3hsInstance& inst) {
  if (inst.n > 20) throw LimitExceeded("hitting-set brute force supports n <= 20");
  for (std::uint32_t s = 0; s < (std::uint32_t{1} << inst.n); ++s) {
    bool ok = true;
    for (const auto& c : inst.sets) {
      int hits = 0;
      for (const int m : c) hits += (s >> (m - 1)) & 1;
      if (hits != 1) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

namespace {

// Get-or-create machinery for bracket nonterminals [XY] -> X Y.
struct GrammarBuilder {
  CnfGrammar g;
  std::map<std::string, NodeId> index;

  NodeId nt(const std::string& name) {
    auto [it, fresh] = index.try_emplace(name, static_cast<NodeId>(g.names.size()));
    if (fresh) g.names.push_back(name);
    return it->second;
  }

  void prod(NodeId lhs, NodeId b, NodeId c) { g.prods.push_back({lhs, false, b, c}); }
  void eps(NodeId lhs) { g.prods.push_back({lhs, true, kNoNode, kNoNode}); }

  NodeId bracket(NodeId x, NodeId y) {
    const std::string name = "[" + g.names[x] + g.names[y] + "]";
    const bool existed = index.count(name) > 0;
    const NodeId id = nt(name);
    if (!existed) prod(id, x, y);
    return id;
  }
};

}  // namespace

X3hsGadget x3hs_grammar(const X3hsInstance& inst) {
  if (inst.n < 1) throw MalformedInstance("universe must be nonempty");
  for (const auto& c : inst.sets) {
    for (const int m : c)
      if (m < 1 || m > inst.n) throw MalformedInstance("set member out of range");
    if (c[0] == c[1] || c[0] == c[2] || c[1] == c[2])
      throw MalformedInstance("set members must be distinct");
  }

  const int n = inst.n;
  const int m = static_cast<int>(inst.sets.size());
  X3hsGadget out;
  out.degenerate = inst.sets.empty();
  GrammarBuilder gb;

  const NodeId e = gb.nt("E");
  std::vector<NodeId> A(n + 1), I(n + 1), O(n + 1), B(m + 2);
  for (int k = 1; k <= n; ++k) {
    A[k] = gb.nt("A" + std::to_string(k));
    I[k] = gb.nt("I" + std::to_string(k));
    O[k] = gb.nt("O" + std::to_string(k));
  }
  for (int j = 1; j <= m + 1; ++j) B[j] = gb.nt("B" + std::to_string(j));

  gb.eps(e);
  for (int k = 1; k <= n; ++k) {
    gb.prod(A[k], I[k], e);
    gb.prod(A[k], O[k], e);
    const NodeId next = k < n ? A[k + 1] : B[1];
    gb.prod(I[k], next, e);
    gb.eps(I[k]);
    gb.prod(O[k], next, e);
    gb.eps(O[k]);
  }
  for (int j = 1; j <= m; ++j) {
    std::array<int, 3> c = inst.sets[j - 1];
    std::sort(c.begin(), c.end());
    // All six orderings, as listed in the construction.
    const std::array<std::array<int, 3>, 6> perms{{{c[0], c[1], c[2]},
                                                   {c[0], c[2], c[1]},
                                                   {c[1], c[0], c[2]},
                                                   {c[1], c[2], c[0]},
                                                   {c[2], c[0], c[1]},
                                                   {c[2], c[1], c[0]}}};
    for (const auto& p : perms) {
      const NodeId inner = gb.bracket(I[p[1]], I[p[2]]);
      const NodeId outer = gb.bracket(O[p[0]], inner);
      gb.prod(B[j], B[j + 1], outer);
    }
  }
  gb.prod(B[m + 1], e, e);
  gb.g.start = A[1];

  out.grammar = std::move(gb.g);
  out.predicted = exact_hitting_set_exists(inst);
  return out;
}

// ---------------------------------------------------------------------------
// QBF gadget

Qbf parse_qbf_file(const std::string& text) {
  const auto nl = text.find('\n');
  if (nl == std::string::npos) throw MalformedQbf("qbf file needs a prefix and a matrix");
  std::istringstream first(text.substr(0, nl));
  Qbf q;
  std::string quant, var;
  int expect = 1;
  while (first >> quant) {
    if (quant != "E" && quant != "A")
      throw MalformedQbf("quantifier must be E or A, got '" + quant + "'");
    if (!(first >> var)) throw MalformedQbf("quantifier without a variable");
    if (parse_literal_var(var) != expect)
      throw MalformedQbf("prefix variables must be x1, x2, ... in order");
    q.exists.push_back(quant == "E");
    ++expect;
  }
  if (q.exists.empty()) throw MalformedQbf("empty quantifier prefix");
  q.matrix = parse_formula(text.substr(nl + 1), /*allow_literals=*/true);
  const int n = static_cast<int>(q.exists.size());
  for (const auto& node : q.matrix.nodes)
    if (node.kind == BoolFormula::Kind::Lit && (node.var < 1 || node.var > n))
      throw MalformedQbf("matrix variable x" + std::to_string(node.var) + " is unbound");
  return q;
}

bool qbf_eval(const Qbf& q) {
  const int n = static_cast<int>(q.exists.size());
  std::vector<bool> assignment(n, false);
  auto rec = [&](auto&& self, int i) -> bool {
    if (i == n) return eval_formula(q.matrix, assignment);
    assignment[i] = false;
    const bool f = self(self, i + 1);
    assignment[i] = true;
    const bool t = self(self, i + 1);
    return q.exists[i] ? (f || t) : (f && t);
  };
  return rec(rec, 0);
}

QbfGadget qbf_grammar(const Qbf& q) {
  const Qbf padded{q.exists, pad_uniform(q.matrix)};
  const int n = static_cast<int>(padded.exists.size());
  const int h = formula_depth(padded.matrix);

  QbfGadget out;
  GrammarBuilder gb;
  const NodeId e = gb.nt("E");
  std::vector<NodeId> A(n + 2), F(n + 1), T(n + 1);
  for (int i = 1; i <= n + 1; ++i) A[i] = gb.nt("A" + std::to_string(i));
  for (int i = 1; i <= n; ++i) {
    F[i] = gb.nt("F" + std::to_string(i));
    T[i] = gb.nt("T" + std::to_string(i));
  }

  gb.eps(e);
  for (int i = 1; i <= n; ++i) {
    if (!padded.exists[i - 1]) {
      gb.prod(A[i], gb.bracket(F[i], F[i]), gb.bracket(T[i], T[i]));
    } else {
      gb.prod(A[i], gb.bracket(gb.bracket(F[i], F[i]), T[i]),
              gb.bracket(F[i], gb.bracket(T[i], T[i])));
    }
    gb.prod(F[i], A[i + 1], e);
    gb.eps(F[i]);
    gb.prod(T[i], A[i + 1], e);
    gb.eps(T[i]);
  }

  // Matrix nodes become nonterminals; the root is A_{n+1}.
  const auto& mx = padded.matrix;
  std::vector<NodeId> nt_of(mx.nodes.size(), kNoNode);
  int counter = 0;
  auto name_rec = [&](auto&& self, int v) -> void {
    nt_of[v] = v == mx.root ? A[n + 1] : gb.nt("M" + std::to_string(++counter));
    if (is_internal(mx.nodes[v])) {
      self(self, mx.nodes[v].left);
      self(self, mx.nodes[v].right);
    }
  };
  name_rec(name_rec, mx.root);

  const NodeId ee = gb.bracket(e, e);
  const NodeId eeee = gb.bracket(ee, ee);
  auto emit_rec = [&](auto&& self, int v) -> void {
    const auto& node = mx.nodes[v];
    const NodeId a = nt_of[v];
    if (node.kind == BoolFormula::Kind::And) {
      const NodeId b = nt_of[node.left], c = nt_of[node.right];
      gb.prod(a, gb.bracket(b, b), gb.bracket(c, c));
      self(self, node.left);
      self(self, node.right);
    } else if (node.kind == BoolFormula::Kind::Or) {
      const NodeId b = nt_of[node.left], c = nt_of[node.right];
      gb.prod(a, gb.bracket(gb.bracket(b, b), c), gb.bracket(b, gb.bracket(c, c)));
      self(self, node.left);
      self(self, node.right);
    } else if (node.kind == BoolFormula::Kind::Lit) {
      if (node.var < 1 || node.var > n)
        throw MalformedQbf("matrix variable x" + std::to_string(node.var) + " is unbound");
      if (!node.negated) {
        gb.prod(a, eeee, F[node.var]);
        gb.prod(a, ee, T[node.var]);
      } else {
        gb.prod(a, eeee, T[node.var]);
        gb.prod(a, ee, F[node.var]);
      }
    } else {
      throw MalformedQbf("matrix leaves must be literals");
    }
  };
  emit_rec(emit_rec, mx.root);
  gb.g.start = A[1];

  // t_big: quantifier-produced F/T expand with A_{i+1}E, leaf-produced with eps.
  const BinaryTree lf = BinaryTree::leaf();
  const BinaryTree st1 = BinaryTree::branch(BinaryTree::branch(lf, lf), lf);
  const BinaryTree st2 = BinaryTree::branch(
      BinaryTree::branch(BinaryTree::branch(lf, lf), BinaryTree::branch(lf, lf)), lf);
  std::vector<bool> assignment(n, false);
  auto big_matrix = [&](auto&& self, int v) -> BinaryTree {
    const auto& node = mx.nodes[v];
    if (node.kind == BoolFormula::Kind::Lit) {
      const bool truth = assignment[node.var - 1] != node.negated;
      // A true literal's forced production carries the Strahler-2 subgadget.
      return truth ? st2 : st1;
    }
    const BinaryTree l = self(self, node.left);
    const BinaryTree r = self(self, node.right);
    return node.kind == BoolFormula::Kind::And ? tree_and(l, r) : tree_or(l, r);
  };
  auto big_quant = [&](auto&& self, int i) -> BinaryTree {
    if (i == n + 1) return big_matrix(big_matrix, mx.root);
    assignment[i - 1] = false;
    const BinaryTree fsub = BinaryTree::branch(self(self, i + 1), lf);  // F_i -> A_{i+1} E
    assignment[i - 1] = true;
    const BinaryTree tsub = BinaryTree::branch(self(self, i + 1), lf);
    return padded.exists[i - 1] ? tree_or(fsub, tsub) : tree_and(fsub, tsub);
  };
  out.t_big = big_quant(big_quant, 1);

  out.grammar = std::move(gb.g);
  out.k = 2 * h + 2 * n + 2;
  out.predicted = qbf_eval(padded);
  return out;
}

}  // namespace strahler
