#include "strahler/nc1_circuit.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>
#include <tuple>

#include "strahler/errors.hpp"

namespace strahler {

std::string gate_var_name(const Tslp& g, const GateVar& v) {
  const char* suffix = v.field == GateVar::Field::St ? "_st"
                       : v.field == GateVar::Field::Ell ? "_l"
                                                        : "_h";
  return g.names[v.var] + suffix;
}

namespace {

using Field = GateVar::Field;
using RK = Tslp::RuleKind;

// Case tables derived from the evaluation rules: each variable's value is a
// case split over comparisons of lower variables, each case yielding a lower
// variable, that variable plus one, or the constant zero.
struct Expr {
  enum class Kind { Zero, Var, VarPlus1 };
  Kind kind = Kind::Zero;
  GateVar v;
};

struct Atom {  // [p <= q + offset]
  GateVar p, q;
  int offset = 0;
};

struct Case {
  std::vector<Atom> conds;
  Expr value;
};

std::vector<Case> case_table(const Tslp& g, const GateVar& x) {
  const auto& r = g.rules[x.var];
  auto st = [](NodeId v) { return GateVar{v, Field::St}; };
  auto ell = [](NodeId v) { return GateVar{v, Field::Ell}; };
  auto hh = [](NodeId v) { return GateVar{v, Field::H}; };
  auto var = [](GateVar v) { return Expr{Expr::Kind::Var, v}; };
  auto var1 = [](GateVar v) { return Expr{Expr::Kind::VarPlus1, v}; };

  if (x.field == Field::St) {
    switch (r.kind) {
      case RK::Leaf:
        return {{{}, Expr{Expr::Kind::Zero, {}}}};
      case RK::Pair: {
        const GateVar b = st(r.first), c = st(r.second);
        return {{{Atom{c, b, -1}}, var(b)},
                {{Atom{b, c, -1}}, var(c)},
                {{Atom{b, c, 0}, Atom{c, b, 0}}, var1(b)}};
      }
      case RK::Apply: {
        const GateVar bl = ell(r.first), bh = hh(r.first), c = st(r.second);
        return {{{Atom{c, bl, -1}}, var(bh)},
                {{Atom{bl, c, 0}, Atom{c, bh, 0}}, var1(bh)},
                {{Atom{bh, c, -1}}, var(c)}};
      }
      default:
        throw InputError("st of a context variable has no case table");
    }
  }
  switch (r.kind) {
    case RK::CtxLeft:
    case RK::CtxRight:
      return {{{}, var(st(r.first))}};
    case RK::Compose: {
      const GateVar bl = ell(r.first), bh = hh(r.first);
      const GateVar cl = ell(r.second), ch = hh(r.second);
      if (x.field == Field::Ell) {
        return {{{Atom{ch, bl, -2}}, var(bl)},
                {{Atom{ch, bl, -1}, Atom{bl, ch, 1}}, var(cl)},
                {{Atom{bl, ch, 0}, Atom{ch, bh, 0}}, Expr{Expr::Kind::Zero, {}}},
                {{Atom{bh, ch, -1}}, var(cl)}};
      }
      return {{{Atom{ch, bl, -2}}, var(bh)},
              {{Atom{ch, bl, -1}, Atom{bl, ch, 1}}, var(bh)},
              {{Atom{bl, ch, 0}, Atom{ch, bh, 0}}, var(bh)},
              {{Atom{bh, ch, -1}}, var(ch)}};
    }
    default:
      throw InputError("l/h of a tree variable has no case table");
  }
}

struct Builder {
  const Tslp& g;
  int clamp;  // |offset| beyond this becomes a constant input
  NodeId zero_var;
  BoolCircuit c;
  int true_gate = -1, false_gate = -1;
  std::map<std::tuple<NodeId, int, NodeId, int, int>, int> cmp_memo;
  std::map<std::tuple<int, int, int>, int> op_memo;  // (kind, a, b) hash-consing

  int constant(bool v) {
    int& slot = v ? true_gate : false_gate;
    if (slot < 0) {
      c.gates.push_back({v ? BoolCircuit::Kind::True : BoolCircuit::Kind::False, -1, -1, {}, {}, 0});
      slot = static_cast<int>(c.gates.size() - 1);
    }
    return slot;
  }

  int op2(BoolCircuit::Kind kind, int a, int b) {
    if (a > b) std::swap(a, b);
    const auto key = std::make_tuple(static_cast<int>(kind), a, b);
    if (auto it = op_memo.find(key); it != op_memo.end()) return it->second;
    c.gates.push_back({kind, a, b, {}, {}, 0});
    const int id = static_cast<int>(c.gates.size() - 1);
    op_memo[key] = id;
    return id;
  }

  // Balanced fan-in-2 folds; empty conjunction is true, empty disjunction false.
  int fold(BoolCircuit::Kind kind, std::vector<int> ins) {
    if (ins.empty()) return constant(kind == BoolCircuit::Kind::And);
    while (ins.size() > 1) {
      std::vector<int> next;
      for (std::size_t i = 0; i + 1 < ins.size(); i += 2)
        next.push_back(op2(kind, ins[i], ins[i + 1]));
      if (ins.size() % 2) next.push_back(ins.back());
      ins = std::move(next);
    }
    return ins[0];
  }

  bool is_leaf_var(const GateVar& v) const {
    return v.field == Field::St && g.rules[v.var].kind == RK::Leaf;
  }

  int cmp(GateVar x, GateVar y, int i) {
    const auto key = std::make_tuple(x.var, static_cast<int>(x.field), y.var,
                                     static_cast<int>(y.field), i);
    if (auto it = cmp_memo.find(key); it != cmp_memo.end()) return it->second;

    int body;
    if (i > clamp) {
      body = constant(true);  // v(x) <= clamp and v(y) >= 0
    } else if (i < -clamp) {
      body = constant(false);  // v(y) - |i| < 0 <= v(x)
    } else if (is_leaf_var(x) && is_leaf_var(y)) {
      body = constant(i >= 0);  // 0 <= 0 + i
    } else {
      const auto tx = case_table(g, x);
      const auto ty = case_table(g, y);
      std::vector<int> disjuncts;
      for (const auto& cx : tx) {
        for (const auto& cy : ty) {
          std::vector<int> conjuncts;
          for (const auto& a : cx.conds) conjuncts.push_back(cmp(a.p, a.q, a.offset));
          for (const auto& a : cy.conds) conjuncts.push_back(cmp(a.p, a.q, a.offset));
          conjuncts.push_back(value_leq(cx.value, cy.value, i));
          disjuncts.push_back(fold(BoolCircuit::Kind::And, std::move(conjuncts)));
        }
      }
      body = fold(BoolCircuit::Kind::Or, std::move(disjuncts));
    }
    c.gates.push_back({BoolCircuit::Kind::Cmp, body, -1, x, y, i});
    const int id = static_cast<int>(c.gates.size() - 1);
    cmp_memo[key] = id;
    return id;
  }

  // [e1 <= e2 + i] reduced to a comparison of the underlying variables; the
  // constant zero reads through the designated leaf variable.
  int value_leq(const Expr& e1, const Expr& e2, int i) {
    const GateVar z{zero_var, Field::St};
    const GateVar v1 = e1.kind == Expr::Kind::Zero ? z : e1.v;
    const GateVar v2 = e2.kind == Expr::Kind::Zero ? z : e2.v;
    const int c1 = e1.kind == Expr::Kind::VarPlus1 ? 1 : 0;
    const int c2 = e2.kind == Expr::Kind::VarPlus1 ? 1 : 0;
    return cmp(v1, v2, i + c2 - c1);
  }
};

int floor_log2(std::int64_t n) {
  assert(n >= 1);
  int k = 0;
  while (n > 1) {
    n >>= 1;
    ++k;
  }
  return k;
}

}  // namespace

BoolCircuit build_circuit(const Tslp& g, int k) {
  if (k < 0) throw InputError("threshold must be nonnegative");
  const std::int64_t leaves = tslp_leaf_count(g);
  // Saturated counts fall back to the bound leaves <= 2^(depth+1).
  const int max_k =
      leaves >= (std::int64_t{1} << 62) ? tslp_depth(g) + 1 : floor_log2(leaves);
  if (k > max_k) throw ThresholdTooLarge(k, max_k);

  NodeId zero_var = kNoNode;
  for (std::size_t v = 0; v < g.rules.size(); ++v)
    if (g.rules[v].kind == RK::Leaf) {
      zero_var = static_cast<NodeId>(v);
      break;
    }
  assert(zero_var != kNoNode);  // every acyclic reachable TSLP has an a-rule

  Builder b{g, max_k, zero_var, {}, -1, -1, {}, {}};
  // [S_st >= k]  ==  [Z_st <= S_st - k].
  b.c.output = b.cmp(GateVar{zero_var, Field::St}, GateVar{g.start, Field::St}, -k);
  return b.c;
}

bool eval_circuit(const BoolCircuit& c) {
  std::vector<char> val(c.gates.size(), 0);
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const auto& gt = c.gates[i];
    switch (gt.kind) {
      case BoolCircuit::Kind::True:
        val[i] = 1;
        break;
      case BoolCircuit::Kind::False:
        val[i] = 0;
        break;
      case BoolCircuit::Kind::And:
        val[i] = val[gt.a] && val[gt.b];
        break;
      case BoolCircuit::Kind::Or:
        val[i] = val[gt.a] || val[gt.b];
        break;
      case BoolCircuit::Kind::Not:
        val[i] = !val[gt.a];
        break;
      case BoolCircuit::Kind::Cmp:
        val[i] = val[gt.a];
        break;
    }
  }
  return val[c.output];
}

bool gate_semantics(const Tslp& g, const BoolCircuit& c, int gate_id) {
  const auto& gt = c.gates.at(gate_id);
  if (gt.kind != BoolCircuit::Kind::Cmp)
    throw InputError("gate_semantics is defined for comparison gates");
  const TslpTables tb = tslp_analyze(g);
  auto value = [&](const GateVar& v) {
    switch (v.field) {
      case Field::St:
        return tb.st[v.var];
      case Field::Ell:
        return tb.lh[v.var].ell;
      default:
        return tb.lh[v.var].h;
    }
  };
  return value(gt.x) <= value(gt.y) + gt.offset;
}

bool audit_circuit(const Tslp& g, const BoolCircuit& c) {
  const TslpTables tb = tslp_analyze(g);
  auto value = [&](const GateVar& v) {
    switch (v.field) {
      case Field::St:
        return tb.st[v.var];
      case Field::Ell:
        return tb.lh[v.var].ell;
      default:
        return tb.lh[v.var].h;
    }
  };
  std::vector<char> val(c.gates.size(), 0);
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const auto& gt = c.gates[i];
    switch (gt.kind) {
      case BoolCircuit::Kind::True:
        val[i] = 1;
        break;
      case BoolCircuit::Kind::False:
        val[i] = 0;
        break;
      case BoolCircuit::Kind::And:
        val[i] = val[gt.a] && val[gt.b];
        break;
      case BoolCircuit::Kind::Or:
        val[i] = val[gt.a] || val[gt.b];
        break;
      case BoolCircuit::Kind::Not:
        val[i] = !val[gt.a];
        break;
      case BoolCircuit::Kind::Cmp: {
        val[i] = val[gt.a];
        const bool intended = value(gt.x) <= value(gt.y) + gt.offset;
        if (static_cast<bool>(val[i]) != intended) return false;
        break;
      }
    }
  }
  return true;
}

int circuit_depth(const BoolCircuit& c) {
  std::vector<int> depth(c.gates.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const auto& gt = c.gates[i];
    int d = 0;
    if (gt.a >= 0) d = std::max(d, depth[gt.a] + 1);
    if (gt.b >= 0) d = std::max(d, depth[gt.b] + 1);
    depth[i] = d;
    best = std::max(best, d);
  }
  return best;
}

std::string print_circuit(const Tslp& g, const BoolCircuit& c) {
  std::ostringstream out;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const auto& gt = c.gates[i];
    out << "g" << i << ": ";
    switch (gt.kind) {
      case BoolCircuit::Kind::True:
        out << "TRUE";
        break;
      case BoolCircuit::Kind::False:
        out << "FALSE";
        break;
      case BoolCircuit::Kind::And:
        out << "AND g" << gt.a << " g" << gt.b;
        break;
      case BoolCircuit::Kind::Or:
        out << "OR g" << gt.a << " g" << gt.b;
        break;
      case BoolCircuit::Kind::Not:
        out << "NOT g" << gt.a;
        break;
      case BoolCircuit::Kind::Cmp:
        out << "CMP(" << gate_var_name(g, gt.x) << "," << gate_var_name(g, gt.y) << ","
            << gt.offset << ") g" << gt.a;
        break;
    }
    out << "\n";
  }
  out << "output g" << c.output << "\n";
  return out.str();
}

}  // namespace strahler
