#include "strahler/strahler_core.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <sstream>
#include <utility>

#include "strahler/context_algebra.hpp"
#include "strahler/errors.hpp"

namespace strahler {

namespace {

// Children sit at higher arena indices only for preorder-built trees, so a
// general iterative postorder is used instead of an index sweep.
template <class Leaf, class Combine>
auto fold_tree(const BinaryTree& t, const Leaf& leaf, const Combine& combine) {
  using Value = decltype(leaf(NodeId{}));
  std::vector<Value> val(t.nodes.size());
  std::vector<std::pair<NodeId, bool>> work{{t.root, false}};
  while (!work.empty()) {
    auto [v, expanded] = work.back();
    work.pop_back();
    if (t.nodes[v].is_leaf()) {
      val[v] = leaf(v);
    } else if (!expanded) {
      work.push_back({v, true});
      work.push_back({t.nodes[v].left, false});
      work.push_back({t.nodes[v].right, false});
    } else {
      val[v] = combine(val[t.nodes[v].left], val[t.nodes[v].right]);
    }
  }
  return val;
}

}  // namespace

int strahler_naive(const BinaryTree& t) {
  auto val = fold_tree(
      t, [](NodeId) { return 0; }, [](int a, int b) { return s_op(a, b); });
  return val[t.root];
}

bool embed_oracle(const BinaryTree& t, int k) {
  if (k <= 0) return true;
  const std::size_t n = t.nodes.size();
  // at[v*(k+1)+j]: complete tree of depth j embeds with its root mapped to v.
  // any[...]: embeds with its root mapped somewhere in t(v).
  std::vector<char> at(n * (k + 1)), any(n * (k + 1));
  std::vector<std::pair<NodeId, bool>> work{{t.root, false}};
  while (!work.empty()) {
    auto [v, expanded] = work.back();
    work.pop_back();
    if (!t.nodes[v].is_leaf() && !expanded) {
      work.push_back({v, true});
      work.push_back({t.nodes[v].left, false});
      work.push_back({t.nodes[v].right, false});
      continue;
    }
    for (int j = 0; j <= k; ++j) {
      bool here;
      if (j == 0) {
        here = true;
      } else if (t.nodes[v].is_leaf()) {
        here = false;
      } else {
        // The two root edges split at v: one image per child subtree.
        here = any[t.nodes[v].left * (k + 1) + j - 1] &&
               any[t.nodes[v].right * (k + 1) + j - 1];
      }
      at[v * (k + 1) + j] = here;
      any[v * (k + 1) + j] =
          here || (!t.nodes[v].is_leaf() && (any[t.nodes[v].left * (k + 1) + j] ||
                                             any[t.nodes[v].right * (k + 1) + j]));
    }
  }
  return any[t.root * (k + 1) + k];
}

DeltaEncodedStack encode_deltas(const std::vector<int>& seq) {
  const std::size_t k = seq.size();
  std::vector<char> dominated(k, 0);
  int suffix_max = -1;
  for (std::size_t i = k; i-- > 0;) {
    dominated[i] = suffix_max > seq[i];
    suffix_max = std::max(suffix_max, seq[i]);
  }
  DeltaEncodedStack out;
  out.values.resize(k);
  int next_undominated = -1;  // value of the nearest undominated position to the right
  std::string rev;            // built right to left, reversed at the end
  for (std::size_t i = k; i-- > 0;) {
    if (dominated[i]) {
      out.values[i] = 0;
      rev.push_back('0');
      continue;
    }
    out.values[i] = seq[i];
    const int delta = next_undominated < 0 ? seq[i] : seq[i] - next_undominated;
    assert(delta >= 0);
    rev.push_back('#');
    rev.append(static_cast<std::size_t>(delta), '1');
    next_undominated = seq[i];
  }
  out.word.assign(rev.rbegin(), rev.rend());
  return out;
}

std::vector<int> decode_deltas(const std::string& word) {
  // First pass: split into "0" markers and unary delta blocks.
  struct Pos {
    bool dominated;
    int delta;
  };
  std::vector<Pos> positions;
  std::size_t i = 0;
  while (i < word.size()) {
    if (word[i] == '0') {
      positions.push_back({true, 0});
      ++i;
    } else {
      int delta = 0;
      while (i < word.size() && word[i] == '1') {
        ++delta;
        ++i;
      }
      if (i == word.size() || word[i] != '#')
        throw MalformedEncoding("unterminated delta block at position " + std::to_string(i));
      positions.push_back({false, delta});
      ++i;
    }
  }
  // Undominated values accumulate from the right.
  std::vector<int> values(positions.size());
  int acc = 0;
  bool seen = false;
  for (std::size_t p = positions.size(); p-- > 0;) {
    if (positions[p].dominated) continue;
    acc = seen ? acc + positions[p].delta : positions[p].delta;
    seen = true;
    values[p] = acc;
  }
  if (encode_deltas(values).word != word)
    throw MalformedEncoding("word is not in the image of the encoder");
  return values;
}

namespace {

struct TreeMeta {
  std::vector<NodeId> parent;
  std::vector<std::int64_t> size;
  std::vector<NodeId> heavy;  // heavier child, ties to the left; kNoNode for leaves
};

TreeMeta analyze(const BinaryTree& t) {
  TreeMeta m;
  m.parent.assign(t.nodes.size(), kNoNode);
  m.size.assign(t.nodes.size(), 1);
  m.heavy.assign(t.nodes.size(), kNoNode);
  auto sz = fold_tree(
      t, [](NodeId) { return std::int64_t{1} ; },
      [](std::int64_t a, std::int64_t b) { return a + b + 1; });
  m.size = sz;
  for (NodeId v = 0; v < static_cast<NodeId>(t.nodes.size()); ++v) {
    if (t.nodes[v].is_leaf()) continue;
    m.parent[t.nodes[v].left] = v;
    m.parent[t.nodes[v].right] = v;
    m.heavy[v] =
        sz[t.nodes[v].right] > sz[t.nodes[v].left] ? t.nodes[v].right : t.nodes[v].left;
  }
  return m;
}

}  // namespace

LowspaceResult strahler_lowspace(const std::string& term, const LowspaceObserver& observer) {
  const BinaryTree t = parse_term(term);
  const TreeMeta meta = analyze(t);

  std::int64_t position_bits = 1;
  while ((std::int64_t{1} << position_bits) < static_cast<std::int64_t>(t.nodes.size()))
    ++position_bits;
  constexpr std::int64_t kFlagBits = 8;

  std::vector<int> stack;               // Strahler numbers of completed heavy siblings
  std::vector<std::int64_t> stack_sz;   // their sizes (instrumentation only)
  LowspaceResult res;

  auto probe = [&] {
    // Encoded word length is count + current maximum (deltas telescope).
    const int smax = stack.empty() ? 0 : *std::max_element(stack.begin(), stack.end());
    const std::int64_t bits =
        position_bits + 2 * (static_cast<std::int64_t>(stack.size()) + smax) + kFlagBits;
    res.peak_state_bits = std::max(res.peak_state_bits, bits);
    if (observer) observer(stack, stack_sz);
  };

  NodeId pos = t.root;
  probe();
  for (;;) {
    while (!t.nodes[pos].is_leaf()) {
      pos = meta.heavy[pos];
      probe();
    }
    int value = 0;
    // Bubble the completed subtree value up the path.
    for (;;) {
      if (pos == t.root) {
        res.value = value;
        probe();
        return res;
      }
      const NodeId par = meta.parent[pos];
      if (pos == meta.heavy[par]) {
        stack.push_back(value);
        stack_sz.push_back(meta.size[pos]);
        pos = t.nodes[par].left == pos ? t.nodes[par].right : t.nodes[par].left;
        probe();
        break;
      }
      value = s_op(stack.back(), value);
      stack.pop_back();
      stack_sz.pop_back();
      pos = par;
      probe();
    }
  }
}

BinaryTree ExprTree::shape() const {
  BinaryTree t;
  t.nodes.reserve(nodes.size());
  for (const auto& n : nodes) t.nodes.push_back({n.left, n.right});
  t.root = root;
  return t;
}

namespace {

struct ExprTokens {
  std::vector<std::string> toks;
  std::size_t at = 0;
  const std::string& peek() {
    static const std::string kEnd = "";
    return at < toks.size() ? toks[at] : kEnd;
  }
  std::string next() {
    if (at >= toks.size()) throw InputError("unexpected end of expression");
    return toks[at++];
  }
};

NodeId parse_expr_node(ExprTokens& ts, ExprTree& e) {
  std::string tok = ts.next();
  if (tok == ")") throw InputError("unexpected ')' in expression");
  if (tok != "(") {
    e.nodes.push_back({kNoNode, kNoNode, 0, tok});
    return static_cast<NodeId>(e.nodes.size() - 1);
  }
  const std::string op = ts.next();
  if (op != "+" && op != "*") throw InputError("unknown operator '" + op + "'");
  const NodeId id = static_cast<NodeId>(e.nodes.size());
  e.nodes.push_back({kNoNode, kNoNode, op[0], ""});
  const NodeId l = parse_expr_node(ts, e);
  const NodeId r = parse_expr_node(ts, e);
  if (ts.next() != ")") throw InputError("expected ')' after two operands");
  e.nodes[id].left = l;
  e.nodes[id].right = r;
  return id;
}

}  // namespace

ExprTree parse_expr(const std::string& text) {
  ExprTokens ts;
  std::string cur;
  for (const char c : text) {
    if (c == '(' || c == ')') {
      if (!cur.empty()) ts.toks.push_back(std::exchange(cur, {}));
      ts.toks.push_back(std::string(1, c));
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) ts.toks.push_back(std::exchange(cur, {}));
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) ts.toks.push_back(cur);
  ExprTree e;
  e.root = parse_expr_node(ts, e);
  if (ts.at != ts.toks.size()) throw InputError("trailing tokens after expression");
  return e;
}

namespace {

// Ershov numbers: 1 at leaves, parent = equal children ? +1 : max.
std::vector<int> ershov_numbers(const ExprTree& e) {
  std::vector<int> num(e.nodes.size(), 0);
  std::vector<std::pair<NodeId, bool>> work{{e.root, false}};
  while (!work.empty()) {
    auto [v, expanded] = work.back();
    work.pop_back();
    if (e.nodes[v].is_leaf()) {
      num[v] = 1;
    } else if (!expanded) {
      work.push_back({v, true});
      work.push_back({e.nodes[v].left, false});
      work.push_back({e.nodes[v].right, false});
    } else {
      num[v] = s_op(num[e.nodes[v].left] - 1, num[e.nodes[v].right] - 1) + 1;
    }
  }
  return num;
}

void gen(const ExprTree& e, const std::vector<int>& num, NodeId v, int base,
         StraightLineProgram& out) {
  const auto& n = e.nodes[v];
  if (n.is_leaf()) {
    out.stmts.push_back({true, base, n.operand, 0, 0, 0});
    return;
  }
  const int el = num[n.left], er = num[n.right];
  if (er > el) {
    // Right side is heavier: compute it first so its register is reused.
    gen(e, num, n.right, base, out);
    gen(e, num, n.left, base + 1, out);
    out.stmts.push_back({false, base, "", base + 1, base, n.op});
  } else {
    gen(e, num, n.left, base, out);
    gen(e, num, n.right, base + 1, out);
    out.stmts.push_back({false, base, "", base, base + 1, n.op});
  }
}

}  // namespace

StraightLineProgram codegen(const ExprTree& e) {
  const auto num = ershov_numbers(e);
  StraightLineProgram p;
  gen(e, num, e.root, 0, p);
  p.result_register = 0;
  p.register_count = num[e.root];
  p.ershov = num[e.root];
  p.strahler = num[e.root] - 1;
  return p;
}

std::string StraightLineProgram::to_text() const {
  std::ostringstream out;
  for (const auto& st : stmts) {
    if (st.is_load)
      out << "r" << st.reg << " := load " << st.operand << "\n";
    else
      out << "r" << st.reg << " := r" << st.lhs << " " << st.op << " r" << st.rhs << "\n";
  }
  return out.str();
}

std::uint64_t run_program(const StraightLineProgram& p,
                          const std::function<std::uint64_t(const std::string&)>& env) {
  std::vector<std::uint64_t> regs(static_cast<std::size_t>(p.register_count), 0);
  for (const auto& st : p.stmts) {
    if (st.is_load)
      regs.at(st.reg) = env(st.operand);
    else
      regs.at(st.reg) =
          st.op == '+' ? regs.at(st.lhs) + regs.at(st.rhs) : regs.at(st.lhs) * regs.at(st.rhs);
  }
  return regs.at(p.result_register);
}

std::uint64_t eval_expr(const ExprTree& e,
                        const std::function<std::uint64_t(const std::string&)>& env) {
  std::vector<std::uint64_t> val(e.nodes.size(), 0);
  std::vector<std::pair<NodeId, bool>> work{{e.root, false}};
  while (!work.empty()) {
    auto [v, expanded] = work.back();
    work.pop_back();
    if (e.nodes[v].is_leaf()) {
      val[v] = env(e.nodes[v].operand);
    } else if (!expanded) {
      work.push_back({v, true});
      work.push_back({e.nodes[v].left, false});
      work.push_back({e.nodes[v].right, false});
    } else {
      val[v] = e.nodes[v].op == '+' ? val[e.nodes[v].left] + val[e.nodes[v].right]
                                    : val[e.nodes[v].left] * val[e.nodes[v].right];
    }
  }
  return val[e.root];
}

}  // namespace strahler
