#include "doctest.h"

#include <map>

#include "strahler/errors.hpp"
#include "strahler/strahler_core.hpp"
#include "test_support.hpp"

using namespace strahler;
using namespace strahler::testing;

namespace {
const std::string kFig1 = "bbbaabbaaabbaabbaaa";

int fold_right(const std::vector<int>& seq) {
  if (seq.empty()) return -1;
  int acc = seq.back();
  for (std::size_t i = seq.size() - 1; i-- > 0;) acc = s_op(seq[i], acc);
  return acc;
}
}  // namespace

TEST_SUITE("strahler_core") {

TEST_CASE("strahler_naive on the documented shapes") {
  CHECK(strahler_naive(parse_term("a")) == 0);
  CHECK(strahler_naive(parse_term(kFig1)) == 3);
  for (int k = 0; k <= 10; ++k) CHECK(strahler_naive(complete_tree(k)) == k);
  for (int n : {1, 2, 3, 17, 100}) CHECK(strahler_naive(left_caterpillar(n)) == 1);
}

TEST_CASE("s_op is commutative and monotone") {
  for (int x = 0; x <= 20; ++x)
    for (int y = 0; y <= 20; ++y) {
      REQUIRE(s_op(x, y) == s_op(y, x));
      REQUIRE(s_op(x, y) <= s_op(x + 1, y));
      REQUIRE(s_op(x, y) <= s_op(x, y + 1));
    }
}

TEST_CASE("log bound on the Strahler number") {
  Rng rng(11);
  auto check = [](const BinaryTree& t) {
    int log2n = 0;
    for (std::size_t n = t.leaf_count(); n > 1; n >>= 1) ++log2n;
    REQUIRE(strahler_naive(t) <= log2n);
  };
  for (const auto& t : all_trees_up_to(15)) check(t);
  for (int i = 0; i < 200; ++i) check(random_tree_up_to(rng, 2001));
}

TEST_CASE("embed_oracle matches the Strahler number") {
  const BinaryTree fig1 = parse_term(kFig1);
  CHECK(embed_oracle(fig1, 0));
  CHECK(embed_oracle(fig1, 3));
  CHECK_FALSE(embed_oracle(fig1, 4));

  for (const auto& t : all_trees_up_to(15)) {
    const int st = strahler_naive(t);
    for (int k = 0; k <= 5; ++k) REQUIRE(embed_oracle(t, k) == (st >= k));
  }
}

TEST_CASE("delta encoding reproduces the documented word") {
  const std::vector<int> seq{3, 2, 5, 3, 4, 4, 2, 1};
  const DeltaEncodedStack enc = encode_deltas(seq);
  CHECK(enc.word == "001#0#11#1#1#");
  CHECK(enc.values == std::vector<int>{0, 0, 5, 0, 4, 4, 2, 1});
  CHECK(decode_deltas(enc.word) == enc.values);

  CHECK(encode_deltas({}).word == "");
  CHECK(encode_deltas({5}).word == "11111#");
  CHECK(decode_deltas("11111#") == std::vector<int>{5});
}

TEST_CASE("decode rejects words outside the encoder's image") {
  CHECK_THROWS_AS(decode_deltas("1"), MalformedEncoding);    // unterminated block
  CHECK_THROWS_AS(decode_deltas("2#"), MalformedEncoding);   // foreign symbol
  CHECK_THROWS_AS(decode_deltas("0"), MalformedEncoding);    // dominated by nothing
  CHECK_THROWS_AS(decode_deltas("1#0"), MalformedEncoding);  // trailing dominated
  CHECK_THROWS_AS(decode_deltas("0#"), MalformedEncoding);   // 0 not dominated by 0
  // "1##" is fine: it encodes the sequence 1, 0.
  CHECK(decode_deltas("1##") == std::vector<int>{1, 0});
}

TEST_CASE("delta encoding round trips and preserves the fold") {
  Rng rng(31337);
  std::uniform_int_distribution<int> len(0, 12), val(0, 12);
  for (int i = 0; i < 2000; ++i) {
    std::vector<int> seq(len(rng));
    for (auto& v : seq) v = val(rng);
    const DeltaEncodedStack enc = encode_deltas(seq);

    // Encoded length = count + max value.
    const int smax = seq.empty() ? 0 : *std::max_element(seq.begin(), seq.end());
    REQUIRE(enc.word.size() <= seq.size() + static_cast<std::size_t>(smax));

    // Decoding recovers the sequence with dominated entries zeroed.
    std::vector<int> zeroed = seq;
    for (std::size_t p = 0; p < seq.size(); ++p)
      for (std::size_t q = p + 1; q < seq.size(); ++q)
        if (seq[q] > seq[p]) zeroed[p] = 0;
    REQUIRE(decode_deltas(enc.word) == zeroed);

    // Zeroing dominated entries does not change the right-to-left fold.
    if (!seq.empty()) REQUIRE(fold_right(seq) == fold_right(zeroed));
  }
}

TEST_CASE("strahler_lowspace agrees with naive and keeps the stack invariants") {
  CHECK(strahler_lowspace(kFig1).value == 3);
  CHECK(strahler_lowspace("a").value == 0);
  CHECK(strahler_lowspace("a").peak_state_bits < 32);

  Rng rng(4242);
  for (int i = 0; i < 500; ++i) {
    const BinaryTree t = random_tree_up_to(rng, 4095);
    const std::string term = to_term(t);
    bool invariants_ok = true;
    const LowspaceResult r = strahler_lowspace(
        term, [&](const std::vector<int>& values, const std::vector<std::int64_t>& sizes) {
          // Undominated values never increase left to right (collected
          // right-to-left, so the list must be non-decreasing).
          int suffix_max = -1;
          std::vector<int> undominated;
          for (std::size_t p = values.size(); p-- > 0;) {
            if (values[p] >= suffix_max) undominated.push_back(values[p]);
            suffix_max = std::max(suffix_max, values[p]);
          }
          for (std::size_t p = 1; p < undominated.size(); ++p)
            if (undominated[p] < undominated[p - 1]) invariants_ok = false;

          // Heavy-first traversal: each completed subtree dominates the total
          // size of everything completed after it.
          std::int64_t suffix = 0;
          for (std::size_t p = sizes.size(); p-- > 0;) {
            if (sizes[p] < suffix) invariants_ok = false;
            suffix += sizes[p];
          }
        });
    REQUIRE(r.value == strahler_naive(t));
    REQUIRE(invariants_ok);
  }
}

TEST_CASE("lowspace peak state grows like log n") {
  // Doubling sizes: the peak in bits should grow by a bounded additive step,
  // not proportionally.
  Rng rng(5150);
  std::vector<std::int64_t> peaks;
  for (int e = 7; e <= 14; ++e) {
    std::int64_t worst = 0;
    for (int i = 0; i < 8; ++i) {
      const BinaryTree t = random_tree(rng, (1 << e) - 1);
      worst = std::max(worst, strahler_lowspace(to_term(t)).peak_state_bits);
    }
    // Degenerate shapes too.
    worst = std::max(worst, strahler_lowspace(to_term(left_caterpillar((1 << (e - 1)))))
                                .peak_state_bits);
    worst = std::max(worst, strahler_lowspace(to_term(complete_tree(e - 1))).peak_state_bits);
    peaks.push_back(worst);
  }
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    CHECK(peaks[i] - peaks[i - 1] <= 24);  // additive growth per doubling
    CHECK(peaks[i] <= 8 * static_cast<std::int64_t>(i + 7) + 64);
  }
}

TEST_CASE("expression parsing and shapes") {
  const ExprTree e = parse_expr("(* (+ x1 x2) (+ x3 x4))");
  CHECK(e.nodes.size() == 7);
  CHECK(to_term(e.shape()) == "bbaabaa");
  CHECK_THROWS_AS(parse_expr("(+ x1)"), InputError);
  CHECK_THROWS_AS(parse_expr("(- x1 x2)"), InputError);
  CHECK_THROWS_AS(parse_expr("(+ x1 x2) x3"), InputError);
}

TEST_CASE("codegen register counts on the documented expressions") {
  const StraightLineProgram leaf = codegen(parse_expr("x1"));
  CHECK(leaf.stmts.size() == 1);
  CHECK(leaf.ershov == 1);
  CHECK(leaf.strahler == 0);

  const StraightLineProgram balanced = codegen(parse_expr("(* (+ x1 x2) (+ x3 x4))"));
  CHECK(balanced.ershov == 3);
  const StraightLineProgram chain = codegen(parse_expr("(+ x1 (+ x2 (+ x3 x4)))"));
  CHECK(chain.ershov == 2);

  // Brute force confirms minimality for both.
  CHECK(min_registers_oracle(parse_expr("(* (+ x1 x2) (+ x3 x4))").shape()) == 3);
  CHECK(min_registers_oracle(parse_expr("(+ x1 (+ x2 (+ x3 x4)))").shape()) == 2);
}

TEST_CASE("codegen programs compute the right value") {
  Rng rng(2718);
  std::uniform_int_distribution<std::uint64_t> val(0, 9);
  for (int i = 0; i < 200; ++i) {
    const BinaryTree shape = random_tree_up_to(rng, 31);
    // Decorate the shape with operators and operand names.
    ExprTree e;
    e.nodes.resize(shape.nodes.size());
    int leafno = 0;
    std::uniform_int_distribution<int> coin(0, 1);
    for (std::size_t v = 0; v < shape.nodes.size(); ++v) {
      if (shape.nodes[v].is_leaf()) {
        e.nodes[v] = {kNoNode, kNoNode, 0, "x" + std::to_string(++leafno)};
      } else {
        e.nodes[v] = {shape.nodes[v].left, shape.nodes[v].right,
                      coin(rng) ? '+' : '*', ""};
      }
    }
    e.root = shape.root;

    std::map<std::string, std::uint64_t> env;
    for (int j = 1; j <= leafno; ++j) env["x" + std::to_string(j)] = val(rng);
    auto lookup = [&](const std::string& name) { return env.at(name); };

    const StraightLineProgram p = codegen(e);
    REQUIRE(p.stmts.size() == e.nodes.size());
    REQUIRE(run_program(p, lookup) == eval_expr(e, lookup));
    int max_reg = 0;
    for (const auto& st : p.stmts) max_reg = std::max(max_reg, st.reg);
    REQUIRE(max_reg + 1 == p.register_count);
  }
}

TEST_CASE("codegen is register-minimal on all shapes with up to 8 leaves") {
  // The full sweep to 12 leaves runs in the acceptance suite.
  for (const auto& shape : all_trees_up_to(15)) {
    ExprTree e;
    e.nodes.resize(shape.nodes.size());
    int leafno = 0;
    for (std::size_t v = 0; v < shape.nodes.size(); ++v) {
      if (shape.nodes[v].is_leaf())
        e.nodes[v] = {kNoNode, kNoNode, 0, "x" + std::to_string(++leafno)};
      else
        e.nodes[v] = {shape.nodes[v].left, shape.nodes[v].right, '+', ""};
    }
    e.root = shape.root;
    const StraightLineProgram p = codegen(e);
    REQUIRE(p.ershov == min_registers_oracle(shape));
    REQUIRE(p.strahler == strahler_naive(shape));
  }
}

}  // TEST_SUITE
