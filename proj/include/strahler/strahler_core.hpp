#ifndef STRAHLER_STRAHLER_CORE_HPP
#define STRAHLER_STRAHLER_CORE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "strahler/tree.hpp"

namespace strahler {

/// Bottom-up evaluation of the tree under s_op, leaves valued 0. Iterative.
int strahler_naive(const BinaryTree& t);

/// True iff the complete binary tree of depth k embeds into t, edges mapped to
/// nonempty, disjoint-below paths. Explicit top-down search over embedding
/// positions, independent of the s_op recursion.
bool embed_oracle(const BinaryTree& t, int k);

/// Word over {0,1,#} encoding a sequence of naturals: dominated positions
/// (some later value is strictly larger) print as "0"; each undominated value
/// prints its delta to the next undominated value (the value itself for the
/// last one) in unary followed by '#'. Encoded length = length + max value.
struct DeltaEncodedStack {
  std::string word;
  std::vector<int> values;  // the sequence the word decodes to (dominated -> 0)
};

DeltaEncodedStack encode_deltas(const std::vector<int>& seq);

/// Inverse of encode on its image; throws MalformedEncoding on any word encode
/// cannot produce. Dominated positions come back as 0.
std::vector<int> decode_deltas(const std::string& word);

struct LowspaceResult {
  int value = 0;
  /// Max over the run of position bits + 2 bits per encoded-stack symbol + a
  /// small constant for the direction flag.
  std::int64_t peak_state_bits = 0;
};

/// One probe per traversal event: Strahler numbers and sizes of the maximal
/// completely-traversed subtrees, oldest first.
using LowspaceObserver =
    std::function<void(const std::vector<int>& stack_values,
                       const std::vector<std::int64_t>& stack_sizes)>;

/// Depth-first evaluation that enters the larger subtree first (ties go left),
/// keeping only a position, a direction flag and the delta-encoded stack of
/// completed-subtree values.
LowspaceResult strahler_lowspace(const std::string& term,
                                 const LowspaceObserver& observer = nullptr);

/// Expression tree for code generation: leaves name operands, internal nodes
/// carry '+' or '*'.
struct ExprTree {
  struct Node {
    NodeId left = kNoNode;
    NodeId right = kNoNode;
    char op = 0;          // internal nodes
    std::string operand;  // leaves
    bool is_leaf() const { return left == kNoNode; }
  };
  std::vector<Node> nodes;
  NodeId root = 0;

  /// The operator shape with operands forgotten.
  BinaryTree shape() const;
};

/// S-expression syntax, e.g. (* (+ x1 x2) (+ x3 x4)).
ExprTree parse_expr(const std::string& text);

struct StraightLineProgram {
  struct Stmt {
    bool is_load = false;
    int reg = 0;
    std::string operand;  // loads
    int lhs = 0, rhs = 0;  // ops
    char op = 0;
  };
  std::vector<Stmt> stmts;
  int result_register = 0;
  int register_count = 0;  // the Ershov number of the expression shape
  int ershov = 0;          // st(shape) + 1
  int strahler = 0;        // st(shape)

  std::string to_text() const;
};

/// Emits a program evaluating e with exactly st(shape)+1 registers: the
/// subtree with the larger Strahler number is evaluated first and its result
/// register is reused. One statement per tree node.
StraightLineProgram codegen(const ExprTree& e);

/// Register-machine run over uint64 arithmetic; operands looked up by name.
std::uint64_t run_program(const StraightLineProgram& p,
                          const std::function<std::uint64_t(const std::string&)>& env);

/// Direct expression evaluation for cross-checking program runs.
std::uint64_t eval_expr(const ExprTree& e,
                        const std::function<std::uint64_t(const std::string&)>& env);

}  // namespace strahler

#endif
