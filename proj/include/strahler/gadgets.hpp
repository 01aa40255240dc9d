#ifndef STRAHLER_GADGETS_HPP
#define STRAHLER_GADGETS_HPP

#include <array>
#include <string>
#include <vector>

#include "strahler/grammar.hpp"
#include "strahler/succinct.hpp"
#include "strahler/tree.hpp"

namespace strahler {

/// Boolean formula over {and, or} with constant or literal leaves.
struct BoolFormula {
  enum class Kind { And, Or, ConstTrue, ConstFalse, Lit };
  struct Node {
    Kind kind;
    int left = -1, right = -1;
    int var = 0;  // literals, 1-based
    bool negated = false;
  };
  std::vector<Node> nodes;
  int root = 0;
};

/// S-expressions: (and _ _), (or _ _), constants 0/1; literals x<i> and
/// (not x<i>) when allow_literals is set.
BoolFormula parse_formula(const std::string& text, bool allow_literals = false);
std::string print_formula(const BoolFormula& f);

int formula_depth(const BoolFormula& f);
/// True when every root-to-leaf path has the same length.
bool is_uniform_depth(const BoolFormula& f);

/// Deepens every shallow leaf z by replacing it with (z or z) until all paths
/// have the original maximum length. Truth value is unchanged.
BoolFormula pad_uniform(const BoolFormula& f);

/// Constants-only evaluation; literals resolved through assignment (1-based).
bool eval_formula(const BoolFormula& f, const std::vector<bool>& assignment = {});

struct FormulaGadget {
  BinaryTree tree;  // fully expanded
  Dag dag;          // arguments shared
  int predicted;    // 2d+1 when the formula is true, else 2d
};

/// Conjunction becomes s(s(x,x),s(y,y)), disjunction s(s(s(x,x),y),s(x,s(y,y))),
/// the constant true s(0,0) and false a leaf. Requires uniform depth and
/// constant leaves.
FormulaGadget formula_to_tree(const BoolFormula& f);

/// Monotone circuit with fan-in-2 and/or gates over constant inputs.
struct LayeredCircuit {
  enum class Kind { And, Or, ConstTrue, ConstFalse };
  struct Gate {
    Kind kind;
    int a = -1, b = -1;
  };
  std::vector<Gate> gates;
  std::vector<std::string> names;
  int output = 0;
};

/// Circuit file: line 1 `output <id>`; lines `<id> -> and <id> <id>`,
/// `<id> -> or <id> <id>`, `<id> -> 0`, `<id> -> 1`.
LayeredCircuit parse_circuit_file(const std::string& text);

struct CircuitGadget {
  Dag dag;
  int predicted;
};

/// Gate-wise gadget substitution with sharing; throws NotLayered unless all
/// input-to-output paths have equal length.
CircuitGadget layered_circuit_to_dag(const LayeredCircuit& c);

struct MajorityGadget {
  std::string term;
  int predicted;  // 3 when zeros reach half, else 4
};

/// The bit-counting reduction: w is doubled, zero runs become caterpillar
/// blocks b^k a^k, ones become spine nodes, and the suffix fills the holes
/// with leaves plus one Strahler-3 tree at the pivot position.
MajorityGadget majority_tree(const std::string& bits);

struct LineGraphGadget {
  AdjacencyTree tree;
  int predicted;  // 3 when u precedes v, else 2
};

/// Order-to-tree reduction: one leaf child per spine node, a Strahler-2 tree
/// below u and a Strahler-1 tree below v; a fresh sink is appended when u or v
/// is last. Throws InvalidNodes when u or v is missing (or u = v).
LineGraphGadget linegraph_tree(const std::vector<std::string>& order, const std::string& u,
                               const std::string& v);

/// Line-graph file: line 1 `nodes <id>...` (in order), line 2 `query <u> <v>`.
struct LineGraphInstance {
  std::vector<std::string> order;
  std::string u, v;
};
LineGraphInstance parse_linegraph_file(const std::string& text);

struct DagReachTslpGadget {
  Tslp tslp;
  int predicted;  // 2 when the target is reachable, else 1
};

/// Reachability as a TSLP whose value is a caterpillar: b^m a^{m+1} when the
/// target leaf is unreachable, b^m a^i b a^j otherwise. Root must have degree
/// two and the target must be a leaf.
DagReachTslpGadget dag_reach_tslp(const Dag& d, const std::string& target);

struct DagReachGrammarGadget {
  CnfGrammar grammar;
  PCertificate certificate;
  int predicted;  // max st: 2 when reachable, else 1
};

/// Reachability as a CNF grammar with the target expanding to BB, B -> AA.
DagReachGrammarGadget dag_reach_grammar(const Dag& d, const std::string& target);

/// Dag-reachability file: line 1 `target <id>`, then a dag file.
struct DagReachInstance {
  Dag dag;
  std::string target;
};
DagReachInstance parse_dagreach_file(const std::string& text);

struct X3hsInstance {
  int n = 0;
  std::vector<std::array<int, 3>> sets;
};

/// X3HS file: line 1 `n <int>`, then lines `set a b c`.
X3hsInstance parse_x3hs_file(const std::string& text);

struct X3hsGadget {
  CnfGrammar grammar;
  bool predicted;    // an exact hitting set exists
  bool degenerate;   // empty set family: the construction's premise fails
};

/// Hitting-set grammar: chains A_k -> I_k E | O_k E pick the candidate set,
/// clause productions B_j -> B_{j+1} [O_a[I_b I_c]] (all six orderings) force
/// exactly-once hits through acyclicity. Predicted by subset brute force.
X3hsGadget x3hs_grammar(const X3hsInstance& inst);

/// True iff some subset hits every set exactly once; n <= 20.
bool exact_hitting_set_exists(const X3hsInstance& inst);

struct Qbf {
  std::vector<bool> exists;  // quantifier per variable x1..xn, true = exists
  BoolFormula matrix;        // literals over x1..xn
};

/// QBF file: line 1 `E x1 A x2 ...`; line 2 matrix s-expression.
Qbf parse_qbf_file(const std::string& text);

/// Naive recursive evaluation.
bool qbf_eval(const Qbf& q);

struct QbfGadget {
  CnfGrammar grammar;
  int k;              // 2h + 2n + 2
  BinaryTree t_big;   // the unique maximal acyclic derivation tree
  bool predicted;     // truth of the formula
};

/// Quantifier rules implement the and/or gadgets over F_i/T_i, literal leaves
/// carry the Strahler-2/1 subgadgets, and t_big expands quantifier-produced
/// F_i/T_i with A_{i+1}E and leaf-produced ones with eps.
QbfGadget qbf_grammar(const Qbf& q);

}  // namespace strahler

#endif
