#ifndef STRAHLER_SUCCINCT_HPP
#define STRAHLER_SUCCINCT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "strahler/context_algebra.hpp"
#include "strahler/tree.hpp"

namespace strahler {

inline constexpr std::int64_t kDefaultNodeBudget = std::int64_t{1} << 22;

/// Rooted binary DAG: ordered child lists of length 0 or 2, children may
/// repeat, sharing allowed. Normalized on construction from files: nodes not
/// reachable from the root are dropped, cycles are rejected.
struct Dag {
  struct Node {
    std::vector<NodeId> kids;  // empty or exactly two
    bool is_leaf() const { return kids.empty(); }
  };
  std::vector<Node> nodes;
  std::vector<std::string> names;  // parallel to nodes; used for I/O
  NodeId root = 0;
};

/// Dag file format mirrors the adjacency format but permits sharing.
Dag parse_dag_file(const std::string& text);
std::string print_dag_file(const Dag& d);
Dag dag_from_tree(const BinaryTree& t);

/// Number of nodes of unfold(d), saturated at 2^62.
std::int64_t dag_unfold_size(const Dag& d);

/// Unfolds shared substructure into a tree; throws BudgetExceeded if the
/// result would have more than node_budget nodes.
BinaryTree unfold(const Dag& d, std::int64_t node_budget = kDefaultNodeBudget);

/// st(unfold(d)) without unfolding: one s_op evaluation per node bottom-up.
int dag_strahler(const Dag& d);

/// Statement of the bounded-stack search over a Dag.
struct Statement {
  enum class Kind { AtLeast, Equals };
  Kind kind;
  NodeId node;
  int m;
};

struct StatementSearchResult {
  bool accepted = false;
  std::int64_t accepting_paths = 0;
  /// Set when some step broke the stack discipline: num values must not
  /// increase from stack bottom to active, each integer at most twice.
  bool invariant_violated = false;
  /// One snapshot per search step: the stack (bottom first) followed by the
  /// active statement as the last element.
  std::vector<std::vector<Statement>> snapshots;
};

/// Deterministic backtracking realization of the active-statement/stack
/// search deciding st >= k. Branches per step are exclusive, so at most one
/// computation path accepts; the trace lets tests check that and the stack
/// invariants.
StatementSearchResult dag_statement_search(const Dag& d, int k, bool keep_snapshots = true);

/// Tree straight-line program. Tree variables (N0) produce trees; context
/// variables (N1) produce one-hole contexts. Rule shapes:
///   N0: a | b(B,C) | D(C)        N1: b(x,B) | b(B,x) | D(C(x))
struct Tslp {
  enum class RuleKind { Leaf, Pair, Apply, CtxLeft, CtxRight, Compose };
  struct Rule {
    RuleKind kind = RuleKind::Leaf;
    NodeId first = kNoNode;   // Pair: left; Apply/Compose: outer; Ctx*: subtree
    NodeId second = kNoNode;  // Pair: right; Apply/Compose: inner
  };
  std::vector<Rule> rules;
  std::vector<std::string> names;
  std::vector<bool> is_context;  // N1 membership, parallel to rules
  NodeId start = 0;

  std::size_t variable_count() const { return rules.size(); }
};

/// Checks rule-shape/class consistency, acyclicity and reachability from the
/// start variable; throws InputError otherwise.
void validate(const Tslp& g);

/// A dag is a TSLP without context variables: its unfolding is the value.
Tslp tslp_from_dag(const Dag& d);

/// Tslp file format: `start <A>` then one rule per line, e.g. `A = b(B,C)`,
/// `E = D(C(x))`. Variable classes are inferred from rule shapes.
Tslp parse_tslp_file(const std::string& text);
std::string print_tslp_file(const Tslp& g);

/// Height of the rule DAG (edges from a variable to the variables in its rule).
int tslp_depth(const Tslp& g);
/// Size of the rule DAG: sum over variables of 1 + number of rule references.
std::int64_t tslp_size(const Tslp& g);

/// Node count of val(g), saturated at 2^62.
std::int64_t tslp_val_size(const Tslp& g);
/// Leaf count of val(g), saturated at 2^62; linear counting pass, no unfolding.
std::int64_t tslp_leaf_count(const Tslp& g);

/// Expands val(g); throws BudgetExceeded beyond node_budget. Iterative, so
/// very deep values (e.g. squared-context caterpillars) are fine.
BinaryTree tslp_val(const Tslp& g, std::int64_t node_budget = kDefaultNodeBudget);

/// st and [l,h] tables computed bottom-up by the evaluation rules; no
/// unfolding, one constant-arity step per variable.
struct TslpTables {
  std::vector<int> st;          // tree variables (others 0)
  std::vector<LhFunction> lh;   // context variables (others [0,0])
};

TslpTables tslp_analyze(const Tslp& g);
int tslp_strahler(const Tslp& g);

/// Decides st >= k by walking the caterpillar spines of Apply rules with all
/// values capped at k+1; context variables are evaluated pointwise as value
/// transformers, memoized per (variable, entering value). Independent of the
/// [l,h] representation used by tslp_strahler.
bool tslp_at_least_via_paths(const Tslp& g, int k);

/// Balances a tree into a TSLP with val = t, size <= C1*n and rule-DAG depth
/// <= C2*log2(n+1). Recursive heavy-path decomposition; every spine is split
/// by weight-balanced bisection, so a node of weight w ends up O(log(W/w))
/// deep in its spine tower. Documented constants: C1 = 8, C2 = 4.
Tslp balance(const BinaryTree& t);

}  // namespace strahler

#endif
