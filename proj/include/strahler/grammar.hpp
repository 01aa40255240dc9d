#ifndef STRAHLER_GRAMMAR_HPP
#define STRAHLER_GRAMMAR_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "strahler/tree.hpp"

namespace strahler {

/// Chomsky-normal-form grammar of this codebase's flavor: productions are
/// A -> eps or A -> B C only, so derivation trees are binary and every derived
/// word is empty.
struct CnfGrammar {
  struct Production {
    NodeId lhs;
    bool eps = false;
    NodeId b = kNoNode, c = kNoNode;
  };
  std::vector<std::string> names;
  std::vector<Production> prods;
  NodeId start = 0;

  std::size_t nonterminal_count() const { return names.size(); }
};

/// Grammar file format: `start <S>` then `A -> B C` | `A -> eps`.
CnfGrammar parse_grammar_file(const std::string& text);
std::string print_grammar_file(const CnfGrammar& g);

/// Least fixpoint: A is productive iff A -> eps, or A -> BC with B, C productive.
std::vector<bool> productive_set(const CnfGrammar& g);

/// Per-nonterminal production choice whose witness graph is acyclic. Covers
/// every productive nonterminal (first witnessing production by fixpoint
/// round, which makes the graph acyclic).
struct PCertificate {
  std::vector<int> choice;  // production index per nonterminal, -1 = no entry
};

/// nullopt when some nonterminal reachable from the start is unproductive.
std::optional<PCertificate> derive_p_certificate(const CnfGrammar& g);

/// Checks that f covers all reachable nonterminals, picks real productions,
/// and has an acyclic witness graph.
bool verify_p_certificate(const CnfGrammar& g, const PCertificate& f);

/// Supremum of st over all derivation trees.
struct MaxStrahler {
  bool infinite = false;
  int value = 0;
};

/// Capped fixpoint over the productive restriction: values above |N| certify a
/// reachable self-doubling nonterminal, hence an unbounded supremum. Throws
/// Unproductive when the start symbol has no derivation tree.
MaxStrahler max_strahler(const CnfGrammar& g);

/// Nonterminals A with A =>* AA, through the nullable-context reachability
/// closure (here nullable = productive: every terminal word is empty).
std::vector<bool> self_doubling(const CnfGrammar& g);

/// Maximum st over acyclic derivation trees (no nonterminal repeated on a
/// root-to-leaf path); nullopt when no acyclic derivation tree exists. Memoized
/// on (A, U ∩ reach(A)); at most 64 nonterminals supported.
std::optional<int> acyclic_max_strahler(const CnfGrammar& g);

/// Triple-based decision procedure for st >= k over acyclic trees; cross-check
/// for acyclic_max_strahler.
bool acyclic_at_least(const CnfGrammar& g, int k);

/// Derivation tree with nonterminal labels, for the enumeration oracle.
struct DerivationTree {
  struct Node {
    NodeId nonterminal;
    int left = -1, right = -1;
  };
  std::vector<Node> nodes;
  int root = 0;

  BinaryTree shape() const;
};

/// All acyclic derivation trees of g (a finite set); throws LimitExceeded when
/// more than max_count exist.
std::vector<DerivationTree> enumerate_acyclic_trees(const CnfGrammar& g,
                                                    std::size_t max_count);

/// Supremum of st over derivation trees of depth <= depth_cap (depth in
/// production applications); nullopt if there is none.
std::optional<int> brute_force_max_strahler(const CnfGrammar& g, int depth_cap);

}  // namespace strahler

#endif
