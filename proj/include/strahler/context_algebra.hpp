#ifndef STRAHLER_CONTEXT_ALGEBRA_HPP
#define STRAHLER_CONTEXT_ALGEBRA_HPP

namespace strahler {

/// The operation trees are evaluated under: s(x,y) = x+1 if x = y, max otherwise.
inline int s_op(int x, int y) { return x == y ? x + 1 : (x > y ? x : y); }

/// The unary function computed by a binary context: maps x to h when x < ell,
/// to h+1 when ell <= x <= h, and to x above h. Requires 0 <= ell <= h.
struct LhFunction {
  int ell = 0;
  int h = 0;
  friend bool operator==(const LhFunction&, const LhFunction&) = default;
};

int apply_lh(const LhFunction& f, int x);

/// g after f. The four cases, checked in order, are mutually exclusive and
/// exhaustive for valid operands; violations trip an assertion.
LhFunction compose_lh(const LhFunction& g, const LhFunction& f);

/// The function of a single context node with a sibling subtree of Strahler
/// number m: x -> s(x, m) equals [m,m].
LhFunction lh_from_sibling(int m);

}  // namespace strahler

#endif
