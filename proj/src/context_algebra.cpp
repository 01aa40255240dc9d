#include "strahler/context_algebra.hpp"

#include <cassert>

namespace strahler {

int apply_lh(const LhFunction& f, int x) {
  assert(0 <= f.ell && f.ell <= f.h);
  if (x < f.ell) return f.h;
  if (x <= f.h) return f.h + 1;
  return x;
}

LhFunction compose_lh(const LhFunction& g, const LhFunction& f) {
  assert(0 <= g.ell && g.ell <= g.h);
  assert(0 <= f.ell && f.ell <= f.h);
  const int m = g.ell, i = g.h;
  const int ell = f.ell, h = f.h;
  if (h + 2 <= m) return g;
  if (h + 1 == m) return {ell, i};
  if (m <= h && h <= i) return {0, i};
  assert(i < h);
  return f;
}

LhFunction lh_from_sibling(int m) {
  assert(m >= 0);
  return {m, m};
}

}  // namespace strahler
