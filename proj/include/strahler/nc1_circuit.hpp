#ifndef STRAHLER_NC1_CIRCUIT_HPP
#define STRAHLER_NC1_CIRCUIT_HPP

#include <string>
#include <vector>

#include "strahler/succinct.hpp"

namespace strahler {

/// Formal integer variable of the comparison circuit: st of a tree variable,
/// or the l/h parameter of a context variable's [l,h] function.
struct GateVar {
  enum class Field { St, Ell, H };
  NodeId var = kNoNode;
  Field field = Field::St;
  friend bool operator==(const GateVar&, const GateVar&) = default;
};

std::string gate_var_name(const Tslp& g, const GateVar& v);

/// Comparison-gate circuit deciding st(val(g)) >= k. Comparison gates
/// [X <= Y + i] are driven by constant-size subcircuits over gates of lower
/// variables; AND/OR/NOT have fan-in <= 2; gates whose offset exceeds
/// floor(log2 leaves) in absolute value are clamped to constants. The output
/// gate realizes [S_st >= k] as [Z_st <= S_st - k] for a designated leaf
/// variable Z (the fixed orientation for the [X >= i] rewriting).
struct BoolCircuit {
  enum class Kind { True, False, And, Or, Not, Cmp };
  struct Gate {
    Kind kind = Kind::True;
    int a = -1;  // first input; Cmp gates have exactly one input
    int b = -1;  // second input for And/Or
    GateVar x, y;
    int offset = 0;  // Cmp: [x <= y + offset]
  };
  std::vector<Gate> gates;  // topologically ordered (inputs precede users)
  int output = -1;
};

/// Throws ThresholdTooLarge when k > floor(log2 leaves) (the answer is
/// trivially false); requires k >= 0 and a validated TSLP.
BoolCircuit build_circuit(const Tslp& g, int k);

bool eval_circuit(const BoolCircuit& c);

/// Intended truth value of a comparison gate, straight from the evaluation
/// tables: v(x) <= v(y) + offset.
bool gate_semantics(const Tslp& g, const BoolCircuit& c, int gate_id);

/// Every comparison gate's evaluated value equals its semantics.
bool audit_circuit(const Tslp& g, const BoolCircuit& c);

/// Longest wire path, counting every gate as one level.
int circuit_depth(const BoolCircuit& c);

/// One gate per line `g<id>: <kind> <operands>`, final line `output g<id>`.
std::string print_circuit(const Tslp& g, const BoolCircuit& c);

}  // namespace strahler

#endif
