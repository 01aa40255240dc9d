#ifndef STRAHLER_ERRORS_HPP
#define STRAHLER_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace strahler {

/// Input that fails to parse or violates a structural invariant (CLI exit 1).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A work limit was hit before the operation could finish (CLI exit 2).
struct LimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedTerm : InputError {
  std::size_t position;
  MalformedTerm(std::size_t pos, const std::string& what)
      : InputError("malformed term at position " + std::to_string(pos) + ": " + what),
        position(pos) {}
};

struct NotATree : InputError {
  using InputError::InputError;
};

struct MalformedEncoding : InputError {
  using InputError::InputError;
};

struct NotLayered : InputError {
  using InputError::InputError;
};

struct InvalidNodes : InputError {
  using InputError::InputError;
};

struct MalformedInstance : InputError {
  using InputError::InputError;
};

struct MalformedQbf : InputError {
  using InputError::InputError;
};

/// The grammar has no derivation tree for the queried nonterminal.
struct Unproductive : InputError {
  using InputError::InputError;
};

struct BudgetExceeded : LimitError {
  using LimitError::LimitError;
};

struct LimitExceeded : LimitError {
  using LimitError::LimitError;
};

/// k > floor(log2 leaves): the threshold question is trivially false and the
/// comparison circuit is not built. Reported distinctly from a false answer.
struct ThresholdTooLarge : std::runtime_error {
  int k;
  int max_k;
  ThresholdTooLarge(int k_, int max_k_)
      : std::runtime_error("threshold " + std::to_string(k_) +
                           " exceeds floor(log2 leaves) = " + std::to_string(max_k_)),
        k(k_), max_k(max_k_) {}
};

}  // namespace strahler

#endif
