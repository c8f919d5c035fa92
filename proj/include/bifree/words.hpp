#pragma once

#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bifree/hermitian.hpp"

namespace bifree {

enum class Side { kLeft, kRight };

/// One letter of a left/right word. Indices are 0-based; text forms use
/// 1-based X<k> (left) and Y<k> (right).
struct Letter {
  Side side = Side::kLeft;
  int index = 0;
  auto operator<=>(const Letter&) const = default;
};

inline Letter left(int index) { return {Side::kLeft, index}; }
inline Letter right(int index) { return {Side::kRight, index}; }

/// A word C_{k1} ... C_{kp} of left and right multiplication operators.
struct LRWord {
  std::vector<Letter> tokens;

  std::size_t size() const { return tokens.size(); }
  auto operator<=>(const LRWord&) const = default;

  /// Throws InvalidArgument if empty or an index is outside [0, n) / [0, m).
  void validate(int n, int m) const;

  /// "X1Y2X1" style, 1-based.
  std::string to_string() const;
  static LRWord parse(std::string_view text);
};

/// The moment phi(X_{i1}...X_{ip} Y_{j1}...Y_{jq}): all lefts, then all rights.
struct ReducedWord {
  std::vector<int> left;
  std::vector<int> right;

  int degree() const { return static_cast<int>(left.size() + right.size()); }
  auto operator<=>(const ReducedWord&) const = default;

  void validate(int n, int m) const;

  LRWord to_lr_word() const;
  /// Collects the left letters and the right letters of `word` in order.
  static ReducedWord from_lr_word(const LRWord& word);

  /// "X1X2|Y1" style, 1-based; either side may be empty ("X1|", "|Y2").
  std::string to_string() const;
  static ReducedWord parse(std::string_view text);
};

/// All reduced words with p + q <= max_degree (p, q >= 0, p + q >= 1), in
/// order of degree, then p descending, then lexicographic indices.
std::vector<ReducedWord> enumerate_reduced_words(int n, int m, int max_degree);

/// All words over `alphabet_size` letters of length 1..max_length, ordered by
/// length then lexicographically.
std::vector<std::vector<int>> enumerate_words(int alphabet_size, int max_length);

/// tau_d of (A-product in order of appearance) * (B-product in reverse order
/// of appearance). This is the Def.-of-microstates moment tau_d(C_{k1}...C_{kp}(I)).
Complex eval_lr_word_complex(const LRWord& word, std::span<const HermitianMatrix> lefts,
                             std::span<const HermitianMatrix> rights);

/// Real-valued form of eval_lr_word_complex. For words whose flattened letter
/// sequence is invariant under reversal up to rotation, the value is real by
/// construction and an imaginary residue above 1e-10 raises
/// NumericalCorruption. Other words may have genuinely complex values; a
/// visible imaginary part there raises InvalidArgument.
double eval_lr_word(const LRWord& word, std::span<const HermitianMatrix> lefts,
                    std::span<const HermitianMatrix> rights);

/// True if the value of `word` is real for every self-adjoint input.
bool is_reversal_symmetric(const LRWord& word);

/// Word of left/right actions on M_{d1} (x) M_{d2} applied to the identity,
/// then the state tau_{d1} (x) (tau_{d2} o m). Inputs are d1*d2 square
/// matrices, block (a, b) of size d2 holding the M_{d2} component at e_ab.
Complex eval_generalized_lr_word_complex(const LRWord& word, int d1, int d2,
                                         std::span<const HermitianMatrix> lefts,
                                         std::span<const HermitianMatrix> rights);

double eval_generalized_lr_word(const LRWord& word, int d1, int d2,
                                std::span<const HermitianMatrix> lefts,
                                std::span<const HermitianMatrix> rights);

}  // namespace bifree
