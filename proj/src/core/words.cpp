#include "bifree/words.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "bifree/errors.hpp"

namespace bifree {
namespace {

void check_index(int index, int bound, const char* side) {
  if (index < 0 || index >= bound) {
    throw InvalidArgument(std::string("word index out of range on the ") + side + " side");
  }
}

void append_letters(std::ostringstream& out, char prefix, const std::vector<int>& indices) {
  for (int i : indices) out << prefix << (i + 1);
}

// Parses "X1Y12X3" into letters; rejects anything else.
std::vector<Letter> parse_letters(std::string_view text) {
  std::vector<Letter> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
      continue;
    }
    require(c == 'X' || c == 'Y', "word text must consist of X<k> / Y<k> letters");
    ++pos;
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    require(pos > start, "letter without index in word text");
    const int one_based = std::stoi(std::string(text.substr(start, pos - start)));
    require(one_based >= 1, "word indices are 1-based");
    out.push_back({c == 'X' ? Side::kLeft : Side::kRight, one_based - 1});
  }
  return out;
}

const HermitianMatrix& matrix_for(const Letter& letter, std::span<const HermitianMatrix> lefts,
                                  std::span<const HermitianMatrix> rights) {
  return letter.side == Side::kLeft ? lefts[static_cast<std::size_t>(letter.index)]
                                    : rights[static_cast<std::size_t>(letter.index)];
}

int common_dimension(std::span<const HermitianMatrix> lefts, std::span<const HermitianMatrix> rights) {
  int d = -1;
  auto visit = [&](const HermitianMatrix& a) {
    if (d < 0) d = a.dim();
    require(a.dim() == d, "all matrices must share one dimension");
  };
  for (const auto& a : lefts) visit(a);
  for (const auto& b : rights) visit(b);
  require(d >= 1, "no matrices supplied");
  return d;
}

}  // namespace

void LRWord::validate(int n, int m) const {
  require(!tokens.empty(), "word must have at least one letter");
  for (const auto& t : tokens) {
    if (t.side == Side::kLeft) {
      check_index(t.index, n, "left");
    } else {
      check_index(t.index, m, "right");
    }
  }
}

std::string LRWord::to_string() const {
  std::ostringstream out;
  for (const auto& t : tokens) out << (t.side == Side::kLeft ? 'X' : 'Y') << (t.index + 1);
  return out.str();
}

LRWord LRWord::parse(std::string_view text) { return LRWord{parse_letters(text)}; }

void ReducedWord::validate(int n, int m) const {
  require(degree() >= 1, "reduced word must have p + q >= 1");
  for (int i : left) check_index(i, n, "left");
  for (int j : right) check_index(j, m, "right");
}

LRWord ReducedWord::to_lr_word() const {
  LRWord w;
  w.tokens.reserve(left.size() + right.size());
  for (int i : left) w.tokens.push_back(bifree::left(i));
  for (int j : right) w.tokens.push_back(bifree::right(j));
  return w;
}

ReducedWord ReducedWord::from_lr_word(const LRWord& word) {
  ReducedWord r;
  for (const auto& t : word.tokens) {
    (t.side == Side::kLeft ? r.left : r.right).push_back(t.index);
  }
  return r;
}

std::string ReducedWord::to_string() const {
  std::ostringstream out;
  append_letters(out, 'X', left);
  out << '|';
  append_letters(out, 'Y', right);
  return out.str();
}

ReducedWord ReducedWord::parse(std::string_view text) {
  const auto bar = text.find('|');
  if (bar == std::string_view::npos) return from_lr_word(LRWord::parse(text));
  ReducedWord r;
  for (const auto& l : parse_letters(text.substr(0, bar))) {
    require(l.side == Side::kLeft, "only X letters may precede '|'");
    r.left.push_back(l.index);
  }
  for (const auto& l : parse_letters(text.substr(bar + 1))) {
    require(l.side == Side::kRight, "only Y letters may follow '|'");
    r.right.push_back(l.index);
  }
  return r;
}

std::vector<std::vector<int>> enumerate_words(int alphabet_size, int max_length) {
  std::vector<std::vector<int>> out;
  if (alphabet_size <= 0) return out;
  std::vector<std::vector<int>> layer{{}};
  for (int len = 1; len <= max_length; ++len) {
    std::vector<std::vector<int>> next;
    next.reserve(layer.size() * static_cast<std::size_t>(alphabet_size));
    for (const auto& w : layer) {
      for (int a = 0; a < alphabet_size; ++a) {
        auto ext = w;
        ext.push_back(a);
        next.push_back(std::move(ext));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

std::vector<ReducedWord> enumerate_reduced_words(int n, int m, int max_degree) {
  require(n >= 0 && m >= 0, "variable counts must be non-negative");
  std::vector<ReducedWord> out;
  auto words_of_length = [](int alphabet, int length) {
    std::vector<std::vector<int>> result{{}};
    for (int k = 0; k < length; ++k) {
      std::vector<std::vector<int>> next;
      for (const auto& w : result) {
        for (int a = 0; a < alphabet; ++a) {
          auto ext = w;
          ext.push_back(a);
          next.push_back(std::move(ext));
        }
      }
      result = std::move(next);
    }
    return result;
  };
  for (int deg = 1; deg <= max_degree; ++deg) {
    for (int p = deg; p >= 0; --p) {
      const int q = deg - p;
      if ((p > 0 && n == 0) || (q > 0 && m == 0)) continue;
      for (const auto& l : words_of_length(n, p)) {
        for (const auto& r : words_of_length(m, q)) out.push_back({l, r});
      }
    }
  }
  return out;
}

bool is_reversal_symmetric(const LRWord& word) {
  // Flattened sequence as seen by the trace: lefts in order, rights reversed.
  const ReducedWord r = ReducedWord::from_lr_word(word);
  std::vector<Letter> flat;
  for (int i : r.left) flat.push_back(left(i));
  for (auto it = r.right.rbegin(); it != r.right.rend(); ++it) flat.push_back(right(*it));
  std::vector<Letter> rev(flat.rbegin(), flat.rend());
  const std::size_t len = flat.size();
  for (std::size_t shift = 0; shift < len; ++shift) {
    bool same = true;
    for (std::size_t k = 0; k < len && same; ++k) same = flat[k] == rev[(k + shift) % len];
    if (same) return true;
  }
  return false;
}

Complex eval_lr_word_complex(const LRWord& word, std::span<const HermitianMatrix> lefts,
                             std::span<const HermitianMatrix> rights) {
  word.validate(static_cast<int>(lefts.size()), static_cast<int>(rights.size()));
  const int d = common_dimension(lefts, rights);
  const ReducedWord r = ReducedWord::from_lr_word(word);

  // Short words reduce to O(d^2) kernels.
  if (r.degree() == 1) {
    const auto& a = matrix_for(word.tokens[0], lefts, rights);
    return {a.normalized_trace(), 0.0};
  }
  if (r.degree() == 2) {
    const auto& a = matrix_for(word.tokens[0], lefts, rights);
    const auto& b = matrix_for(word.tokens[1], lefts, rights);
    return {hs_inner(a, b) / d, 0.0};
  }

  ComplexMatrix left_product = ComplexMatrix::Identity(d, d);
  for (int i : r.left) left_product = (left_product * lefts[static_cast<std::size_t>(i)].entries()).eval();
  ComplexMatrix right_product = ComplexMatrix::Identity(d, d);
  for (int j : r.right) right_product = (rights[static_cast<std::size_t>(j)].entries() * right_product).eval();
  return trace_of_product(left_product, right_product) / static_cast<double>(d);
}

namespace {

double checked_real(const LRWord& word, Complex value) {
  const double tol = 1e-10 * std::max(1.0, std::abs(value));
  if (std::abs(value.imag()) <= tol) return value.real();
  if (is_reversal_symmetric(word)) {
    throw NumericalCorruption("imaginary residue " + std::to_string(value.imag()) + " on real-valued word " +
                              word.to_string());
  }
  throw InvalidArgument("word " + word.to_string() + " has a complex value here; use the complex evaluator");
}

}  // namespace

double eval_lr_word(const LRWord& word, std::span<const HermitianMatrix> lefts,
                    std::span<const HermitianMatrix> rights) {
  return checked_real(word, eval_lr_word_complex(word, lefts, rights));
}

Complex eval_generalized_lr_word_complex(const LRWord& word, int d1, int d2,
                                         std::span<const HermitianMatrix> lefts,
                                         std::span<const HermitianMatrix> rights) {
  require(d1 >= 1 && d2 >= 1, "factor dimensions must be >= 1");
  word.validate(static_cast<int>(lefts.size()), static_cast<int>(rights.size()));
  const int d = common_dimension(lefts, rights);
  require(d == d1 * d2, "input dimension does not factor as d1 * d2");

  // Element of M_{d1} (x) End(M_{d2}) applied blockwise: V_b is the component
  // along basis column b. Letters act right-to-left on the starting element.
  Complex total(0.0, 0.0);
  std::vector<ComplexMatrix> v(static_cast<std::size_t>(d1));
  std::vector<ComplexMatrix> next(static_cast<std::size_t>(d1));
  for (int a = 0; a < d1; ++a) {
    for (int b = 0; b < d1; ++b) {
      v[static_cast<std::size_t>(b)] = ComplexMatrix::Zero(d2, d2);
      if (b == a) v[static_cast<std::size_t>(b)].setIdentity();
    }
    for (auto it = word.tokens.rbegin(); it != word.tokens.rend(); ++it) {
      const ComplexMatrix& op = matrix_for(*it, lefts, rights).entries();
      for (int b = 0; b < d1; ++b) {
        ComplexMatrix acc = ComplexMatrix::Zero(d2, d2);
        for (int c = 0; c < d1; ++c) {
          const auto block = op.block(b * d2, c * d2, d2, d2);
          if (it->side == Side::kLeft) {
            acc.noalias() += block * v[static_cast<std::size_t>(c)];
          } else {
            acc.noalias() += v[static_cast<std::size_t>(c)] * block;
          }
        }
        next[static_cast<std::size_t>(b)] = std::move(acc);
      }
      std::swap(v, next);
    }
    total += v[static_cast<std::size_t>(a)].trace();
  }
  return total / static_cast<double>(d1 * d2);
}

double eval_generalized_lr_word(const LRWord& word, int d1, int d2, std::span<const HermitianMatrix> lefts,
                                std::span<const HermitianMatrix> rights) {
  return checked_real(word, eval_generalized_lr_word_complex(word, d1, d2, lefts, rights));
}

}  // namespace bifree
