#include "bifree/word_cache.hpp"

#include "bifree/errors.hpp"

namespace bifree {

WordCache::WordCache(std::span<const HermitianMatrix> lefts, std::span<const HermitianMatrix> rights)
    : lefts_(lefts), rights_(rights) {
  require(!lefts.empty() || !rights.empty(), "no matrices supplied");
  dim_ = lefts.empty() ? rights.front().dim() : lefts.front().dim();
  for (const auto& a : lefts) require(a.dim() == dim_, "all matrices must share one dimension");
  for (const auto& b : rights) require(b.dim() == dim_, "all matrices must share one dimension");
}

const ComplexMatrix& WordCache::matrix(int letter) const {
  const int total = n() + m();
  require(letter >= 0 && letter < total, "word letter out of range");
  return letter < n() ? lefts_[static_cast<std::size_t>(letter)].entries()
                      : rights_[static_cast<std::size_t>(letter - n())].entries();
}

const ComplexMatrix& WordCache::left_product(const std::vector<int>& idx) {
  if (idx.size() == 1) return matrix(idx[0]);
  auto it = left_products_.find(idx);
  if (it != left_products_.end()) return it->second;
  const std::vector<int> prefix(idx.begin(), idx.end() - 1);
  ComplexMatrix value = left_product(prefix) * matrix(idx.back());
  return left_products_.emplace(idx, std::move(value)).first->second;
}

// B_{jq} ... B_{j1} for idx = (j1, ..., jq).
const ComplexMatrix& WordCache::right_product(const std::vector<int>& idx) {
  if (idx.size() == 1) return matrix(n() + idx[0]);
  auto it = right_products_.find(idx);
  if (it != right_products_.end()) return it->second;
  const std::vector<int> prefix(idx.begin(), idx.end() - 1);
  ComplexMatrix value = matrix(n() + idx.back()) * right_product(prefix);
  return right_products_.emplace(idx, std::move(value)).first->second;
}

const ComplexMatrix& WordCache::letter_product(const std::vector<int>& letters) {
  if (letters.size() == 1) return matrix(letters[0]);
  auto it = letter_products_.find(letters);
  if (it != letter_products_.end()) return it->second;
  const std::vector<int> prefix(letters.begin(), letters.end() - 1);
  ComplexMatrix value = letter_product(prefix) * matrix(letters.back());
  return letter_products_.emplace(letters, std::move(value)).first->second;
}

Complex WordCache::reduced(const ReducedWord& word) {
  word.validate(n(), m());
  const double d = dim_;
  const std::size_t p = word.left.size();
  const std::size_t q = word.right.size();
  if (q == 0) {
    if (p == 1) return matrix(word.left[0]).trace() / d;
    const std::vector<int> head(word.left.begin(), word.left.end() - 1);
    return trace_of_product(left_product(head), matrix(word.left.back())) / d;
  }
  if (p == 0) {
    if (q == 1) return matrix(n() + word.right[0]).trace() / d;
    const std::vector<int> head(word.right.begin(), word.right.end() - 1);
    return trace_of_product(matrix(n() + word.right.back()), right_product(head)) / d;
  }
  return trace_of_product(left_product(word.left), right_product(word.right)) / d;
}

Complex WordCache::interleaved(const std::vector<int>& letters) {
  require(!letters.empty(), "word must have at least one letter");
  const double d = dim_;
  if (letters.size() == 1) return matrix(letters[0]).trace() / d;
  const std::vector<int> head(letters.begin(), letters.end() - 1);
  return trace_of_product(letter_product(head), matrix(letters.back())) / d;
}

}  // namespace bifree
