#pragma once

#include <map>
#include <span>
#include <vector>

#include "bifree/hermitian.hpp"
#include "bifree/words.hpp"

namespace bifree {

/// Evaluates many words on one fixed set of matrices, sharing the products
/// of common prefixes. Degree <= 2 words never form a product.
class WordCache {
 public:
  WordCache(std::span<const HermitianMatrix> lefts, std::span<const HermitianMatrix> rights);

  int n() const { return static_cast<int>(lefts_.size()); }
  int m() const { return static_cast<int>(rights_.size()); }

  /// tau_d(A_{i1}...A_{ip} B_{jq}...B_{j1}); same value as eval_lr_word_complex.
  Complex reduced(const ReducedWord& word);

  /// tau_d(Z_{k1}...Z_{kp}) with Z = (A_1..A_n, B_1..B_m), letters 0-based.
  Complex interleaved(const std::vector<int>& letters);

 private:
  const ComplexMatrix& matrix(int letter) const;
  const ComplexMatrix& left_product(const std::vector<int>& idx);
  const ComplexMatrix& right_product(const std::vector<int>& idx);
  const ComplexMatrix& letter_product(const std::vector<int>& letters);

  std::span<const HermitianMatrix> lefts_;
  std::span<const HermitianMatrix> rights_;
  int dim_ = 0;
  std::map<std::vector<int>, ComplexMatrix> left_products_;
  std::map<std::vector<int>, ComplexMatrix> right_products_;
  std::map<std::vector<int>, ComplexMatrix> letter_products_;
};

}  // namespace bifree
