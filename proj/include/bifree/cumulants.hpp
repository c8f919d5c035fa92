#pragma once

#include <map>
#include <span>
#include <vector>

#include "bifree/hermitian.hpp"

namespace bifree {

/// Words over one family's variables 0..k-1 mapped to (generally complex) values.
using WordTable = std::map<std::vector<int>, Complex>;

/// Free cumulants of one family on all words of length <= max_length.
struct CumulantTable {
  int family = 0;
  int variables = 0;
  int max_length = 0;
  WordTable values;

  /// Throws InvalidArgument if the word is not covered.
  Complex at(const std::vector<int>& word) const;
};

/// Moebius inversion over non-crossing partitions:
/// kappa(w) = phi(w) - sum_{pi < 1} prod_{V in pi} kappa(w|V).
CumulantTable free_cumulants_from_moments(const WordTable& moments, int variables, int max_length, int family = 0);

/// phi(w) = sum_{pi in NC(|w|)} prod_{V in pi} kappa(w|V).
WordTable moments_from_cumulants(const CumulantTable& cumulants);

/// Moments tau_d(C_{w1} ... C_{wp}) of a family of matrices for all words of
/// length <= max_length.
WordTable empirical_family_moments(std::span<const HermitianMatrix> family, int max_length);

struct FamilyLetter {
  int family = 0;
  int variable = 0;
  auto operator<=>(const FamilyLetter&) const = default;
};

/// The free-product state on a word: sum over non-crossing partitions whose
/// blocks each lie in a single family, of the product of block cumulants.
Complex free_product_moment(std::span<const CumulantTable> families, std::span<const FamilyLetter> word);

struct FreenessReport {
  bool free = true;
  double max_deviation = 0.0;
  std::vector<FamilyLetter> worst_word;
};

/// Compares the joint tau_d-moments of the families, over all words of length
/// <= M, with the free product of their individual distributions. Passes when
/// every deviation is < epsilon.
FreenessReport is_m_eps_free(const std::vector<std::vector<HermitianMatrix>>& families, int M, double epsilon);

}  // namespace bifree
