#include "bifree/cumulants.hpp"

#include <algorithm>

#include "bifree/errors.hpp"
#include "bifree/partitions.hpp"
#include "bifree/word_cache.hpp"
#include "bifree/words.hpp"

namespace bifree {
namespace {

std::vector<int> restrict_word(const std::vector<int>& word, const std::vector<int>& block) {
  std::vector<int> out;
  out.reserve(block.size());
  for (int pos : block) out.push_back(word[static_cast<std::size_t>(pos)]);
  return out;
}

}  // namespace

Complex CumulantTable::at(const std::vector<int>& word) const {
  auto it = values.find(word);
  if (it == values.end()) throw InvalidArgument("cumulant table does not cover the requested word");
  return it->second;
}

CumulantTable free_cumulants_from_moments(const WordTable& moments, int variables, int max_length, int family) {
  require(variables >= 1, "family needs at least one variable");
  require(max_length >= 1 && max_length <= kMaxPartitionPoints, "cumulant length out of range");
  CumulantTable out{family, variables, max_length, {}};
  for (const auto& w : enumerate_words(variables, max_length)) {
    auto it = moments.find(w);
    if (it == moments.end()) throw InvalidArgument("moment table is incomplete");
    Complex kappa = it->second;
    const int p = static_cast<int>(w.size());
    for (const auto& pi : nc_partitions(p)) {
      if (pi.size() == 1) continue;
      Complex term(1.0, 0.0);
      for (const auto& block : pi) term *= out.values.at(restrict_word(w, block));
      kappa -= term;
    }
    out.values.emplace(w, kappa);
  }
  return out;
}

WordTable moments_from_cumulants(const CumulantTable& cumulants) {
  WordTable out;
  for (const auto& w : enumerate_words(cumulants.variables, cumulants.max_length)) {
    Complex total(0.0, 0.0);
    for (const auto& pi : nc_partitions(static_cast<int>(w.size()))) {
      Complex term(1.0, 0.0);
      for (const auto& block : pi) term *= cumulants.at(restrict_word(w, block));
      total += term;
    }
    out.emplace(w, total);
  }
  return out;
}

WordTable empirical_family_moments(std::span<const HermitianMatrix> family, int max_length) {
  require(!family.empty(), "family is empty");
  WordCache cache(family, {});
  WordTable out;
  for (const auto& w : enumerate_words(static_cast<int>(family.size()), max_length)) {
    out.emplace(w, cache.interleaved(w));
  }
  return out;
}

Complex free_product_moment(std::span<const CumulantTable> families, std::span<const FamilyLetter> word) {
  require(!word.empty(), "word must have at least one letter");
  const int p = static_cast<int>(word.size());
  std::vector<int> count(families.size(), 0);
  for (const auto& l : word) {
    require(l.family >= 0 && static_cast<std::size_t>(l.family) < families.size(), "family index out of range");
    require(l.variable >= 0 && l.variable < families[static_cast<std::size_t>(l.family)].variables,
            "variable index out of range");
    ++count[static_cast<std::size_t>(l.family)];
  }
  for (std::size_t f = 0; f < families.size(); ++f) {
    if (count[f] > families[f].max_length) throw InvalidArgument("word exceeds the family's cumulant degree");
  }
  Complex total(0.0, 0.0);
  for (const auto& pi : nc_partitions(p)) {
    Complex term(1.0, 0.0);
    for (const auto& block : pi) {
      const int f = word[static_cast<std::size_t>(block.front())].family;
      std::vector<int> sub;
      sub.reserve(block.size());
      bool single = true;
      for (int pos : block) {
        const auto& l = word[static_cast<std::size_t>(pos)];
        if (l.family != f) {
          single = false;
          break;
        }
        sub.push_back(l.variable);
      }
      if (!single) {
        term = 0.0;
        break;
      }
      term *= families[static_cast<std::size_t>(f)].at(sub);
      if (term == Complex(0.0, 0.0)) break;
    }
    total += term;
  }
  return total;
}

FreenessReport is_m_eps_free(const std::vector<std::vector<HermitianMatrix>>& families, int M, double epsilon) {
  require(!families.empty(), "no families supplied");
  require(M >= 1 && M <= kMaxPartitionPoints, "M out of range");
  require(epsilon > 0.0, "epsilon must be positive");
  std::vector<HermitianMatrix> all;
  std::vector<FamilyLetter> alphabet;
  for (std::size_t f = 0; f < families.size(); ++f) {
    require(!families[f].empty(), "family is empty");
    for (std::size_t v = 0; v < families[f].size(); ++v) {
      all.push_back(families[f][v]);
      alphabet.push_back({static_cast<int>(f), static_cast<int>(v)});
    }
  }
  for (const auto& a : all) require(a.dim() == all.front().dim(), "all matrices must share one dimension");

  FreenessReport report;
  if (families.size() == 1) return report;

  std::vector<CumulantTable> cumulants;
  for (std::size_t f = 0; f < families.size(); ++f) {
    cumulants.push_back(free_cumulants_from_moments(empirical_family_moments(families[f], M),
                                                    static_cast<int>(families[f].size()), M, static_cast<int>(f)));
  }
  WordCache cache(all, {});
  for (const auto& w : enumerate_words(static_cast<int>(all.size()), M)) {
    std::vector<FamilyLetter> letters;
    letters.reserve(w.size());
    for (int k : w) letters.push_back(alphabet[static_cast<std::size_t>(k)]);
    const double dev = std::abs(cache.interleaved(w) - free_product_moment(cumulants, letters));
    if (dev > report.max_deviation || report.worst_word.empty()) {
      report.max_deviation = std::max(report.max_deviation, dev);
      if (dev >= report.max_deviation) report.worst_word = letters;
    }
  }
  report.free = report.max_deviation < epsilon;
  return report;
}

}  // namespace bifree
