#include "bifree/tuple.hpp"

#include "bifree/errors.hpp"

namespace bifree {

int MicrostateTuple::dim() const {
  if (!lefts.empty()) return lefts.front().dim();
  if (!rights.empty()) return rights.front().dim();
  return 0;
}

void MicrostateTuple::validate(bool check_cap) const {
  require(n() + m() >= 1, "microstate tuple is empty");
  const int d = dim();
  require(d >= 1, "microstate matrices must be non-empty");
  for (const auto* side : {&lefts, &rights}) {
    for (const auto& a : *side) {
      require(a.dim() == d, "microstate matrices must share one dimension");
      if (check_cap) require(operator_norm(a) <= norm_cap, "matrix exceeds the declared norm cap");
    }
  }
}

MicrostateTuple MicrostateTuple::conjugated_by(const UnitaryMatrix& u) const {
  MicrostateTuple out;
  out.norm_cap = norm_cap;
  out.lefts.reserve(lefts.size());
  out.rights.reserve(rights.size());
  for (const auto& a : lefts) out.lefts.push_back(a.conjugated_by(u));
  for (const auto& b : rights) out.rights.push_back(b.conjugated_by(u));
  return out;
}

}  // namespace bifree
