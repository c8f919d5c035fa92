#pragma once

#include <limits>
#include <vector>

#include "bifree/hermitian.hpp"

namespace bifree {

inline constexpr double kNoNormCap = std::numeric_limits<double>::infinity();

/// n left and m right self-adjoint matrices of a common dimension, with the
/// declared operator-norm cap R (infinite when no cap is asserted).
struct MicrostateTuple {
  std::vector<HermitianMatrix> lefts;
  std::vector<HermitianMatrix> rights;
  double norm_cap = kNoNormCap;

  int n() const { return static_cast<int>(lefts.size()); }
  int m() const { return static_cast<int>(rights.size()); }
  int dim() const;

  /// Throws InvalidArgument when empty or dimensions disagree; with
  /// check_cap, also when some operator norm exceeds norm_cap.
  void validate(bool check_cap = false) const;

  /// Every matrix conjugated by u: U* A U.
  MicrostateTuple conjugated_by(const UnitaryMatrix& u) const;
};

}  // namespace bifree
