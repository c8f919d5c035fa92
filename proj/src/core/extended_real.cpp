#include "bifree/extended_real.hpp"

#include <cstdio>

namespace bifree {

std::string ExtendedReal::to_string() const {
  if (neg_inf_) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

}  // namespace bifree
