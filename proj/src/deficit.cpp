#include "beckner/deficit.hpp"

namespace beckner {

DeficitReport make_deficit(const Estimate& lhs, const Estimate& rhs, DeficitParams params) {
  DeficitReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.deficit = rhs.value - lhs.value;
  r.tolerance = lhs.error_bound + rhs.error_bound + 4e-16 * (std::abs(lhs.value) + std::abs(rhs.value));
  r.certified = r.deficit >= -r.tolerance;
  r.saturated = std::abs(r.deficit) <= 10.0 * r.tolerance;
  r.params = std::move(params);
  return r;
}

}  // namespace beckner
