#pragma once

// Result record shared by every inequality check: both sides as estimates,
// their difference and the certification verdict.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "beckner/numerics.hpp"

namespace beckner {

struct DeficitParams {
  std::string inequality;
  std::string field_id;
  int d = 0;
  double b = std::numeric_limits<double>::quiet_NaN();
  double m = std::numeric_limits<double>::quiet_NaN();
  double p = std::numeric_limits<double>::quiet_NaN();
  double t = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> x;
};

struct DeficitReport {
  Estimate lhs;
  Estimate rhs;
  double deficit = 0.0;  // rhs - lhs
  double tolerance = 0.0;
  bool certified = false;  // deficit >= -tolerance
  bool saturated = false;  // |deficit| <= 10 tolerance
  DeficitParams params;
};

/// tolerance = lhs.error_bound + rhs.error_bound plus a few ulps of the
/// magnitudes for the final subtraction.
DeficitReport make_deficit(const Estimate& lhs, const Estimate& rhs, DeficitParams params);

}  // namespace beckner
