#pragma once

#include <cmath>
#include <limits>

namespace codev {

// Market grids and correlation panels use NaN as the explicit missing marker.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double x) { return std::isnan(x); }

}  // namespace codev
