#pragma once

#include <span>

namespace bloch::numerics {

struct Point {
    double x{0.0};
    double y{0.0};
};

struct FitResult {
    double slope{0.0};
    double intercept{0.0}; // natural-log space
    double r_squared{0.0};
};

// Ordinary least squares on (ln x, ln y). Needs >= 3 points with positive coordinates.
FitResult loglog_slope_fit(std::span<const Point> points);

} // namespace bloch::numerics
