#include "bloch/numerics/fit.hpp"

#include <algorithm>
#include <cmath>

#include "bloch/errors.hpp"

namespace bloch::numerics {

FitResult loglog_slope_fit(std::span<const Point> points) {
    if (points.size() < 3) {
        throw DomainError("log-log fit needs at least 3 points");
    }
    const double n = static_cast<double>(points.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& p : points) {
        if (!(p.x > 0.0) || !(p.y > 0.0)) {
            throw DomainError("log-log fit needs positive coordinates");
        }
        mean_x += std::log(p.x);
        mean_y += std::log(p.y);
    }
    mean_x /= n;
    mean_y /= n;

    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& p : points) {
        const double dx = std::log(p.x) - mean_x;
        const double dy = std::log(p.y) - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) {
        throw DomainError("log-log fit needs at least two distinct x values");
    }

    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;

    double ss_res = 0.0;
    for (const auto& p : points) {
        const double r = std::log(p.y) - (fit.intercept + fit.slope * std::log(p.x));
        ss_res += r * r;
    }
    // A constant series is fitted exactly.
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

} // namespace bloch::numerics
