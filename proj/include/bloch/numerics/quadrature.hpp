#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "bloch/errors.hpp"

namespace bloch::numerics {

using Integrand = std::function<double(double)>;

struct QuadratureOptions {
    double abs_tol{1e-13};
    double rel_tol{1e-12};
    std::size_t max_subdivisions{1000};
    // Gaussian tail extension stops once a piece contributes less than this.
    double tail_mass_tol{1e-12};

    void validate() const;
};

struct QuadratureResult {
    double value{0.0};
    double error_bound{0.0};
    std::size_t intervals{0};
};

struct QuadratureError : NumericalError {
    QuadratureError(const std::string& what, QuadratureResult partial)
        : NumericalError(what), partial(partial) {}

    QuadratureResult partial;
};

// Globally adaptive Gauss-Kronrod (21-point) quadrature with bisection of the
// panel carrying the largest error estimate. Converges when the summed panel
// error is below max(abs_tol, rel_tol * |value|); throws QuadratureError when
// the subdivision budget is exhausted first.
QuadratureResult adaptive_quadrature(const Integrand& f, double a, double b,
                                     const QuadratureOptions& opts = {});

// Same, with the initial panels split at the given ordered points
// (points.front() and points.back() are the integration limits).
QuadratureResult adaptive_quadrature(const Integrand& f, std::span<const double> points,
                                     const QuadratureOptions& opts = {});

// Compensated (Neumaier) accumulator; summation order is the caller's.
class CompensatedSum {
public:
    void add(double x) noexcept;
    void merge(const CompensatedSum& other) noexcept;
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_{0.0};
    double compensation_{0.0};
};

} // namespace bloch::numerics
