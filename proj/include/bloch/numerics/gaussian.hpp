#pragma once

#include <cstdint>
#include <span>

#include "bloch/numerics/quadrature.hpp"

namespace bloch::numerics {

// Standard normal CDF.
double normal_cdf(double z);

struct GaussianExpectation {
    double value{0.0};
    double error_bound{0.0};
    // Probability mass of N(mean, variance) below lower_cutoff, i.e. excluded from the integral.
    double truncated_mass{0.0};
};

// Integral of g(x) N(x; mean, variance) over [lower_cutoff, inf). lower_cutoff may be -inf.
// The infinite limits are reached by extending panels outward in doubling multiples of
// sigma until a panel contributes less than opts.tail_mass_tol.
GaussianExpectation gaussian_expectation(const Integrand& g, double mean, double variance,
                                         double lower_cutoff, const QuadratureOptions& opts = {},
                                         std::span<const double> breakpoints = {});

// Splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed for an independent stream (trajectory, sample block, ...) of a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

// Counter-based normal sampler: draw(i) is a pure function of (seed, i), so streams
// can be split by index across threads without changing any value.
class GaussianSampler {
public:
    GaussianSampler(std::uint64_t seed, double mean, double variance);

    double draw(std::uint64_t index) const noexcept;
    double next() noexcept { return draw(position_++); }

    std::uint64_t seed() const noexcept { return seed_; }
    double mean() const noexcept { return mean_; }
    double stddev() const noexcept { return stddev_; }

private:
    std::uint64_t seed_;
    double mean_;
    double stddev_;
    std::uint64_t position_{0};
};

} // namespace bloch::numerics
