#include "bloch/numerics/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace bloch::numerics {

namespace {

constexpr double kCoreHalfWidth = 8.0; // sigmas
constexpr int kMaxTailPanels = 64;

struct TailSum {
    double value{0.0};
    double error{0.0};
};

// Integrates h over [start, start + direction * inf) in panels of doubling width.
TailSum integrate_tail(const Integrand& h, double start, double direction, double sigma, double mean,
                       const QuadratureOptions& opts) {
    TailSum tail;
    double width = kCoreHalfWidth * sigma;
    double edge = start;
    for (int i = 0; i < kMaxTailPanels; ++i) {
        const double next = edge + direction * width;
        const QuadratureResult piece = direction > 0 ? adaptive_quadrature(h, edge, next, opts)
                                                     : adaptive_quadrature(h, next, edge, opts);
        tail.value += piece.value;
        tail.error += piece.error_bound;
        const double z = (next - mean) / sigma;
        const double mass_beyond = direction > 0 ? normal_cdf(-z) : normal_cdf(z);
        if (std::abs(piece.value) < opts.tail_mass_tol && mass_beyond < opts.tail_mass_tol) {
            // The last panel bounds what is left beyond it.
            tail.error += std::abs(piece.value);
            return tail;
        }
        edge = next;
        width *= 2.0;
    }
    throw QuadratureError("Gaussian tail did not decay", {tail.value, tail.error, 0});
}

} // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

GaussianExpectation gaussian_expectation(const Integrand& g, double mean, double variance,
                                         double lower_cutoff, const QuadratureOptions& opts,
                                         std::span<const double> breakpoints) {
    opts.validate();
    if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
        throw DomainError("gaussian_expectation needs a finite mean and positive variance");
    }
    if (std::isnan(lower_cutoff) || lower_cutoff == std::numeric_limits<double>::infinity()) {
        throw DomainError("lower cutoff must be a number below +inf");
    }
    const double sigma = std::sqrt(variance);
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    const Integrand weighted = [&](double x) {
        const double z = (x - mean) / sigma;
        return g(x) * norm * std::exp(-0.5 * z * z);
    };

    const bool truncated = std::isfinite(lower_cutoff);
    GaussianExpectation out;
    out.truncated_mass = truncated ? normal_cdf((lower_cutoff - mean) / sigma) : 0.0;

    const double lo = truncated ? lower_cutoff : mean - kCoreHalfWidth * sigma;
    const double hi = std::max(mean + kCoreHalfWidth * sigma, lo + kCoreHalfWidth * sigma);

    std::vector<double> points{lo};
    std::vector<double> interior(breakpoints.begin(), breakpoints.end());
    interior.push_back(mean);
    std::sort(interior.begin(), interior.end());
    for (double p : interior) {
        if (p > points.back() && p < hi) {
            points.push_back(p);
        }
    }
    points.push_back(hi);

    const QuadratureResult core = adaptive_quadrature(weighted, points, opts);
    const TailSum upper = integrate_tail(weighted, hi, +1.0, sigma, mean, opts);
    TailSum lower;
    if (!truncated) {
        lower = integrate_tail(weighted, lo, -1.0, sigma, mean, opts);
    }

    CompensatedSum total;
    total.add(lower.value);
    total.add(core.value);
    total.add(upper.value);
    out.value = total.value();
    out.error_bound = core.error_bound + upper.error + lower.error;
    return out;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    return mix64(mix64(base) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

GaussianSampler::GaussianSampler(std::uint64_t seed, double mean, double variance)
    : seed_(seed), mean_(mean), stddev_(0.0) {
    if (!(variance >= 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
        throw DomainError("sampler needs a finite mean and non-negative variance");
    }
    stddev_ = std::sqrt(variance);
}

double GaussianSampler::draw(std::uint64_t index) const noexcept {
    if (stddev_ == 0.0) {
        return mean_;
    }
    const std::uint64_t key = mix64(seed_);
    const std::uint64_t h1 = mix64(key ^ mix64(2 * index));
    const std::uint64_t h2 = mix64(key ^ mix64(2 * index + 1));
    constexpr double kUnit = 0x1.0p-53;
    const double u1 = static_cast<double>((h1 >> 11) + 1) * kUnit; // (0, 1]
    const double u2 = static_cast<double>(h2 >> 11) * kUnit;       // [0, 1)
    // Box-Muller, cosine branch.
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean_ + stddev_ * radius * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace bloch::numerics
