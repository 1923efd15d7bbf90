#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

#include "bloch/errors.hpp"
#include "bloch/numerics/gaussian.hpp"
#include "bloch/phase.hpp"

namespace bloch {

namespace {

using std::numbers::pi;

constexpr double kTaylorSwitch = 1e-4;
// Fixed reduction layout: block sums are combined in index order whatever the thread count.
constexpr std::size_t kBlockSize = 4096;

void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("beta must be positive and finite");
    }
}

struct Block {
    numerics::CompensatedSum sum;
    std::size_t rejected{0};
};

template <class Fn>
std::vector<Block> reduce_blocks(std::size_t n, unsigned threads, Fn&& value_of) {
    const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<Block> out(blocks);
    auto work = [&](std::size_t first_block, std::size_t stride) {
        for (std::size_t b = first_block; b < blocks; b += stride) {
            const std::size_t lo = b * kBlockSize;
            const std::size_t hi = std::min(n, lo + kBlockSize);
            for (std::size_t i = lo; i < hi; ++i) {
                value_of(i, out[b]);
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
    if (workers == 1) {
        work(0, 1);
        return out;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(work, w, workers);
    }
    pool.clear(); // joins
    return out;
}

} // namespace

double thermal_integrand(double xi) {
    if (std::abs(xi) < kTaylorSwitch) {
        // pi + pi^2 xi/4 - pi^3 xi^2/24 + pi^4 xi^3/64
        const double p = pi * xi;
        return pi * (1.0 + p * (0.25 + p * (-1.0 / 24.0 + p / 64.0)));
    }
    double radicand = 1.0 + pi * xi;
    if (radicand < 0.0) {
        if (radicand < -1e-14) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        radicand = 0.0;
    }
    return 2.0 / (3.0 * xi) * (radicand * std::sqrt(radicand) - 1.0);
}

ThermalFactor thermal_factor(double beta, const numerics::QuadratureOptions& opts) {
    check_beta(beta);
    const double breakpoints[] = {0.0};
    const auto e = numerics::gaussian_expectation(thermal_integrand, 1.0 / beta, 1.0 / beta,
                                                  kThermalBranchPoint, opts, breakpoints);
    return {e.value, e.error_bound, e.truncated_mass};
}

PhaseResult thermal_gp(double beta, double theta0, const numerics::QuadratureOptions& opts) {
    const ThermalFactor f = thermal_factor(beta, opts);
    const double c = std::cos(theta0);
    PhaseResult out;
    out.value = c * f.value - pi;
    out.method = PhaseMethod::quadrature;
    out.error_estimate = std::abs(c) * f.error_estimate;
    out.validity.truncated_mass = f.truncated_mass;
    return out;
}

double MonteCarloResult::rejected_fraction() const noexcept {
    return samples == 0 ? 0.0 : static_cast<double>(rejected) / static_cast<double>(samples);
}

MonteCarloResult monte_carlo_thermal_gp(double beta, double theta0, const MonteCarloOptions& opts) {
    check_beta(beta);
    if (opts.samples < 100) {
        throw DomainError("Monte Carlo needs at least 100 samples");
    }
    const numerics::GaussianSampler sampler(opts.seed, 1.0 / beta, 1.0 / beta);
    const double c = std::cos(theta0);
    auto sample_value = [&](std::size_t i, bool& rejected) {
        const double xi = sampler.draw(i);
        rejected = xi < kThermalBranchPoint;
        return (rejected ? 0.0 : c * thermal_integrand(xi)) - pi;
    };

    const std::size_t n = opts.samples;
    // Two passes (mean, then squared deviations) keep the variance accurate when the
    // spread is tiny compared to the mean.
    const auto first = reduce_blocks(n, opts.threads, [&](std::size_t i, Block& block) {
        bool rejected = false;
        block.sum.add(sample_value(i, rejected));
        block.rejected += rejected ? 1 : 0;
    });
    numerics::CompensatedSum total;
    std::size_t rejected = 0;
    for (const auto& block : first) {
        total.merge(block.sum);
        rejected += block.rejected;
    }
    const double mean = total.value() / static_cast<double>(n);

    const auto second = reduce_blocks(n, opts.threads, [&](std::size_t i, Block& block) {
        bool unused = false;
        const double d = sample_value(i, unused) - mean;
        block.sum.add(d * d);
    });
    numerics::CompensatedSum squares;
    for (const auto& block : second) {
        squares.merge(block.sum);
    }
    const double variance = squares.value() / static_cast<double>(n - 1);

    MonteCarloResult out;
    out.phase.value = mean;
    out.phase.method = PhaseMethod::monte_carlo;
    out.phase.error_estimate = std::sqrt(variance / static_cast<double>(n));
    out.samples = n;
    out.rejected = rejected;
    out.seed = opts.seed;
    out.phase.validity.truncated_mass = out.rejected_fraction();
    return out;
}

double crossover_temperature(const numerics::FitResult& fit) {
    if (!(fit.slope != 0.0)) {
        throw DomainError("a flat fit never meets the plateau");
    }
    return std::exp((std::log(pi) - fit.intercept) / fit.slope);
}

} // namespace bloch
