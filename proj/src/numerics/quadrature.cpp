#include "bloch/numerics/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bloch::numerics {

namespace {

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

struct LargerError {
    bool operator()(const Panel& lhs, const Panel& rhs) const noexcept {
        if (lhs.error != rhs.error) {
            return lhs.error < rhs.error;
        }
        return lhs.a > rhs.a; // deterministic tie-break
    }
};

// One Gauss-Kronrod 21 panel; the error is |K21 - G10| with G10 on the odd Kronrod nodes.
Panel evaluate(const Integrand& f, double a, double b) {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using gauss = boost::math::quadrature::gauss<double, 10>;
    const auto& nodes = kronrod::abscissa();
    const auto& kronrod_weights = kronrod::weights();
    const auto& gauss_weights = gauss::weights();

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto eval = [&](double x) {
        const double y = f(x);
        if (!std::isfinite(y)) {
            throw QuadratureError("integrand is not finite at " + std::to_string(x), {});
        }
        return y;
    };

    const double mid = eval(center);
    double k = kronrod_weights[0] * mid;
    double g = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double pair = eval(center - half * nodes[i]) + eval(center + half * nodes[i]);
        k += kronrod_weights[i] * pair;
        if (i % 2 == 1) {
            g += gauss_weights[i / 2] * pair;
        }
    }
    const double value = half * k;
    const double error = std::max(std::abs(half * (k - g)),
                                  2.0 * std::numeric_limits<double>::epsilon() * std::abs(value));
    return {a, b, value, error};
}

bool splittable(const Panel& p) {
    const double mid = 0.5 * (p.a + p.b);
    const double scale = std::max(std::abs(p.a), std::abs(p.b));
    return mid > p.a && mid < p.b &&
           (p.b - p.a) > 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

QuadratureResult summarize(std::vector<Panel> panels) {
    std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
    CompensatedSum value;
    CompensatedSum error;
    for (const auto& p : panels) {
        value.add(p.value);
        error.add(p.error);
    }
    return {value.value(), error.value(), panels.size()};
}

} // namespace

void QuadratureOptions::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(tail_mass_tol > 0.0)) {
        throw DomainError("quadrature tolerances must be positive");
    }
    if (max_subdivisions < 8) {
        throw DomainError("max_subdivisions must be at least 8");
    }
}

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        compensation_ += (sum_ - t) + x;
    } else {
        compensation_ += (x - t) + sum_;
    }
    sum_ = t;
}

void CompensatedSum::merge(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.compensation_);
}

QuadratureResult adaptive_quadrature(const Integrand& f, double a, double b,
                                     const QuadratureOptions& opts) {
    const double points[] = {a, b};
    return adaptive_quadrature(f, points, opts);
}

QuadratureResult adaptive_quadrature(const Integrand& f, std::span<const double> points,
                                     const QuadratureOptions& opts) {
    opts.validate();
    if (points.size() < 2) {
        throw DomainError("quadrature needs at least two limits");
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i] > points[i - 1]) || !std::isfinite(points[i]) || !std::isfinite(points[0])) {
            throw DomainError("quadrature limits must be finite and strictly increasing");
        }
    }

    std::priority_queue<Panel, std::vector<Panel>, LargerError> active;
    std::vector<Panel> exhausted; // panels at the floating-point resolution limit
    double total_value = 0.0;
    double total_error = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        Panel p = evaluate(f, points[i - 1], points[i]);
        total_value += p.value;
        total_error += p.error;
        active.push(p);
    }

    auto collect = [&] {
        std::vector<Panel> all = exhausted;
        auto copy = active;
        while (!copy.empty()) {
            all.push_back(copy.top());
            copy.pop();
        }
        return summarize(std::move(all));
    };

    auto converged = [&](double value, double error) {
        return error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
    };

    while (true) {
        if (converged(total_value, total_error)) {
            // The running sums drift; confirm against a fresh summation of the panels.
            const QuadratureResult fresh = collect();
            if (converged(fresh.value, fresh.error_bound)) {
                return fresh;
            }
            total_value = fresh.value;
            total_error = fresh.error_bound;
        }
        if (active.empty()) {
            throw QuadratureError("quadrature hit the floating-point resolution limit", collect());
        }
        if (active.size() + exhausted.size() >= opts.max_subdivisions) {
            throw QuadratureError("quadrature did not converge within " +
                                      std::to_string(opts.max_subdivisions) + " subdivisions",
                                  collect());
        }
        Panel worst = active.top();
        active.pop();
        if (!splittable(worst)) {
            exhausted.push_back(worst);
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = evaluate(f, worst.a, mid);
        Panel right = evaluate(f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        active.push(left);
        active.push(right);
    }
}

} // namespace bloch::numerics
