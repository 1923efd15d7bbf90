#include "bloch/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bloch/errors.hpp"

namespace bloch {

namespace {

using std::numbers::pi;

// gamma pi / 2eps == 1 must evaluate even when gamma was computed as 2 eps / pi.
constexpr double kBoundSlack = 1e-12;

double renormalization_parameter(double gamma, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw DomainError("epsilon must be positive");
    }
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw DomainError("gamma must be non-negative");
    }
    return gamma * pi / (2.0 * epsilon);
}

void require_bound(double x) {
    if (x > 1.0 + kBoundSlack) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "gamma pi / 2 epsilon = " << x
            << " exceeds 1: beyond the Ohmic (Caldeira-Leggett) renormalization bound";
        throw ValidityError(msg.str());
    }
}

PhaseResult integrate_one_form(const numerics::Integrand& integrand, const CycleConvention& convention,
                               const numerics::QuadratureOptions& opts) {
    convention.validate();
    const numerics::QuadratureResult q =
        numerics::adaptive_quadrature(integrand, convention.phi_start, convention.phi_end, opts);
    PhaseResult out;
    out.value = q.value;
    out.method = PhaseMethod::quadrature;
    out.error_estimate = q.error_bound;
    return out;
}

} // namespace

std::string_view to_string(PhaseMethod method) noexcept {
    switch (method) {
    case PhaseMethod::closed_form:
        return "closed_form";
    case PhaseMethod::quadrature:
        return "quadrature";
    case PhaseMethod::monte_carlo:
        return "monte_carlo";
    case PhaseMethod::series:
        return "series";
    }
    return "unknown";
}

void CycleConvention::validate() const {
    if (!std::isfinite(phi_start) || !std::isfinite(phi_end) || !(phi_end > phi_start)) {
        throw DomainError("cycle needs phi_end > phi_start");
    }
    if (!std::isfinite(period_T)) {
        throw DomainError("cycle period must be finite");
    }
}

CycleProfiles dissipative_qubit_profiles(double gamma, double epsilon, double theta0,
                                         const CycleConvention& convention, double noise) {
    convention.validate();
    renormalization_parameter(gamma, epsilon);
    const double drift = gamma / (2.0 * epsilon);
    const double start_action = std::cos(theta0);

    CycleProfiles profiles;
    if (convention.action_mode == ActionMode::frozen_at_T) {
        const double frozen = start_action - drift * convention.period_T;
        profiles.action = [frozen](double) { return frozen; };
    } else {
        const double phi0 = convention.phi_start;
        profiles.action = [start_action, drift, phi0](double phi) {
            return start_action - drift * (phi - phi0);
        };
    }
    profiles.r_squared = [drift, noise](double phi) { return 1.0 + (noise - drift) * phi; };
    return profiles;
}

PhaseResult dynamic_phase_quadrature(const Profile& action, const Profile& r_squared,
                                     const CycleConvention& convention,
                                     const numerics::QuadratureOptions& opts) {
    bool radicand_ok = true;
    auto integrand = [&](double phi) {
        const double r2 = r_squared(phi);
        if (r2 < 0.0) {
            radicand_ok = false;
        }
        return std::sqrt(std::max(r2, 0.0)) * action(phi);
    };
    PhaseResult out = integrate_one_form(integrand, convention, opts);
    out.validity.radicand_nonnegative = radicand_ok;
    return out;
}

PhaseResult geometric_phase_quadrature(const Profile& action, const Profile& r_squared,
                                       const CycleConvention& convention,
                                       const numerics::QuadratureOptions& opts) {
    bool radicand_ok = true;
    auto integrand = [&](double phi) {
        const double r2 = r_squared(phi);
        if (r2 < 0.0) {
            radicand_ok = false;
        }
        return action(phi) * std::sqrt(std::max(r2, 0.0)) - 1.0;
    };
    PhaseResult out = integrate_one_form(integrand, convention, opts);
    out.validity.radicand_nonnegative = radicand_ok;
    return out;
}

PhaseResult dissipative_gp_closed_form(double gamma, double epsilon, double theta0) {
    const double x = renormalization_parameter(gamma, epsilon);
    require_bound(x);
    const double c = std::cos(theta0);

    PhaseResult out;
    out.method = PhaseMethod::closed_form;
    out.validity.renormalization_bound_ok = true;
    if (gamma == 0.0) {
        out.value = pi * (c - 1.0);
        return out;
    }
    // (1 - x)^{3/2} - 1 without cancellation for small x; exactly -1 on the bound.
    const double radial = x >= 1.0 ? -1.0 : std::expm1(1.5 * std::log1p(-x));
    out.value = -pi + 4.0 / 3.0 * radial * (pi - epsilon / gamma * c);
    return out;
}

PhaseResult weak_coupling_gp(double gamma, double epsilon, double theta0) {
    const double c = std::cos(theta0);
    PhaseResult out;
    out.method = PhaseMethod::series;
    out.value = -pi * (1.0 - c) - gamma / epsilon * (pi / 2.0) * (pi / 2.0) * (c + 4.0);
    out.validity.renormalization_bound_ok = gamma * pi / (2.0 * epsilon) <= 1.0 + kBoundSlack;
    return out;
}

double renormalized_frequency(double gamma, double epsilon) {
    return renormalized_frequency_at(renormalization_parameter(gamma, epsilon));
}

double renormalized_frequency_at(double renormalization_parameter) {
    const double x = renormalization_parameter;
    if (!(x >= 0.0)) {
        throw DomainError("renormalization parameter must be non-negative");
    }
    require_bound(x);
    if (x >= 1.0) {
        return 0.0;
    }
    return std::sqrt((1.0 - x) * (1.0 + x));
}

double interference_intensity(double action0, double angle0, double gamma, double epsilon, double t) {
    renormalization_parameter(gamma, epsilon);
    const double action = action0 - gamma / (2.0 * epsilon) * t;
    if (!(std::abs(action) <= 1.0)) {
        std::ostringstream msg;
        msg << "interference envelope undefined: |I(t)| = " << std::abs(action) << " > 1 at t = " << t;
        throw RangeError(msg.str());
    }
    return 1.0 + std::sqrt((1.0 - action) * (1.0 + action)) * std::cos(t + angle0);
}

GaugeShiftCheck gp_gauge_shift_check(const Profile& action, const Profile& r_squared,
                                     const CycleConvention& convention, double alpha,
                                     const numerics::QuadratureOptions& opts) {
    if (!std::isfinite(alpha)) {
        throw DomainError("gauge shift must be finite");
    }
    GaugeShiftCheck out;
    out.original = geometric_phase_quadrature(action, r_squared, convention, opts);

    CycleConvention shifted = convention;
    shifted.phi_start += alpha;
    shifted.phi_end += alpha;
    const Profile action_shifted = [&](double phi_tilde) { return action(phi_tilde - alpha); };
    const Profile r_squared_shifted = [&](double phi_tilde) { return r_squared(phi_tilde - alpha); };
    out.shifted = geometric_phase_quadrature(action_shifted, r_squared_shifted, shifted, opts);
    return out;
}

} // namespace bloch
