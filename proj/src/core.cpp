#include "bloch/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bloch/errors.hpp"

namespace bloch {

namespace {

void check_action(double action) {
    if (!(std::abs(action) <= 1.0)) {
        throw DomainError("action I = " + std::to_string(action) + " outside [-1, 1]");
    }
}

double transverse(double action) { return std::sqrt((1.0 - action) * (1.0 + action)); }

} // namespace

ActionAngleState::ActionAngleState(double action, double angle) : action_(action), angle_(angle) {
    check_action(action);
    if (!std::isfinite(angle)) {
        throw DomainError("angle must be finite");
    }
}

double BlochVector::norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }

void SystemParams::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw DomainError("epsilon must be positive");
    }
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw DomainError("gamma must be non-negative");
    }
}

double SystemParams::renormalization_parameter() const noexcept {
    return gamma * std::numbers::pi / (2.0 * epsilon);
}

BlochVector hopf_map(const ActionAngleState& state, RadiusSample radius) {
    if (!(radius.r_squared >= 0.0)) {
        throw DomainError("hopf_map needs a non-negative squared radius");
    }
    const double r = std::sqrt(radius.r_squared);
    const double s = transverse(state.action());
    return {r * s * std::cos(state.angle()), r * s * std::sin(state.angle()), r * state.action()};
}

ActionAngleState amplitudes_to_action_angle(std::complex<double> a1, std::complex<double> a2) {
    const double p1 = std::norm(a1);
    const double p2 = std::norm(a2);
    if (std::abs(p1 + p2 - 1.0) > 1e-10) {
        throw NormalizationError("amplitudes not normalized: |a1|^2 + |a2|^2 = " +
                                 std::to_string(p1 + p2));
    }
    // Clamp rounding excursions of the population difference.
    const double action = std::clamp(p1 - p2, -1.0, 1.0);
    if (a1 == 0.0 || a2 == 0.0) {
        return {action, 0.0};
    }
    double angle = std::remainder(std::arg(a1) - std::arg(a2), 2.0 * std::numbers::pi);
    if (angle <= -std::numbers::pi) {
        angle = std::numbers::pi;
    }
    return {action, angle};
}

double mmst_hamiltonian(const ActionAngleState& state, const SystemParams& params) {
    const double phi = state.angle();
    const auto& eta = params.eta;
    return -2.0 * transverse(state.action()) * (eta[0] * std::cos(phi) + eta[1] * std::sin(phi)) +
           2.0 * eta[2] * state.action();
}

double reduced_hamiltonian(const ActionAngleState& state) {
    const double phi = state.angle();
    return -transverse(state.action()) * (std::cos(phi) + std::sin(phi)) + state.action();
}

RadiusSample squared_radius(double angle, double angle_rate, double gamma, double noise) {
    return {1.0 - 2.0 * gamma * angle * angle_rate + noise * angle};
}

} // namespace bloch
