#pragma once

#include <array>
#include <complex>

namespace bloch {

// Canonical action-angle pair on the (possibly breathing) Bloch sphere.
//   action = |a1|^2 - |a2|^2, angle = phi1 - phi2.
// The angle is never wrapped: the squared radius depends on its accumulated value.
class ActionAngleState {
public:
    ActionAngleState(double action, double angle);

    double action() const noexcept { return action_; }
    double angle() const noexcept { return angle_; }

private:
    double action_;
    double angle_;
};

struct BlochVector {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    double norm() const noexcept;
};

struct SystemParams {
    double epsilon{1.0}; // half level splitting, H = epsilon * sigma_z
    double gamma{0.0};   // Ohmic friction constant
    std::array<double, 3> eta{1.0, 1.0, 1.0};

    void validate() const;

    // gamma / (2 epsilon): the action drift per unit scaled time of the dissipative qubit.
    double drift_rate() const noexcept { return gamma / (2.0 * epsilon); }
    // gamma * pi / (2 epsilon); physical only while <= 1.
    double renormalization_parameter() const noexcept;
};

struct RadiusSample {
    double r_squared{1.0};

    // Negative squared radius: the trajectory left the physically meaningful regime.
    bool flagged() const noexcept { return r_squared < 0.0; }
};

BlochVector hopf_map(const ActionAngleState& state, RadiusSample radius = {});

// Phi is reduced to (-pi, pi]. A basis state (one amplitude exactly zero) gets Phi = 0.
ActionAngleState amplitudes_to_action_angle(std::complex<double> a1, std::complex<double> a2);

// Meyer-Miller-Stock-Thoss mapping of sum_i eta_i sigma_i:
//   H0 = -2 sqrt(1 - I^2) (eta1 cos Phi + eta2 sin Phi) + 2 eta3 I
double mmst_hamiltonian(const ActionAngleState& state, const SystemParams& params);

// -sqrt(1 - I^2) (cos Phi + sin Phi) + I, i.e. the MMST form at eta = (1/2, 1/2, 1/2).
double reduced_hamiltonian(const ActionAngleState& state);

// 1 - gamma d/dt(Phi^2) + xi Phi with d/dt(Phi^2) = 2 Phi Phi_dot.
// Negative values are returned as-is and flagged.
RadiusSample squared_radius(double angle, double angle_rate, double gamma, double noise);

} // namespace bloch
