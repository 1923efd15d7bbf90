#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bloch/core.hpp"
#include "bloch/errors.hpp"

namespace bloch {

inline constexpr double kDefaultPoleGuard = 1e-9;

enum class NoiseModel {
    none,
    quenched, // one draw at t = 0, held for the whole trajectory
    stepwise, // redrawn every step_correlation_time
};

enum class NoiseMean {
    zero,
    inverse_beta,
};

// Gaussian noise xi with variance 1/beta; beta is the inverse temperature in units of 2 epsilon.
struct NoiseSpec {
    NoiseModel model{NoiseModel::none};
    double beta{1.0};
    NoiseMean mean_mode{NoiseMean::zero};
    std::uint64_t seed{0};
    double step_correlation_time{0.1};

    void validate() const;
    double mean() const noexcept;
    double variance() const noexcept { return 1.0 / beta; }
};

enum class IntegratorMethod {
    rk4,
    heun_stochastic,
};

enum class EquationsOfMotion {
    // Ohmic Langevin system derived from H(t) = H0 + 2 gamma Phi Phi_dot - xi Phi, with H0 the
    // reduced Hamiltonian. Conserves H0 when gamma = xi = 0.
    langevin,
    // The same system with the transverse action term written -sqrt(1-I^2)(sin Phi + cos Phi).
    langevin_as_printed,
    // H = epsilon sigma_z in scaled time: I_dot = -(gamma/2eps) Phi_dot + xi, Phi_dot = 1.
    sigma_z_qubit,
};

struct IntegratorConfig {
    IntegratorMethod method{IntegratorMethod::rk4};
    EquationsOfMotion equations{EquationsOfMotion::langevin};
    double dt{1e-3};
    double pole_guard_delta{kDefaultPoleGuard};
    std::size_t output_stride{1};

    void validate() const;
};

struct TrajectorySample {
    double t{0.0};
    double action{0.0};
    double angle{0.0};
    double r_squared{1.0};
    double energy{0.0}; // effective Hamiltonian H(t)
    double noise{0.0};  // xi in force at this sample
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    SystemParams params;
    NoiseSpec noise;
    IntegratorConfig config;

    std::size_t flagged_count() const noexcept;
};

// Integration stopped early (pole guard or |I| > 1); carries everything computed so far.
struct IntegrationError : NumericalError {
    IntegrationError(const std::string& what, Trajectory partial)
        : NumericalError(what), partial(std::move(partial)) {}

    Trajectory partial;
};

struct Rates {
    double action_rate{0.0};
    double angle_rate{0.0};
};

// Right-hand side of the Ohmic Langevin system. Phi_dot is evaluated first and substituted
// into the action equation:
//   Phi_dot = I / sqrt(1 - I^2) (cos Phi + sin Phi) + 1
//   I_dot   = sqrt(1 - I^2) (cos Phi - sin Phi) - 2 gamma Phi_dot + xi
// Throws DomainError when |I| >= 1 - pole_guard_delta.
Rates eom_rhs(const ActionAngleState& state, double gamma, double noise,
              double pole_guard_delta = kDefaultPoleGuard);

// Variant with I_dot = -sqrt(1 - I^2) (sin Phi + cos Phi) - 2 gamma Phi_dot + xi.
// Does not conserve the reduced Hamiltonian; kept for comparison.
Rates eom_rhs_as_printed(const ActionAngleState& state, double gamma, double noise,
                         double pole_guard_delta = kDefaultPoleGuard);

Rates qubit_rhs(double gamma, double epsilon, double noise) noexcept;

// Fixed-step integration. The Langevin system is stepped on the Bloch vector
// (sqrt(1 - I^2) cos Phi, sqrt(1 - I^2) sin Phi, I), renormalized after each step, with Phi
// unwrapped from it; the pole guard applies while gamma or xi is nonzero, where Phi_dot drives I.
// The other systems are stepped in (I, Phi).
Trajectory integrate(const ActionAngleState& initial, const SystemParams& params,
                     const NoiseSpec& noise, const IntegratorConfig& config, double t_end);

// Exact solution I(t) = I0 - (gamma/2eps) t, Phi(t) = Phi0 + t. Throws RangeError when |I(t)| > 1.
ActionAngleState dissipative_qubit_trajectory(double action0, double angle0, double gamma,
                                              double epsilon, double t);

// n quenched draws xi_0 .. xi_{n-1} for the noise seed.
std::vector<double> sample_quenched_noise(const NoiseSpec& spec, std::size_t n);

} // namespace bloch
