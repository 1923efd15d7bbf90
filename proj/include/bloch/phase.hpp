#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string_view>

#include "bloch/numerics/fit.hpp"
#include "bloch/numerics/quadrature.hpp"

namespace bloch {

enum class PhaseMethod {
    closed_form,
    quadrature,
    monte_carlo,
    series,
};

std::string_view to_string(PhaseMethod method) noexcept;

struct PhaseValidity {
    bool renormalization_bound_ok{true};
    bool radicand_nonnegative{true};
    double truncated_mass{0.0};
};

struct PhaseResult {
    double value{0.0};
    PhaseMethod method{PhaseMethod::closed_form};
    double error_estimate{0.0};
    PhaseValidity validity;
};

enum class ActionMode {
    frozen_at_T,    // I(Phi) = I(T) over the whole cycle
    time_dependent, // I(Phi) follows the dissipative drift along the cycle
};

// Integration cycle for the connection one-forms. The defaults reproduce the
// closed-form dissipative geometric phase: Phi in [0, pi] with I frozen at I(2 pi).
struct CycleConvention {
    double phi_start{0.0};
    double phi_end{std::numbers::pi};
    ActionMode action_mode{ActionMode::frozen_at_T};
    double period_T{2.0 * std::numbers::pi};

    void validate() const;
};

using Profile = std::function<double(double)>;

struct CycleProfiles {
    Profile action;    // I(Phi)
    Profile r_squared; // R^2(Phi)
};

// Dissipative (optionally quenched-noise) qubit along the cycle:
//   R^2(Phi) = 1 + (xi - gamma/2eps) Phi,
//   I(Phi)   = cos(theta0) - (gamma/2eps) T          (frozen_at_T)
//            = cos(theta0) - (gamma/2eps) (Phi - Phi_start)  (time_dependent)
CycleProfiles dissipative_qubit_profiles(double gamma, double epsilon, double theta0,
                                         const CycleConvention& convention, double noise = 0.0);

// Integral of R(Phi) I(Phi) dPhi over the cycle.
PhaseResult dynamic_phase_quadrature(const Profile& action, const Profile& r_squared,
                                     const CycleConvention& convention,
                                     const numerics::QuadratureOptions& opts = {});

// Integral of [I(Phi) R(Phi) - 1] dPhi over the cycle. Negative R^2 is clamped to zero and
// reported through validity.radicand_nonnegative.
PhaseResult geometric_phase_quadrature(const Profile& action, const Profile& r_squared,
                                       const CycleConvention& convention,
                                       const numerics::QuadratureOptions& opts = {});

//   -pi + 4/3 [(1 - pi gamma/2eps)^{3/2} - 1] (pi - (eps/gamma) cos theta0)
// At gamma = 0 the analytic limit -pi (1 - cos theta0) is returned.
// Throws ValidityError when gamma pi / 2eps > 1.
PhaseResult dissipative_gp_closed_form(double gamma, double epsilon, double theta0);

// First-order series: -pi (1 - cos theta0) - (gamma/eps) (pi/2)^2 (cos theta0 + 4).
PhaseResult weak_coupling_gp(double gamma, double epsilon, double theta0);

// sqrt(1 - (gamma pi / 2eps)^2), with the bare frequency scaled to one.
double renormalized_frequency(double gamma, double epsilon);
double renormalized_frequency_at(double renormalization_parameter);

// 1 + sqrt(1 - I(t)^2) cos(t + Phi0), I(t) = I0 - (gamma/2eps) t.
double interference_intensity(double action0, double angle0, double gamma, double epsilon,
                              double t);

struct GaugeShiftCheck {
    PhaseResult original;
    PhaseResult shifted;
};

// Geometric phase in Phi and in Phi~ = Phi + alpha, with both profiles re-expressed in Phi~.
GaugeShiftCheck gp_gauge_shift_check(const Profile& action, const Profile& r_squared,
                                     const CycleConvention& convention, double alpha,
                                     const numerics::QuadratureOptions& opts = {});

// ---- finite temperature ----

// Lowest noise value with a real radius: 1 + pi xi >= 0.
inline constexpr double kThermalBranchPoint = -1.0 / std::numbers::pi;
inline constexpr double kTruncationWarning = 1e-3;

// g(xi) = 2/(3 xi) [(1 + pi xi)^{3/2} - 1], the cycle integral of the stochastic radius.
// Uses a Taylor expansion for |xi| < 1e-4 (g(0) = pi). NaN below the branch point.
double thermal_integrand(double xi);

struct ThermalFactor {
    double value{0.0};
    double error_estimate{0.0};
    double truncated_mass{0.0};

    bool truncation_warning() const noexcept { return truncated_mass > kTruncationWarning; }
};

// f(beta): average of g over xi ~ N(1/beta, 1/beta) restricted to xi >= -1/pi.
ThermalFactor thermal_factor(double beta, const numerics::QuadratureOptions& opts = {});

// cos(theta0) f(beta) - pi
PhaseResult thermal_gp(double beta, double theta0, const numerics::QuadratureOptions& opts = {});

struct MonteCarloOptions {
    std::size_t samples{100000};
    std::uint64_t seed{0};
    unsigned threads{1};
};

struct MonteCarloResult {
    PhaseResult phase;
    std::size_t samples{0};
    std::size_t rejected{0};
    std::uint64_t seed{0};

    double rejected_fraction() const noexcept;
    bool rejection_warning() const noexcept { return rejected_fraction() > kTruncationWarning; }
};

// Sample mean of cos(theta0) g(xi) - pi over xi ~ N(1/beta, 1/beta). Draws below the branch
// point contribute g = 0, matching the truncated quadrature. error_estimate is the standard
// error. Bit-identical for any thread count.
MonteCarloResult monte_carlo_thermal_gp(double beta, double theta0, const MonteCarloOptions& opts);

// Temperature at which the plateau f = pi meets the fitted power law f = e^c T^s.
double crossover_temperature(const numerics::FitResult& high_temperature_fit);

} // namespace bloch
