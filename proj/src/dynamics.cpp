#include "bloch/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bloch/numerics/gaussian.hpp"

namespace bloch {

namespace {

void guard_pole(double action, double delta) {
    if (!(std::abs(action) < 1.0 - delta)) {
        std::ostringstream msg;
        msg << "pole guard: |I| = " << std::abs(action) << " reached 1 - " << delta;
        throw DomainError(msg.str());
    }
}

double angle_rate(double action, double angle) {
    const double s = std::sqrt((1.0 - action) * (1.0 + action));
    return action / s * (std::cos(angle) + std::sin(angle)) + 1.0;
}

// Piecewise-constant noise source; value_at(t) is a pure function of t and the noise settings.
class NoiseSource {
public:
    explicit NoiseSource(const NoiseSpec& spec)
        : spec_(spec), sampler_(spec.seed, spec.mean(), spec.model == NoiseModel::none ? 0.0 : spec.variance()) {}

    double value_at(double t) const {
        switch (spec_.model) {
        case NoiseModel::none:
            return 0.0;
        case NoiseModel::quenched:
            return sampler_.draw(0);
        case NoiseModel::stepwise: {
            const double cell = std::floor(t / spec_.step_correlation_time + 1e-9);
            return sampler_.draw(static_cast<std::uint64_t>(std::max(cell, 0.0)));
        }
        }
        return 0.0;
    }

private:
    NoiseSpec spec_;
    numerics::GaussianSampler sampler_;
};

// State of one integration step. For the Langevin system the Bloch vector (u, v, z) =
// (sqrt(1 - I^2) cos Phi, sqrt(1 - I^2) sin Phi, I) is integrated: the conservative part of
// the flow is a rotation about (-1, -1, 1) there, regular at the poles where Phi_dot is not.
// The unwrapped angle is carried alongside and only tracked from the vector.
struct Point {
    std::array<double, 3> x{};
    double angle{0.0};
};

std::array<double, 3> axpy(const std::array<double, 3>& a, double h, const std::array<double, 3>& b) {
    return {a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]};
}

struct Stepper {
    const SystemParams& params;
    const IntegratorConfig& config;

    bool cartesian() const { return config.equations == EquationsOfMotion::langevin; }

    Point from_state(double action, double angle) const {
        if (!cartesian()) {
            return {{action, angle, 0.0}, angle};
        }
        const double s = std::sqrt((1.0 - action) * (1.0 + action));
        return {{s * std::cos(angle), s * std::sin(angle), action}, angle};
    }

    double action(const Point& p) const { return cartesian() ? std::clamp(p.x[2], -1.0, 1.0) : p.x[0]; }

    // Phi_dot of the Langevin system from the Bloch vector; singular at the poles.
    double cartesian_angle_rate(const std::array<double, 3>& x) const {
        guard_pole(x[2], config.pole_guard_delta);
        return x[2] * (x[0] + x[1]) / (x[0] * x[0] + x[1] * x[1]) + 1.0;
    }

    std::array<double, 3> derivative(const std::array<double, 3>& x, double noise) const {
        switch (config.equations) {
        case EquationsOfMotion::langevin: {
            const double u = x[0];
            const double v = x[1];
            const double z = x[2];
            // Non-Hamiltonian force on I; it needs Phi_dot whenever gamma > 0.
            double force = noise;
            if (params.gamma != 0.0) {
                force -= 2.0 * params.gamma * cartesian_angle_rate(x);
            }
            if (force == 0.0) {
                return {-z - v, z + u, u - v};
            }
            guard_pole(z, config.pole_guard_delta);
            const double k = z * force / (u * u + v * v);
            return {-z - v - k * u, z + u - k * v, u - v + force};
        }
        case EquationsOfMotion::langevin_as_printed: {
            const Rates r = eom_rhs_as_printed(ActionAngleState(x[0], x[1]), params.gamma, noise,
                                               config.pole_guard_delta);
            return {r.action_rate, r.angle_rate, 0.0};
        }
        case EquationsOfMotion::sigma_z_qubit: {
            const Rates r = qubit_rhs(params.gamma, params.epsilon, noise);
            return {r.action_rate, r.angle_rate, 0.0};
        }
        }
        return {};
    }

    void finish_step(Point& p) const {
        if (!cartesian()) {
            p.angle = p.x[1];
            return;
        }
        const double norm = std::sqrt(p.x[0] * p.x[0] + p.x[1] * p.x[1] + p.x[2] * p.x[2]);
        for (double& c : p.x) {
            c /= norm;
        }
        p.angle += std::remainder(std::atan2(p.x[1], p.x[0]) - p.angle, 2.0 * std::numbers::pi);
    }

    void rk4(Point& p, double noise) const {
        const double h = config.dt;
        const auto k1 = derivative(p.x, noise);
        const auto k2 = derivative(axpy(p.x, 0.5 * h, k1), noise);
        const auto k3 = derivative(axpy(p.x, 0.5 * h, k2), noise);
        const auto k4 = derivative(axpy(p.x, h, k3), noise);
        for (std::size_t i = 0; i < 3; ++i) {
            p.x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        finish_step(p);
    }

    void heun(Point& p, double noise) const {
        const double h = config.dt;
        const auto k1 = derivative(p.x, noise);
        const auto k2 = derivative(axpy(p.x, h, k1), noise);
        for (std::size_t i = 0; i < 3; ++i) {
            p.x[i] += 0.5 * h * (k1[i] + k2[i]);
        }
        finish_step(p);
    }

    // Coefficient c in H = H_transverse + c Phi Phi_dot - xi Phi and R^2 = 1 - c Phi Phi_dot + xi Phi.
    double damping() const {
        return config.equations == EquationsOfMotion::sigma_z_qubit ? params.drift_rate()
                                                                     : 2.0 * params.gamma;
    }

    double angle_rate(const Point& p, double noise) const {
        switch (config.equations) {
        case EquationsOfMotion::langevin:
            // only enters through gamma Phi_dot
            return params.gamma == 0.0 ? 0.0 : cartesian_angle_rate(p.x);
        case EquationsOfMotion::langevin_as_printed:
            return derivative(p.x, noise)[1];
        case EquationsOfMotion::sigma_z_qubit:
            return 1.0;
        }
        return 0.0;
    }

    TrajectorySample sample(double t, const Point& p, double noise) const {
        const double I = action(p);
        const double phi_dot = angle_rate(p, noise);
        const double c = damping();
        const double base = config.equations == EquationsOfMotion::sigma_z_qubit
                                ? I
                                : reduced_hamiltonian(ActionAngleState(I, p.angle));
        TrajectorySample s;
        s.t = t;
        s.action = I;
        s.angle = p.angle;
        s.r_squared = squared_radius(p.angle, phi_dot, 0.5 * c, noise).r_squared;
        s.energy = base + c * p.angle * phi_dot - noise * p.angle;
        s.noise = noise;
        return s;
    }
};

} // namespace

void NoiseSpec::validate() const {
    if (model == NoiseModel::none) {
        return;
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("noise needs beta > 0");
    }
    if (model == NoiseModel::stepwise && !(step_correlation_time > 0.0)) {
        throw DomainError("stepwise noise needs a positive correlation time");
    }
}

double NoiseSpec::mean() const noexcept {
    if (model == NoiseModel::none) {
        return 0.0;
    }
    return mean_mode == NoiseMean::inverse_beta ? 1.0 / beta : 0.0;
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("dt must be positive");
    }
    if (!(pole_guard_delta > 0.0 && pole_guard_delta < 1.0)) {
        throw DomainError("pole_guard_delta must lie in (0, 1)");
    }
    if (output_stride == 0) {
        throw DomainError("output stride must be at least 1");
    }
}

std::size_t Trajectory::flagged_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(),
                                                  [](const TrajectorySample& s) { return s.r_squared < 0.0; }));
}

Rates eom_rhs(const ActionAngleState& state, double gamma, double noise, double pole_guard_delta) {
    guard_pole(state.action(), pole_guard_delta);
    const double action = state.action();
    const double angle = state.angle();
    const double s = std::sqrt((1.0 - action) * (1.0 + action));
    const double phi_dot = angle_rate(action, angle);
    const double i_dot = s * (std::cos(angle) - std::sin(angle)) - 2.0 * gamma * phi_dot + noise;
    return {i_dot, phi_dot};
}

Rates eom_rhs_as_printed(const ActionAngleState& state, double gamma, double noise,
                         double pole_guard_delta) {
    guard_pole(state.action(), pole_guard_delta);
    const double action = state.action();
    const double angle = state.angle();
    const double s = std::sqrt((1.0 - action) * (1.0 + action));
    const double phi_dot = angle_rate(action, angle);
    const double i_dot = -s * (std::sin(angle) + std::cos(angle)) - 2.0 * gamma * phi_dot + noise;
    return {i_dot, phi_dot};
}

Rates qubit_rhs(double gamma, double epsilon, double noise) noexcept {
    const double phi_dot = 1.0;
    return {-gamma / (2.0 * epsilon) * phi_dot + noise, phi_dot};
}

Trajectory integrate(const ActionAngleState& initial, const SystemParams& params,
                     const NoiseSpec& noise, const IntegratorConfig& config, double t_end) {
    params.validate();
    noise.validate();
    config.validate();
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw DomainError("t_end must be positive");
    }
    if (noise.model == NoiseModel::stepwise && config.method != IntegratorMethod::heun_stochastic) {
        throw DomainError("stepwise noise is integrated with the stochastic Heun method");
    }

    Trajectory traj;
    traj.params = params;
    traj.noise = noise;
    traj.config = config;

    const NoiseSource source(noise);
    const Stepper stepper{params, config};
    const auto steps = static_cast<std::uint64_t>(std::ceil(t_end / config.dt - 1e-9));
    traj.samples.reserve(steps / config.output_stride + 2);

    Point point = stepper.from_state(initial.action(), initial.angle());
    try {
        traj.samples.push_back(stepper.sample(0.0, point, source.value_at(0.0)));
        for (std::uint64_t n = 1; n <= steps; ++n) {
            const double t_prev = static_cast<double>(n - 1) * config.dt;
            const double xi = source.value_at(t_prev);
            if (config.method == IntegratorMethod::rk4) {
                stepper.rk4(point, xi);
            } else {
                stepper.heun(point, xi);
            }
            if (!stepper.cartesian() && !(std::abs(point.x[0]) <= 1.0)) {
                std::ostringstream msg;
                msg << "action left [-1, 1] at t = " << static_cast<double>(n) * config.dt
                    << " (I = " << point.x[0] << ")";
                throw DomainError(msg.str());
            }
            if (n % config.output_stride == 0) {
                const double t = static_cast<double>(n) * config.dt;
                traj.samples.push_back(stepper.sample(t, point, source.value_at(t)));
            }
        }
    } catch (const DomainError& e) {
        throw IntegrationError(std::string("integration aborted: ") + e.what(), std::move(traj));
    }
    return traj;
}

ActionAngleState dissipative_qubit_trajectory(double action0, double angle0, double gamma,
                                              double epsilon, double t) {
    if (!(epsilon > 0.0) || !(gamma >= 0.0)) {
        throw DomainError("dissipative qubit needs epsilon > 0 and gamma >= 0");
    }
    const double action = action0 - gamma / (2.0 * epsilon) * t;
    if (!(std::abs(action) <= 1.0)) {
        std::ostringstream msg;
        msg << "I(t) = " << action << " leaves [-1, 1]; |I(t)| <= 1 requires gamma pi / 2 epsilon <= 1";
        throw RangeError(msg.str());
    }
    return {action, angle0 + t};
}

std::vector<double> sample_quenched_noise(const NoiseSpec& spec, std::size_t n) {
    spec.validate();
    if (n == 0) {
        throw DomainError("need at least one noise sample");
    }
    const numerics::GaussianSampler sampler(spec.seed, spec.mean(),
                                            spec.model == NoiseModel::none ? 0.0 : spec.variance());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = sampler.draw(i);
    }
    return out;
}

} // namespace bloch
