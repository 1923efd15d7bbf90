#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "bloch/dynamics.hpp"
#include "bloch/errors.hpp"

using namespace bloch;
using std::numbers::pi;

namespace {

double energy_drift(const Trajectory& traj) {
    double worst = 0.0;
    for (const auto& s : traj.samples) {
        worst = std::max(worst, std::abs(s.energy - traj.samples.front().energy));
    }
    return worst;
}

Trajectory conservative_run(double action0, double angle0, double dt, double t_end = 2 * pi) {
    IntegratorConfig cfg;
    cfg.dt = dt;
    return integrate({action0, angle0}, SystemParams{}, NoiseSpec{}, cfg, t_end);
}

} // namespace

TEST_CASE("equations of motion as printed") {
    auto r = eom_rhs_as_printed({0.0, 0.0}, 0.0, 0.0);
    CHECK(r.action_rate == -1.0);
    CHECK(r.angle_rate == 1.0);
    r = eom_rhs_as_printed({0.0, 0.0}, 0.1, 0.0);
    CHECK(r.action_rate == doctest::Approx(-1.2).epsilon(1e-15));
    CHECK(r.angle_rate == 1.0);
    r = eom_rhs_as_printed({0.0, 3 * pi / 4}, 0.0, 0.3);
    CHECK(r.action_rate == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(r.angle_rate == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("hamilton-consistent equations of motion") {
    // action rate = -dH/dPhi, angle rate = dH/dI for the reduced hamiltonian
    auto r = eom_rhs({0.0, 0.0}, 0.0, 0.0);
    CHECK(r.action_rate == 1.0);
    CHECK(r.angle_rate == 1.0);
    r = eom_rhs({0.0, 0.0}, 0.1, 0.0);
    CHECK(r.action_rate == doctest::Approx(0.8).epsilon(1e-15));
    r = eom_rhs({0.0, 3 * pi / 4}, 0.0, 0.3);
    CHECK(r.action_rate == doctest::Approx(-std::sqrt(2.0) + 0.3).epsilon(1e-14));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> action(-0.95, 0.95);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    const double h = 1e-6;
    for (int i = 0; i < 200; ++i) {
        const double I = action(rng);
        const double phi = angle(rng);
        const double dH_dphi = (reduced_hamiltonian({I, phi + h}) - reduced_hamiltonian({I, phi - h})) / (2 * h);
        const double dH_dI = (reduced_hamiltonian({I + h, phi}) - reduced_hamiltonian({I - h, phi})) / (2 * h);
        const auto rates = eom_rhs({I, phi}, 0.0, 0.0);
        REQUIRE(rates.action_rate == doctest::Approx(-dH_dphi).epsilon(1e-7));
        REQUIRE(rates.angle_rate == doctest::Approx(dH_dI).epsilon(1e-7));
    }
}

TEST_CASE("pole guard") {
    CHECK_THROWS_AS(eom_rhs({1.0, 0.0}, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(eom_rhs({-1.0 + 1e-10, 0.0}, 0.0, 0.0), DomainError);
    CHECK_NOTHROW(eom_rhs({0.99, 0.0}, 0.0, 0.0, 1e-3));
    CHECK_THROWS_AS(eom_rhs({0.9995, 0.0}, 0.0, 0.0, 1e-3), DomainError);
}

TEST_CASE("conservative limit keeps energy and unit radius") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> action(-0.9, 0.9);
    std::uniform_real_distribution<double> angle(-pi, pi);
    for (int i = 0; i < 20; ++i) {
        const auto traj = conservative_run(action(rng), angle(rng), 1e-3);
        REQUIRE(energy_drift(traj) < 1e-8);
        for (const auto& s : traj.samples) {
            REQUIRE(s.r_squared == 1.0);
        }
    }
}

TEST_CASE("orbits grazing the poles keep their energy") {
    // H0 near -1.4 passes within a few 1e-2 of |I| = 1, where (I, Phi) stepping used to drift
    for (const auto& [I, phi] : {std::pair{0.3975, -1.2669}, std::pair{-0.6, 2.0}, std::pair{0.8, 0.7}}) {
        const auto traj = conservative_run(I, phi, 1e-3, 4 * pi);
        INFO("I0 " << I << ", phi0 " << phi);
        CHECK(energy_drift(traj) < 1e-9);
    }
}

TEST_CASE("printed equations do not conserve the reduced hamiltonian") {
    IntegratorConfig cfg;
    cfg.equations = EquationsOfMotion::langevin_as_printed;
    const auto traj = integrate({0.3, 0.2}, SystemParams{}, NoiseSpec{}, cfg, 2 * pi);
    CHECK(energy_drift(traj) > 1e-3);
}

TEST_CASE("rk4 energy drift shrinks at fourth order") {
    const double coarse = energy_drift(conservative_run(0.4, 0.3, 0.05));
    const double fine = energy_drift(conservative_run(0.4, 0.3, 0.025));
    CHECK(coarse / fine >= 12.0);
}

TEST_CASE("trajectory bookkeeping") {
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.output_stride = 7;
    const auto traj = integrate({0.1, 0.0}, SystemParams{}, NoiseSpec{}, cfg, 1.0);
    REQUIRE(traj.samples.size() == 1 + 100 / 7);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        CHECK(traj.samples[i].t > traj.samples[i - 1].t);
        CHECK(traj.samples[i].t == doctest::Approx(0.07 * static_cast<double>(i)).epsilon(1e-12));
        CHECK(std::abs(traj.samples[i].action) <= 1.0);
    }
}

TEST_CASE("finite-difference slope of the trajectory matches the right-hand side") {
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    SystemParams params;
    params.gamma = 0.05;
    const auto traj = integrate({0.2, 0.4}, params, NoiseSpec{}, cfg, 1.0);
    for (std::size_t i = 1; i + 1 < traj.samples.size(); i += 97) {
        const auto& prev = traj.samples[i - 1];
        const auto& next = traj.samples[i + 1];
        const auto& mid = traj.samples[i];
        const auto rates = eom_rhs({mid.action, mid.angle}, params.gamma, 0.0);
        CHECK((next.action - prev.action) / (2 * cfg.dt) == doctest::Approx(rates.action_rate).epsilon(1e-5));
        CHECK((next.angle - prev.angle) / (2 * cfg.dt) == doctest::Approx(rates.angle_rate).epsilon(1e-5));
    }
}

TEST_CASE("sigma_z qubit integration follows the closed-form trajectory") {
    IntegratorConfig cfg;
    cfg.equations = EquationsOfMotion::sigma_z_qubit;
    SystemParams params;
    params.gamma = 0.1; // drift 0.05
    const auto traj = integrate({0.8, 0.3}, params, NoiseSpec{}, cfg, 2 * pi);
    double worst = 0.0;
    for (const auto& s : traj.samples) {
        const auto exact = dissipative_qubit_trajectory(0.8, 0.3, 0.1, 1.0, s.t);
        worst = std::max({worst, std::abs(s.action - exact.action()), std::abs(s.angle - exact.angle())});
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("radius stays bounded along the dissipative qubit without noise") {
    IntegratorConfig cfg;
    cfg.equations = EquationsOfMotion::sigma_z_qubit;
    SystemParams params;
    params.gamma = 0.3;
    const auto traj = integrate({0.9, 0.0}, params, NoiseSpec{}, cfg, 2 * pi);
    for (const auto& s : traj.samples) {
        REQUIRE(s.r_squared <= 1.0 + 1e-15);
    }
}

TEST_CASE("dissipative qubit trajectory examples") {
    auto s = dissipative_qubit_trajectory(1.0, 0.0, 1.0 / pi, 1.0, 2 * pi);
    CHECK(std::abs(s.action()) < 1e-15);
    CHECK(s.angle() == doctest::Approx(2 * pi));
    s = dissipative_qubit_trajectory(0.5, 0.2, 0.0, 3.0, 17.3);
    CHECK(s.action() == 0.5);
    CHECK(s.angle() == doctest::Approx(17.5));
    const double theta0 = 0.7;
    const double k = 0.04;
    s = dissipative_qubit_trajectory(std::cos(theta0), 0.0, 2 * k, 1.0, 2 * pi);
    CHECK(s.action() == doctest::Approx(std::cos(theta0) - 2 * pi * k).epsilon(1e-15));
    CHECK_THROWS_AS(dissipative_qubit_trajectory(0.0, 0.0, 1.0, 1.0, 2.5), RangeError);
}

TEST_CASE("pole hit aborts with the partial trajectory") {
    IntegratorConfig cfg;
    cfg.equations = EquationsOfMotion::sigma_z_qubit;
    SystemParams params;
    params.gamma = 1.0; // drift 0.5 reaches I = -1 at t = 4
    try {
        integrate({1.0, 0.0}, params, NoiseSpec{}, cfg, 10.0);
        FAIL("expected an integration error");
    } catch (const IntegrationError& e) {
        REQUIRE_FALSE(e.partial.samples.empty());
        CHECK(e.partial.samples.back().t <= 4.0 + 1e-9);
        CHECK(std::string(e.what()).find("action left") != std::string::npos);
    }

    cfg.equations = EquationsOfMotion::langevin;
    params.gamma = 0.0;
    NoiseSpec push;
    push.model = NoiseModel::quenched;
    push.beta = 1e-4; // |xi| of order 100 drives I into a pole almost at once
    push.seed = 1;
    CHECK_THROWS_AS(integrate({0.9, 0.0}, params, push, cfg, 1.0), IntegrationError);
}

TEST_CASE("quenched noise is one draw held fixed") {
    NoiseSpec noise;
    noise.model = NoiseModel::quenched;
    noise.beta = 50.0;
    noise.seed = 77;
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.equations = EquationsOfMotion::sigma_z_qubit;
    const auto a = integrate({0.0, 0.0}, SystemParams{}, noise, cfg, 1.0);
    const auto b = integrate({0.0, 0.0}, SystemParams{}, noise, cfg, 1.0);
    REQUIRE(a.samples.size() == b.samples.size());
    const double xi = a.samples.front().noise;
    CHECK(xi == sample_quenched_noise(noise, 1).front());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].noise == xi);
        CHECK(a.samples[i].action == b.samples[i].action);
        CHECK(a.samples[i].angle == b.samples[i].angle);
    }
    // I(t) = xi t for the undamped qubit under constant noise
    CHECK(a.samples.back().action == doctest::Approx(xi * 1.0).epsilon(1e-12));
}

TEST_CASE("stepwise noise redraws every correlation time") {
    NoiseSpec noise;
    noise.model = NoiseModel::stepwise;
    noise.beta = 100.0;
    noise.seed = 9;
    noise.step_correlation_time = 0.1;
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.equations = EquationsOfMotion::sigma_z_qubit;
    CHECK_THROWS_AS(integrate({0.0, 0.0}, SystemParams{}, noise, cfg, 1.0), DomainError);
    cfg.method = IntegratorMethod::heun_stochastic;
    const auto traj = integrate({0.0, 0.0}, SystemParams{}, noise, cfg, 1.0);
    std::vector<double> distinct;
    for (const auto& s : traj.samples) {
        if (distinct.empty() || distinct.back() != s.noise) {
            distinct.push_back(s.noise);
        }
    }
    CHECK(distinct.size() == 11);
    const auto draws = sample_quenched_noise(noise, 11);
    CHECK(std::equal(distinct.begin(), distinct.end(), draws.begin()));
}

TEST_CASE("effective hamiltonian column") {
    NoiseSpec noise;
    noise.model = NoiseModel::quenched;
    noise.beta = 400.0;
    noise.seed = 4;
    SystemParams params;
    params.gamma = 0.02;
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    const auto traj = integrate({0.1, 0.5}, params, noise, cfg, 0.5);
    for (const auto& s : traj.samples) {
        const auto rates = eom_rhs({s.action, s.angle}, params.gamma, s.noise);
        const double expected = reduced_hamiltonian({s.action, s.angle}) +
                                2 * params.gamma * s.angle * rates.angle_rate - s.noise * s.angle;
        CHECK(s.energy == doctest::Approx(expected).epsilon(1e-14));
        CHECK(s.r_squared ==
              doctest::Approx(1 - 2 * params.gamma * s.angle * rates.angle_rate + s.noise * s.angle).epsilon(1e-14));
    }
}

TEST_CASE("noise sampling examples") {
    NoiseSpec cold;
    cold.model = NoiseModel::quenched;
    cold.beta = 1e12;
    const auto small = sample_quenched_noise(cold, 1000);
    CHECK(std::all_of(small.begin(), small.end(), [](double x) { return std::abs(x) < 1e-4; }));

    NoiseSpec unit;
    unit.model = NoiseModel::quenched;
    unit.beta = 1.0;
    unit.seed = 2024;
    const std::size_t n = 1000000;
    const auto xs = sample_quenched_noise(unit, n);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n - 1);
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 0.01);

    unit.mean_mode = NoiseMean::inverse_beta;
    unit.beta = 4.0;
    const auto shifted = sample_quenched_noise(unit, 200000);
    double m = 0.0;
    for (double x : shifted) m += x;
    CHECK(m / 200000.0 == doctest::Approx(0.25).epsilon(0.02));

    const auto a = sample_quenched_noise(unit, 10);
    const auto b = sample_quenched_noise(unit, 10);
    CHECK(a == b);
}

TEST_CASE("configuration validation") {
    IntegratorConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.dt = 1e-3;
    cfg.pole_guard_delta = 1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    NoiseSpec noise;
    noise.model = NoiseModel::quenched;
    noise.beta = -1.0;
    CHECK_THROWS_AS(noise.validate(), DomainError);
    CHECK_THROWS_AS(sample_quenched_noise(NoiseSpec{}, 0), DomainError);
    CHECK_THROWS_AS(integrate({0.0, 0.0}, SystemParams{}, NoiseSpec{}, IntegratorConfig{}, 0.0), DomainError);
}
