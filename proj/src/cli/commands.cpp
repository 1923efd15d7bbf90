#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "bloch/cli/cli.hpp"
#include "bloch/cli/config.hpp"
#include "bloch/cli/output.hpp"
#include "bloch/core.hpp"
#include "bloch/dynamics.hpp"
#include "bloch/phase.hpp"

namespace bloch::cli {

namespace {

using nlohmann::json;
using std::numbers::pi;

enum class LogLevel { off = 0, error = 1, warn = 2, info = 3, debug = 4 };

LogLevel log_level_from_env() {
    const char* raw = std::getenv("BLOCH_LOG");
    if (raw == nullptr) {
        return LogLevel::warn;
    }
    const std::string v(raw);
    if (v == "off" || v == "quiet" || v == "0") return LogLevel::off;
    if (v == "error" || v == "1") return LogLevel::error;
    if (v == "info" || v == "3") return LogLevel::info;
    if (v == "debug" || v == "4") return LogLevel::debug;
    return LogLevel::warn;
}

class Diagnostics {
public:
    explicit Diagnostics(std::ostream& err) : err_(err), level_(log_level_from_env()) {}

    void error(const std::string& msg) { emit(LogLevel::error, "error", msg); }
    void warn(const std::string& msg) { emit(LogLevel::warn, "warning", msg); }
    void info(const std::string& msg) { emit(LogLevel::info, "info", msg); }

private:
    void emit(LogLevel level, const char* tag, const std::string& msg) {
        if (static_cast<int>(level) <= static_cast<int>(level_)) {
            err_ << "bloch: " << tag << ": " << msg << '\n';
        }
    }

    std::ostream& err_;
    LogLevel level_;
};

struct Context {
    const RunConfig& config;
    Diagnostics& diag;
    std::ostream& out;
};

using Action = std::function<int(Context&)>;

struct Command {
    std::vector<std::string> path; // e.g. {"gp", "closed"}
    std::vector<KeySpec> keys;
    Action action;
};

// ---- key tables ----

KeySpec num(std::string name, double def, std::string help = {}) {
    return {std::move(name), ValueKind::number, def, std::move(help)};
}
KeySpec text(std::string name, std::string def, std::string help = {}) {
    return {std::move(name), ValueKind::text, std::move(def), std::move(help)};
}
KeySpec count(std::string name, std::int64_t def, std::string help = {}) {
    return {std::move(name), ValueKind::integer, def, std::move(help)};
}
KeySpec flag(std::string name, std::string help = {}) {
    return {std::move(name), ValueKind::flag, false, std::move(help)};
}

std::vector<KeySpec> with_common(std::vector<KeySpec> keys, const std::string& format) {
    keys.push_back(text("out", "", "output path (default: standard output)"));
    keys.push_back(text("format", format, "csv or json"));
    keys.push_back({"seed", ValueKind::unsigned_integer, std::uint64_t{0}, "64-bit seed"});
    keys.push_back(count("threads", 1, "worker threads; never changes the output"));
    return keys;
}

std::vector<KeySpec> qubit_keys() {
    return {num("gamma", 0.0, "friction constant"), num("epsilon", 1.0, "half level splitting"),
            num("theta0", 0.0, "initial polar angle")};
}

std::vector<KeySpec> quadrature_keys() {
    return {num("abs_tol", 1e-13), num("rel_tol", 1e-12), count("max_subdivisions", 1000)};
}

std::vector<KeySpec> cycle_keys() {
    return {num("phi_start", 0.0), num("phi_end", pi), text("action_mode", "frozen_at_T"),
            num("period_T", 2.0 * pi), num("xi", 0.0, "quenched noise value")};
}

std::vector<KeySpec> concat(std::initializer_list<std::vector<KeySpec>> parts) {
    std::vector<KeySpec> out;
    for (const auto& p : parts) {
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

// ---- shared helpers ----

numerics::QuadratureOptions quadrature_options(const RunConfig& c) {
    numerics::QuadratureOptions q;
    q.abs_tol = c.number("abs_tol");
    q.rel_tol = c.number("rel_tol");
    const auto subdivisions = c.integer("max_subdivisions");
    if (subdivisions < 8) {
        throw ConfigError("max_subdivisions must be at least 8");
    }
    q.max_subdivisions = static_cast<std::size_t>(subdivisions);
    q.validate();
    return q;
}

CycleConvention cycle_convention(const RunConfig& c) {
    CycleConvention conv;
    conv.phi_start = c.number("phi_start");
    conv.phi_end = c.number("phi_end");
    conv.period_T = c.number("period_T");
    const std::string mode = c.text("action_mode");
    if (mode == "frozen_at_T") {
        conv.action_mode = ActionMode::frozen_at_T;
    } else if (mode == "time_dependent") {
        conv.action_mode = ActionMode::time_dependent;
    } else {
        throw ConfigError("action_mode must be frozen_at_T or time_dependent");
    }
    conv.validate();
    return conv;
}

unsigned thread_count(const RunConfig& c) {
    const auto n = c.integer("threads");
    if (n < 1 || n > 1024) {
        throw ConfigError("threads must lie in [1, 1024]");
    }
    return static_cast<unsigned>(n);
}

void require_positive(const RunConfig& c, const std::string& key) {
    if (!(c.number(key) > 0.0)) {
        throw ConfigError(key + " must be positive");
    }
}

void require_qubit(const RunConfig& c) {
    require_positive(c, "epsilon");
    if (!(c.number("gamma") >= 0.0)) {
        throw ConfigError("gamma must be non-negative");
    }
}

std::vector<double> grid(const std::string& kind, double start, double stop, std::int64_t points) {
    if (points < 2) {
        throw ConfigError("a sweep needs at least 2 points");
    }
    std::vector<double> out(static_cast<std::size_t>(points));
    const double last = static_cast<double>(points - 1);
    if (kind == "linear") {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = start + (stop - start) * static_cast<double>(i) / last;
        }
    } else if (kind == "log") {
        if (!(start > 0.0) || !(stop > 0.0)) {
            throw ConfigError("a log grid needs positive endpoints");
        }
        const double a = std::log(start);
        const double b = std::log(stop);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = std::exp(a + (b - a) * static_cast<double>(i) / last);
        }
    } else {
        throw ConfigError("grid must be linear or log");
    }
    out.front() = start;
    out.back() = stop;
    return out;
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
}

json validity_json(const PhaseValidity& v) {
    return {{"radicand_nonnegative", v.radicand_nonnegative},
            {"renormalization_bound_ok", v.renormalization_bound_ok},
            {"truncated_mass", v.truncated_mass}};
}

json phase_json(const PhaseResult& r) {
    return {{"value", r.value},
            {"method", std::string(to_string(r.method))},
            {"error_estimate", r.error_estimate},
            {"validity", validity_json(r.validity)}};
}

// Writes to --out when given, otherwise to the context stream.
void emit(Context& ctx, const std::function<void(std::ostream&)>& writer) {
    const std::string path = ctx.config.text("out");
    if (path.empty()) {
        writer(ctx.out);
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw ConfigError("cannot open output file " + path);
    }
    writer(file);
}

Format output_format(const RunConfig& c) { return parse_format(c.text("format")); }

// ---- sim ----

int cmd_sim(Context& ctx) {
    const RunConfig& c = ctx.config;
    const Format format = output_format(c);

    SystemParams params;
    params.gamma = c.number("gamma");
    params.epsilon = c.number("epsilon");
    params.validate();

    IntegratorConfig cfg;
    cfg.dt = c.number("dt");
    cfg.pole_guard_delta = c.number("pole_guard");
    const auto stride = c.integer("stride");
    if (stride < 1) {
        throw ConfigError("stride must be at least 1");
    }
    cfg.output_stride = static_cast<std::size_t>(stride);
    const std::string model = c.text("model");
    if (model == "langevin") {
        cfg.equations = EquationsOfMotion::langevin;
    } else if (model == "langevin_as_printed") {
        cfg.equations = EquationsOfMotion::langevin_as_printed;
    } else if (model == "qubit") {
        cfg.equations = EquationsOfMotion::sigma_z_qubit;
    } else {
        throw ConfigError("model must be langevin, langevin_as_printed or qubit");
    }

    NoiseSpec noise;
    const std::string noise_model = c.text("noise");
    if (noise_model == "none") {
        noise.model = NoiseModel::none;
    } else if (noise_model == "quenched") {
        noise.model = NoiseModel::quenched;
    } else if (noise_model == "stepwise") {
        noise.model = NoiseModel::stepwise;
    } else {
        throw ConfigError("noise must be none, quenched or stepwise");
    }
    noise.beta = c.number("beta");
    const std::string mean_mode = c.text("mean_mode");
    if (mean_mode == "zero") {
        noise.mean_mode = NoiseMean::zero;
    } else if (mean_mode == "inverse_beta") {
        noise.mean_mode = NoiseMean::inverse_beta;
    } else {
        throw ConfigError("mean_mode must be zero or inverse_beta");
    }
    noise.seed = c.unsigned_integer("seed");
    noise.step_correlation_time = c.number("correlation_time");

    const std::string method = c.text("method");
    if (method == "auto") {
        cfg.method = noise.model == NoiseModel::stepwise ? IntegratorMethod::heun_stochastic
                                                          : IntegratorMethod::rk4;
    } else if (method == "rk4") {
        cfg.method = IntegratorMethod::rk4;
    } else if (method == "heun") {
        cfg.method = IntegratorMethod::heun_stochastic;
    } else {
        throw ConfigError("method must be auto, rk4 or heun");
    }
    cfg.validate();
    noise.validate();
    require_positive(c, "t_end");
    const ActionAngleState initial(c.number("I0"), c.number("phi0"));

    auto to_table = [](const Trajectory& traj) {
        Table table{{"t", "I", "phi", "r_squared", "H", "x", "y", "z"}, {}};
        table.rows.reserve(traj.samples.size());
        for (const auto& s : traj.samples) {
            BlochVector b{std::nan(""), std::nan(""), std::nan("")};
            if (s.r_squared >= 0.0) {
                b = hopf_map(ActionAngleState(s.action, s.angle), {s.r_squared});
            }
            table.rows.push_back({s.t, s.action, s.angle, s.r_squared, s.energy, b.x, b.y, b.z});
        }
        return table;
    };

    try {
        const Trajectory traj = integrate(initial, params, noise, cfg, c.number("t_end"));
        if (const auto flagged = traj.flagged_count(); flagged > 0) {
            ctx.diag.warn(std::to_string(flagged) + " samples with negative squared radius");
        }
        emit(ctx, [&](std::ostream& os) { write_table(os, to_table(traj), format); });
        return kSuccess;
    } catch (const IntegrationError& e) {
        emit(ctx, [&](std::ostream& os) { write_table(os, to_table(e.partial), format); });
        ctx.diag.error(e.what());
        return kNumerical;
    }
}

// ---- gp ----

json gp_inputs(const RunConfig& c) {
    return {{"gamma", c.number("gamma")}, {"epsilon", c.number("epsilon")}, {"theta0", c.number("theta0")}};
}

PhaseResult quadrature_gp(const RunConfig& c) {
    const CycleConvention conv = cycle_convention(c);
    const auto profiles = dissipative_qubit_profiles(c.number("gamma"), c.number("epsilon"),
                                                     c.number("theta0"), conv, c.number("xi"));
    return geometric_phase_quadrature(profiles.action, profiles.r_squared, conv, quadrature_options(c));
}

void add_cross_check(json& report, const RunConfig& c) {
    const PhaseResult closed = dissipative_gp_closed_form(c.number("gamma"), c.number("epsilon"), c.number("theta0"));
    const PhaseResult quad = quadrature_gp(c);
    report["cross_check"] = {{"closed_form", closed.value},
                             {"quadrature", quad.value},
                             {"abs_difference", std::abs(closed.value - quad.value)}};
}

void require_renormalization_bound(const RunConfig& c) {
    // Throws ValidityError beyond the bound.
    renormalized_frequency(c.number("gamma"), c.number("epsilon"));
}

int cmd_gp_closed(Context& ctx) {
    const RunConfig& c = ctx.config;
    const Format format = output_format(c);
    require_qubit(c);
    json report = phase_json(dissipative_gp_closed_form(c.number("gamma"), c.number("epsilon"), c.number("theta0")));
    report["inputs"] = gp_inputs(c);
    if (c.flag("cross_check")) {
        add_cross_check(report, c);
    }
    emit(ctx, [&](std::ostream& os) { write_report(os, report, format); });
    return kSuccess;
}

int cmd_gp_quad(Context& ctx) {
    const RunConfig& c = ctx.config;
    const Format format = output_format(c);
    require_qubit(c);
    require_renormalization_bound(c);
    const PhaseResult r = quadrature_gp(c);
    if (!r.validity.radicand_nonnegative) {
        ctx.diag.warn("negative squared radius on the cycle; clamped to zero");
    }
    json report = phase_json(r);
    json inputs = gp_inputs(c);
    for (const auto* key : {"phi_start", "phi_end", "period_T", "xi"}) {
        inputs[key] = c.number(key);
    }
    inputs["action_mode"] = c.text("action_mode");
    report["inputs"] = inputs;
    if (c.flag("cross_check")) {
        add_cross_check(report, c);
    }
    emit(ctx, [&](std::ostream& os) { write_report(os, report, format); });
    return kSuccess;
}

int cmd_gp_series(Context& ctx) {
    const RunConfig& c = ctx.config;
    const Format format = output_format(c);
    require_qubit(c);
    const PhaseResult r = weak_coupling_gp(c.number("gamma"), c.number("epsilon"), c.number("theta0"));
    if (!r.validity.renormalization_bound_ok) {
        ctx.diag.warn("gamma pi / 2 epsilon > 1: the series is outside the physical regime");
    }
    json report = phase_json(r);
    report["inputs"] = gp_inputs(c);
    if (c.flag("cross_check")) {
        add_cross_check(report, c);
    }
    emit(ctx, [&](std::ostream& os) { write_report(os, report, format); });
    return kSuccess;
}

// ---- gp-thermal ----

int cmd_gp_thermal(Context& ctx) {
    const RunConfig& c = ctx.config;
    const Format format = output_format(c);
    const auto opts = quadrature_options(c);
    const double theta0 = c.number("theta0");
    const std::string axis = c.text("axis");
    if (axis != "T" && axis != "beta") {
        throw ConfigError("axis must be T or beta");
    }
    const std::vector<double> values = grid(c.text("grid"), c.number("start"), c.number("stop"), c.integer("points"));
    for (double v : values) {
        if (!(v > 0.0)) {
            throw ConfigError("temperatures and inverse temperatures must be positive");
        }
    }
    const bool fit = c.flag("fit");
    std::string fit_path = c.text("fit_out");
    if (fit && fit_path.empty()) {
        if (c.text("out").empty()) {
            throw ConfigError("--fit needs --out or --fit-out");
        }
        fit_path = c.text("out") + ".fit.json";
    }

    struct Row {
        double T{0.0};
        double beta{0.0};
        ThermalFactor f;
        double phase{0.0};
        std::string failure;
    };
    std::vector<Row> rows(values.size());
    parallel_for(rows.size(), thread_count(c), [&](std::size_t i) {
        Row& row = rows[i];
        row.T = axis == "T" ? values[i] : 1.0 / values[i];
        row.beta = axis == "T" ? 1.0 / values[i] : values[i];
        try {
            row.f = thermal_factor(row.beta, opts);
            row.phase = std::cos(theta0) * row.f.value - pi;
        } catch (const NumericalError& e) {
            row.failure = e.what();
            row.f.value = row.phase = row.f.error_estimate = std::nan("");
        }
    });

    Table table{{"T", "beta", "f", "phi_g", "err", "truncated_mass"}, {}};
    std::size_t failures = 0;
    for (const auto& row : rows) {
        if (!row.failure.empty()) {
            ++failures;
            ctx.diag.warn("T = " + format_number(row.T) + ": " + row.failure);
        } else if (row.f.truncation_warning()) {
            ctx.diag.warn("T = " + format_number(row.T) + ": truncated Gaussian mass " +
                          format_number(row.f.truncated_mass) + " exceeds 1e-3");
        }
        table.rows.push_back({row.T, row.beta, row.f.value, row.phase, row.f.error_estimate, row.f.truncated_mass});
    }
    if (failures == rows.size()) {
        ctx.diag.error("every grid point failed");
        return kNumerical;
    }
    emit(ctx, [&](std::ostream& os) { write_table(os, table, format); });

    if (fit) {
        const double t_min = c.number("fit_T_min");
        const double t_max = c.number("fit_T_max");
        std::vector<numerics::Point> points;
        for (const auto& row : rows) {
            if (row.failure.empty() && row.T >= t_min && row.T <= t_max) {
                points.push_back({row.T, row.f.value});
            }
        }
        if (points.size() < 3) {
            throw ConfigError("the fit window holds fewer than 3 grid points");
        }
        const auto result = numerics::loglog_slope_fit(points);
        const json footer = {{"slope", result.slope},
                             {"intercept", result.intercept},
                             {"r_squared", result.r_squared},
                             {"crossover_T", crossover_temperature(result)},
                             {"fit_T_min", t_min},
                             {"fit_T_max", t_max},
                             {"points", points.size()}};
        std::ofstream file(fit_path, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw ConfigError("cannot open fit output " + fit_path);
        }
        file << dump_json(footer);
    }
    return kSuccess;
}

// ---- gp-mc ----

int cmd_gp_mc(Context& ctx) {
    const RunConfig& c = ctx.config;
    const Format format = output_format(c);
    require_positive(c, "beta");
    const auto n = c.integer("n_samples");
    if (n < 100) {
        throw ConfigError("n_samples must be at least 100");
    }
    MonteCarloOptions opts;
    opts.samples = static_cast<std::size_t>(n);
    opts.seed = c.unsigned_integer("seed");
    opts.threads = thread_count(c);
    const MonteCarloResult r = monte_carlo_thermal_gp(c.number("beta"), c.number("theta0"), opts);
    if (r.rejection_warning()) {
        ctx.diag.warn("rejected fraction " + format_number(r.rejected_fraction()) + " exceeds 1e-3");
    }
    const json report = {{"estimate", r.phase.value},
                         {"stderr", r.phase.error_estimate},
                         {"n", r.samples},
                         {"rejected_fraction", r.rejected_fraction()},
                         {"rejection_flag", r.rejection_warning()},
                         {"seed", r.seed},
                         {"inputs", {{"beta", c.number("beta")}, {"theta0", c.number("theta0")}}}};
    emit(ctx, [&](std::ostream& os) { write_report(os, report, format); });
    return kSuccess;
}

// ---- interf ----

int cmd_interf(Context& ctx) {
    const RunConfig& c = ctx.config;
    const Format format = output_format(c);
    require_qubit(c);
    require_positive(c, "t_end");
    const auto points = c.integer("points");
    if (points < 2) {
        throw ConfigError("points must be at least 2");
    }
    const double action0 = c.number("I0");
    if (!(std::abs(action0) <= 1.0)) {
        throw ConfigError("I0 must lie in [-1, 1]");
    }
    const double t_end = c.number("t_end");
    Table table{{"t", "J"}, {}};
    for (std::int64_t i = 0; i < points; ++i) {
        const double t = t_end * static_cast<double>(i) / static_cast<double>(points - 1);
        try {
            table.rows.push_back({t, interference_intensity(action0, c.number("phi0"), c.number("gamma"),
                                                            c.number("epsilon"), t)});
        } catch (const RangeError& e) {
            ctx.diag.warn(std::string(e.what()) + "; series truncated");
            break;
        }
    }
    emit(ctx, [&](std::ostream& os) { write_table(os, table, format); });
    return kSuccess;
}

// ---- sweep ----

int cmd_sweep(Context& ctx) {
    const RunConfig& c = ctx.config;
    const Format format = output_format(c);
    const std::string param = c.text("param");
    if (param != "gamma" && param != "theta0" && param != "epsilon") {
        throw ConfigError("param must be gamma, theta0 or epsilon");
    }
    const std::string method = c.text("gp");
    if (method != "closed" && method != "quad" && method != "series") {
        throw ConfigError("gp must be closed, quad or series");
    }
    const auto values = grid(c.text("grid"), c.number("start"), c.number("stop"), c.integer("points"));
    const auto opts = quadrature_options(c);
    const CycleConvention conv = cycle_convention(c);

    struct Row {
        double x{0.0};
        PhaseResult phase;
        std::string skipped;
    };
    std::vector<Row> rows(values.size());
    parallel_for(rows.size(), thread_count(c), [&](std::size_t i) {
        double gamma = c.number("gamma");
        double epsilon = c.number("epsilon");
        double theta0 = c.number("theta0");
        (param == "gamma" ? gamma : param == "epsilon" ? epsilon : theta0) = values[i];
        Row& row = rows[i];
        row.x = values[i];
        try {
            if (!(epsilon > 0.0) || !(gamma >= 0.0)) {
                throw DomainError("needs epsilon > 0 and gamma >= 0");
            }
            if (method == "closed") {
                row.phase = dissipative_gp_closed_form(gamma, epsilon, theta0);
            } else if (method == "series") {
                row.phase = weak_coupling_gp(gamma, epsilon, theta0);
            } else {
                renormalized_frequency(gamma, epsilon);
                const auto p = dissipative_qubit_profiles(gamma, epsilon, theta0, conv, c.number("xi"));
                row.phase = geometric_phase_quadrature(p.action, p.r_squared, conv, opts);
            }
        } catch (const Error& e) {
            row.skipped = e.what();
        }
    });

    Table table{{param, "phi_g", "error_estimate"}, {}};
    for (const auto& row : rows) {
        if (!row.skipped.empty()) {
            ctx.diag.warn(param + " = " + format_number(row.x) + " skipped: " + row.skipped);
            continue;
        }
        table.rows.push_back({row.x, row.phase.value, row.phase.error_estimate});
    }
    if (table.rows.empty()) {
        ctx.diag.error("no grid point lies in the valid regime");
        return kPhysicalValidity;
    }
    emit(ctx, [&](std::ostream& os) { write_table(os, table, format); });
    return kSuccess;
}

std::vector<Command> commands() {
    std::vector<Command> cmds;
    cmds.push_back({{"sim"},
                    with_common({text("model", "langevin", "langevin, langevin_as_printed or qubit"),
                                 num("I0", 0.5), num("phi0", 0.0), num("gamma", 0.0), num("epsilon", 1.0),
                                 num("t_end", 2.0 * pi), num("dt", 1e-3), count("stride", 1),
                                 text("noise", "none", "none, quenched or stepwise"), num("beta", 1.0),
                                 text("mean_mode", "zero", "zero or inverse_beta"),
                                 num("correlation_time", 0.1), num("pole_guard", kDefaultPoleGuard),
                                 text("method", "auto", "auto, rk4 or heun")},
                                "csv"),
                    cmd_sim});
    const auto gp_keys = concat({qubit_keys(), cycle_keys(), quadrature_keys(), {flag("cross_check")}});
    cmds.push_back({{"gp", "closed"}, with_common(gp_keys, "json"), cmd_gp_closed});
    cmds.push_back({{"gp", "quad"}, with_common(gp_keys, "json"), cmd_gp_quad});
    cmds.push_back({{"gp", "series"}, with_common(gp_keys, "json"), cmd_gp_series});
    cmds.push_back({{"gp-thermal"},
                    with_common(concat({{num("theta0", 0.0), text("axis", "T", "T or beta"),
                                         text("grid", "log"), num("start", 1e-2), num("stop", 1e3),
                                         count("points", 50), flag("fit"), num("fit_T_min", 10.0),
                                         num("fit_T_max", 1e3), text("fit_out", "")},
                                        quadrature_keys()}),
                                "csv"),
                    cmd_gp_thermal});
    cmds.push_back({{"gp-mc"},
                    with_common({num("beta", 1.0), num("theta0", 0.0), count("n_samples", 100000)}, "json"),
                    cmd_gp_mc});
    cmds.push_back({{"interf"},
                    with_common({num("I0", 0.0), num("phi0", 0.0), num("gamma", 0.0), num("epsilon", 1.0),
                                 num("t_end", 4.0 * pi), count("points", 401)},
                                "csv"),
                    cmd_interf});
    cmds.push_back({{"sweep"},
                    with_common(concat({{text("param", "gamma", "gamma, theta0 or epsilon"),
                                         text("gp", "closed", "closed, quad or series"), text("grid", "linear"),
                                         num("start", 0.0), num("stop", 2.0 / pi), count("points", 21)},
                                        qubit_keys(), cycle_keys(), quadrature_keys()}),
                                "csv"),
                    cmd_sweep});
    return cmds;
}

std::string flag_name(const std::string& key) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    return "--" + name;
}

const std::map<std::string, std::string>& descriptions() {
    static const std::map<std::string, std::string> text{
        {"sim", "integrate a trajectory and write it as a table"},
        {"gp", "geometric phase of one dissipative cycle"},
        {"closed", "closed-form phase"},
        {"quad", "phase by adaptive quadrature"},
        {"series", "weak-coupling series"},
        {"gp-thermal", "thermally averaged phase over a temperature grid"},
        {"gp-mc", "Monte Carlo estimate of the thermal average"},
        {"interf", "interference signal of the dissipative qubit"},
        {"sweep", "phase over a parameter grid"},
    };
    return text;
}

std::string describe(const std::string& name) {
    const auto it = descriptions().find(name);
    return it == descriptions().end() ? std::string{} : it->second;
}

struct Registered {
    const Command* command;
    CLI::App* app;
    std::map<std::string, std::string> text_values;
    std::map<std::string, bool> flag_values;
    std::string config_path;
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Diagnostics diag(err);
    const std::vector<Command> cmds = commands();

    CLI::App app{"Dissipative and stochastic geometric phase of a qubit on the breathing Bloch sphere", "bloch"};
    app.require_subcommand(1);
    std::map<std::string, CLI::App*> groups;
    std::vector<std::unique_ptr<Registered>> registered;
    for (const auto& cmd : cmds) {
        CLI::App* parent = &app;
        for (std::size_t i = 0; i + 1 < cmd.path.size(); ++i) {
            auto& group = groups[cmd.path[i]];
            if (group == nullptr) {
                group = parent->add_subcommand(cmd.path[i], describe(cmd.path[i]));
                group->require_subcommand(1);
            }
            parent = group;
        }
        auto reg = std::make_unique<Registered>();
        reg->command = &cmd;
        reg->app = parent->add_subcommand(cmd.path.back(), describe(cmd.path.back()));
        reg->app->add_option("--config", reg->config_path, "JSON file with flat configuration keys");
        for (const auto& key : cmd.keys) {
            if (key.kind == ValueKind::flag) {
                reg->app->add_flag(flag_name(key.name), reg->flag_values[key.name], key.help);
            } else {
                reg->app->add_option(flag_name(key.name), reg->text_values[key.name], key.help);
            }
        }
        registered.push_back(std::move(reg));
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kValidation;
    }

    for (auto& reg : registered) {
        if (!reg->app->parsed()) {
            continue;
        }
        try {
            RunConfig config(reg->command->keys);
            if (!reg->config_path.empty()) {
                config.load_file(reg->config_path);
            }
            for (const auto& key : reg->command->keys) {
                const std::string name = flag_name(key.name);
                if (reg->app->count(name) == 0) {
                    continue;
                }
                if (key.kind == ValueKind::flag) {
                    config.set(key.name, reg->flag_values[key.name]);
                } else {
                    config.set_from_text(key.name, reg->text_values[key.name]);
                }
            }
            Context ctx{config, diag, out};
            return reg->command->action(ctx);
        } catch (const ValidityError& e) {
            diag.error(e.what());
            return kPhysicalValidity;
        } catch (const RangeError& e) {
            diag.error(e.what());
            return kPhysicalValidity;
        } catch (const NumericalError& e) {
            diag.error(e.what());
            return kNumerical;
        } catch (const DomainError& e) {
            diag.error(e.what());
            return kValidation;
        } catch (const nlohmann::json::exception& e) {
            diag.error(e.what());
            return kValidation;
        }
    }
    return kUsage;
}

} // namespace bloch::cli
