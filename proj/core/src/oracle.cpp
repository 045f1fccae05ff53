#include "stomod/oracle.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "stomod/errors.hpp"
#include "stomod/units.hpp"

namespace stomod {

namespace {

using State = std::array<double, 2>;  // {dp, phase relative to omega_sto * t}

template <class Rhs>
State rk4_step(const Rhs& f, double t, const State& y, double h) {
    auto axpy = [](const State& a, double s, const State& b) { return State{a[0] + s * b[0], a[1] + s * b[1]}; };
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const State k3 = f(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const State k4 = f(t + h, axpy(y, h, k3));
    return {y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

long steps_for(double span, double dt, const char* what) {
    const double steps = span / dt;
    const double whole = std::round(steps);
    if (std::abs(steps - whole) > 1e-6 * std::max(1.0, whole)) {
        std::ostringstream msg;
        msg << what << " is not a whole number of time steps (" << steps << ")";
        throw IntegrationConfigError(msg.str());
    }
    return static_cast<long>(whole);
}

template <class Rhs>
TimeTrace run(const Rhs& f, const OperatingPoint& op, const ModulationConfig& mod, const IntegrationConfig& icfg) {
    validate_integration(icfg, op, mod);
    const long n_total = steps_for(icfg.t_end, icfg.dt, "t_end");
    const long n_cut = steps_for(icfg.transient_cut, icfg.dt, "transient_cut");

    TimeTrace trace;
    trace.omega_m = mod.omega_m;
    const auto kept = static_cast<std::size_t>(n_total - n_cut);
    trace.t.reserve(kept);
    trace.delta_p.reserve(kept);
    trace.phi.reserve(kept);

    State y{icfg.initial_delta_p, 0.0};
    double phase_at_cut = 0.0;
    for (long k = 0; k < n_total; ++k) {
        const double t = static_cast<double>(k) * icfg.dt;
        if (k >= n_cut) {
            if (k == n_cut) phase_at_cut = y[1];
            trace.t.push_back(t);
            trace.delta_p.push_back(y[0]);
            trace.phi.push_back(y[1]);
        }
        y = rk4_step(f, t, y, icfg.dt);
        if (!std::isfinite(y[0])) throw NumericalError("integration diverged");
    }

    const double window = static_cast<double>(n_total - n_cut) * icfg.dt;
    const double drift = (y[1] - phase_at_cut) / window;
    trace.reference_omega = op.omega_sto + drift;
    for (std::size_t i = 0; i < trace.phi.size(); ++i) {
        trace.phi[i] = trace.phi[i] - drift * trace.t[i] + icfg.initial_phase;
    }
    return trace;
}

}  // namespace

IntegrationConfig make_integration_config(const OperatingPoint& op, const ModulationConfig& mod,
                                          int steps_per_period, int analysis_periods, double transient_factor) {
    if (!(mod.omega_m > 0.0)) throw IntegrationConfigError("modulation frequency must be positive");
    if (!(op.gamma_p > 0.0)) throw IntegrationConfigError("restoration rate must be positive");
    if (analysis_periods < 1) throw IntegrationConfigError("analysis_periods must be >= 1");

    const double period = kTwoPi / mod.omega_m;
    // Both timescales must be resolved: dt <= T/200 and dt <= 0.1/Gp.
    const double min_for_gp = std::ceil(10.0 * op.gamma_p * period);
    const int steps = std::max({steps_per_period, 200, static_cast<int>(min_for_gp)});
    const double transient_periods = std::ceil(transient_factor / (op.gamma_p * period));

    IntegrationConfig icfg;
    icfg.dt = period / steps;
    icfg.transient_cut = transient_periods * period;
    icfg.t_end = (transient_periods + analysis_periods) * period;
    return icfg;
}

void validate_integration(const IntegrationConfig& icfg, const OperatingPoint& op, const ModulationConfig& mod) {
    if (!(icfg.dt > 0.0) || !std::isfinite(icfg.dt)) throw IntegrationConfigError("dt must be positive");
    if (!(mod.omega_m > 0.0)) throw IntegrationConfigError("modulation frequency must be positive");
    if (!(op.gamma_p > 0.0)) throw IntegrationConfigError("restoration rate must be positive");
    const double period = kTwoPi / mod.omega_m;
    const double slack = 1.0 + 1e-9;

    std::ostringstream msg;
    if (icfg.dt > period / 200.0 * slack) {
        msg << "dt = " << icfg.dt << " s exceeds T/200 = " << period / 200.0 << " s";
    } else if (icfg.dt > 0.1 / op.gamma_p * slack) {
        msg << "dt = " << icfg.dt << " s exceeds 0.1/Gp = " << 0.1 / op.gamma_p << " s";
    } else if (icfg.transient_cut * slack < 10.0 / op.gamma_p) {
        msg << "transient_cut = " << icfg.transient_cut << " s is shorter than 10/Gp = " << 10.0 / op.gamma_p
            << " s";
    } else if (!(icfg.t_end > icfg.transient_cut)) {
        msg << "t_end must exceed transient_cut";
    } else if (icfg.model == OscillatorModel::full_nonlinear && !(op.p0 > 0.0 && op.p0 < 1.0)) {
        msg << "full model needs 0 < p0 < 1";
    }
    if (!msg.str().empty()) throw IntegrationConfigError(msg.str());
}

TimeTrace integrate(const OperatingPoint& op, const ModulationConfig& mod, const IntegrationConfig& icfg) {
    const double mu = mod.mu;
    const double wm = mod.omega_m;
    const double phase_gain = 2.0 * op.nu * op.gamma_p;

    if (icfg.model == OscillatorModel::reduced) {
        auto f = [&](double t, const State& y) {
            const double c = std::cos(wm * t);
            return State{mu * op.c1 * c + (mu * op.c2 * c - op.gamma_p) * 2.0 * y[0], phase_gain * y[0]};
        };
        return run(f, op, mod, icfg);
    }

    // Unexpanded power equation with Gamma_+ = G and Gamma_- = G xi (1 + mu cos) (1 - p),
    // where G = Gp (1 - p0) / p0 and xi = 1 / (1 - p0) follow from the operating point.
    validate_integration(icfg, op, mod);
    const double gilbert = op.gamma_p * (1.0 - op.p0) / op.p0;
    const double xi = 1.0 / (1.0 - op.p0);
    auto f = [&, gilbert, xi](double t, const State& y) {
        const double p = op.p0 * (1.0 + 2.0 * y[0]);
        const double negative = gilbert * xi * (1.0 + mu * std::cos(wm * t)) * (1.0 - p);
        return State{-(gilbert - negative) * (1.0 + 2.0 * y[0]), phase_gain * y[0]};
    };
    return run(f, op, mod, icfg);
}

TimeTrace integrate_reduced(const OperatingPoint& op, const ModulationConfig& mod, IntegrationConfig icfg) {
    icfg.model = OscillatorModel::reduced;
    return integrate(op, mod, icfg);
}

FourierSolution project_harmonics(const TimeTrace& trace, const OperatingPoint& op, const ModulationConfig& mod,
                                  int n_harmonics) {
    if (n_harmonics < 1) throw ConfigError("n_harmonics must be >= 1");
    const std::size_t m = trace.size();
    if (m < static_cast<std::size_t>(2 * n_harmonics + 2) || trace.delta_p.size() != m)
        throw ConfigError("trace too short to resolve the requested harmonics");

    const double dt = (trace.t.back() - trace.t.front()) / static_cast<double>(m - 1);
    const double periods = static_cast<double>(m) * dt * trace.omega_m / kTwoPi;
    if (std::round(periods) < 1.0 || std::abs(periods - std::round(periods)) > 1e-6) {
        std::ostringstream msg;
        msg << "trace spans " << periods << " modulation periods; projection needs whole periods";
        throw WindowingError(msg.str());
    }

    FourierSolution sol;
    sol.op = op;
    sol.modulation = mod;
    sol.modulation.n_harmonics = n_harmonics;
    sol.a.assign(static_cast<std::size_t>(n_harmonics), 0.0);
    sol.b.assign(static_cast<std::size_t>(n_harmonics), 0.0);

    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double v = trace.delta_p[i];
        const double wt = trace.omega_m * trace.t[i];
        sol.a0 += v * inv_m;
        for (int n = 1; n <= n_harmonics; ++n) {
            sol.a[n - 1] += 2.0 * inv_m * v * std::sin(n * wt);
            sol.b[n - 1] += 2.0 * inv_m * v * std::cos(n * wt);
        }
    }
    return sol;
}

}  // namespace stomod
