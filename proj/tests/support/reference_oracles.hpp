#pragma once

// Reference computations used by the tests. None of these call into the
// solver or spectrum code paths they are checking.

#include <cmath>
#include <complex>
#include <vector>

#include "stomod/fourier_solver.hpp"
#include "stomod/oscillator_model.hpp"
#include "stomod/spectrum.hpp"

namespace stomod::test {

inline constexpr double kPi = 3.14159265358979323846;

/// Reference device: 1 T applied, 0.8 T saturation, 28 GHz/T, alpha 0.01, nu 100.
inline DeviceParams reference_device(double xi) {
    DeviceParams p;
    p.mu0_h_app_t = 1.0;
    p.mu0_ms_t = 0.8;
    p.gamma_hz_per_t = 28e9;
    p.alpha = 0.01;
    p.nu = 100.0;
    p.xi = xi;
    return p;
}

// Hand-computed: f_o = 28 GHz/T * 0.2 T = 5.6 GHz, alpha f_o = 56 MHz, Gp/2pi = 56 MHz (xi - 1).
inline constexpr double kGammaP_OP1_Hz = 11.2e6;
inline constexpr double kGammaP_OP2_Hz = 44.8e6;
inline constexpr double kGammaP_OP3_Hz = 156.8e6;

struct SeriesValue {
    double value;
    double derivative;
};

/// dp(t) and d(dp)/dt straight from the coefficient arrays.
inline SeriesValue evaluate_series(const FourierSolution& sol, double t) {
    const double wm = sol.modulation.omega_m;
    SeriesValue out{sol.a0, 0.0};
    for (int n = 1; n <= sol.n_harmonics(); ++n) {
        const double s = std::sin(n * wm * t);
        const double c = std::cos(n * wm * t);
        const double an = sol.a[n - 1];
        const double bn = sol.b[n - 1];
        out.value += an * s + bn * c;
        out.derivative += n * wm * (an * c - bn * s);
    }
    return out;
}

/// Max over one period of |d(dp)/dt - [mu C1 cos + 2 (mu C2 cos - Gp) dp]|,
/// normalized by mu C1. Zero up to the truncated N+1 harmonic.
inline double ode_residual(const FourierSolution& sol, int samples = 512) {
    const auto& op = sol.op;
    const double mu = sol.modulation.mu;
    const double wm = sol.modulation.omega_m;
    const double period = 2.0 * kPi / wm;
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = period * i / samples;
        const auto v = evaluate_series(sol, t);
        const double c = std::cos(wm * t);
        const double rhs = mu * op.c1 * c + 2.0 * (mu * op.c2 * c - op.gamma_p) * v.value;
        worst = std::max(worst, std::abs(v.derivative - rhs));
    }
    return worst / (mu * op.c1);
}

/// With C2 = 0 the power equation is a driven first-order low-pass:
/// dp = mu C1 (2 Gp cos + wm sin) / (4 Gp^2 + wm^2).
struct FirstHarmonic {
    double a1;
    double b1;
};
inline FirstHarmonic lowpass_first_harmonic(const OperatingPoint& op, double mu, double omega_m) {
    const double d = 4.0 * op.gamma_p * op.gamma_p + omega_m * omega_m;
    return {mu * op.c1 * omega_m / d, mu * op.c1 * 2.0 * op.gamma_p / d};
}

/// Direct DFT of (1 + dp) exp(i phi) at frequency k omega_m, normalized by the
/// sample count. The trace must span whole periods.
inline std::complex<double> dft_line(const TimeTrace& trace, int k) {
    std::complex<double> acc{};
    const double wm = trace.omega_m;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double t = trace.t[i];
        const std::complex<double> s = (1.0 + trace.delta_p[i]) * std::exp(std::complex<double>(0.0, trace.phi[i]));
        acc += s * std::exp(std::complex<double>(0.0, -k * wm * t));
    }
    return acc / static_cast<double>(trace.size());
}

/// Copy of an operating point with the phase coupling and C2 term changed.
inline OperatingPoint with_couplings(OperatingPoint op, double nu, double c2) {
    op.omega_sto = op.omega_o + nu * op.gamma_p;
    op.nu = nu;
    op.c2 = c2;
    return op;
}

}  // namespace stomod::test
