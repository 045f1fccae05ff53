#pragma once

#include <span>
#include <string>
#include <vector>

namespace stomod {

/// Raw macrospin inputs of a perpendicular-field nanocontact oscillator.
///
/// Only the combinations that enter the reduced power/phase equations are kept;
/// the spin-torque efficiency and threshold current appear solely through the
/// supercriticality `xi`.
struct DeviceParams {
    double mu0_h_app_t = 1.0;        ///< applied field, tesla
    double mu0_ms_t = 0.8;           ///< saturation magnetization, tesla
    double gamma_hz_per_t = 28.0e9;  ///< gyromagnetic ratio, cyclic (Hz/T)
    double alpha = 0.01;             ///< Gilbert damping
    double nu = 100.0;               ///< nonlinear frequency shift coefficient
    double xi = 1.2;                 ///< supercriticality I_dc / I_th
};

/// Per-bias constants of the linearized power/phase equations, rad/s unless noted.
struct OperatingPoint {
    double omega_o = 0.0;    ///< FMR frequency
    double omega_sto = 0.0;  ///< free-running frequency
    double gamma_p = 0.0;    ///< restoration rate
    double p0 = 0.0;         ///< free-running normalized power
    double c1 = 0.0;         ///< negative damping at p0
    double c2 = 0.0;         ///< negative damping plus its power derivative times p0
    double nu = 0.0;
};

/// Single-tone current modulation I(t) = I_dc (1 + mu cos(omega_m t)).
struct ModulationConfig {
    double mu = 0.0;
    double omega_m = 0.0;  ///< rad/s
    int n_harmonics = 10;  ///< Fourier truncation order N
};

struct DispersionPoint {
    double xi = 0.0;
    double f_sto_hz = 0.0;
};

/// Throws UnsaturatedRegimeError / ConfigError. `xi` is not checked here.
void validate_device(const DeviceParams& params);

/// Derives the operating point under the first-order damping model
/// Gamma_+(p) = alpha*omega_o, Gamma_-(p) = alpha*omega_o*xi*(1 - p).
/// Throws BelowThresholdError for xi <= 1.
[[nodiscard]] OperatingPoint derive_operating_point(const DeviceParams& params);

/// Same formulas as derive_operating_point but accepts xi = 1 (Gp = 0), as
/// needed for dispersion sweeps that start at threshold.
[[nodiscard]] OperatingPoint evaluate_operating_point(const DeviceParams& params);

/// Checks a modulation against an operating point. Hard violations throw
/// ConfigError; soft ones (mu >= 1, omega_m not small against omega_sto) come
/// back as human-readable warnings.
[[nodiscard]] std::vector<std::string> validate_modulation(const ModulationConfig& mod,
                                                           const OperatingPoint& op);

/// Free-running frequency over a supercriticality grid. Accepts xi >= 1.
[[nodiscard]] std::vector<DispersionPoint> frequency_dispersion(const DeviceParams& params,
                                                                std::span<const double> xi_grid);

}  // namespace stomod
