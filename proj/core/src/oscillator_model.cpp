#include "stomod/oscillator_model.hpp"

#include <cmath>
#include <sstream>

#include "stomod/errors.hpp"
#include "stomod/units.hpp"

namespace stomod {

namespace {

// Ratio above which omega_m no longer counts as a slow modulation.
constexpr double kSlowModulationRatio = 0.1;

}  // namespace

void validate_device(const DeviceParams& params) {
    if (!std::isfinite(params.mu0_h_app_t) || !std::isfinite(params.mu0_ms_t) ||
        !std::isfinite(params.gamma_hz_per_t) || !std::isfinite(params.alpha) ||
        !std::isfinite(params.nu) || !std::isfinite(params.xi)) {
        throw ConfigError("device parameters must be finite");
    }
    if (params.mu0_h_app_t <= params.mu0_ms_t) {
        std::ostringstream msg;
        msg << "applied field " << params.mu0_h_app_t << " T does not exceed saturation magnetization "
            << params.mu0_ms_t << " T; perpendicular saturated regime required";
        throw UnsaturatedRegimeError(msg.str());
    }
    if (params.gamma_hz_per_t <= 0.0) throw ConfigError("gyromagnetic ratio must be positive");
    if (params.alpha <= 0.0) throw ConfigError("Gilbert damping alpha must be positive");
}

OperatingPoint derive_operating_point(const DeviceParams& params) {
    if (!(params.xi > 1.0)) {
        std::ostringstream msg;
        msg << "supercriticality xi = " << params.xi << " is at or below threshold (xi > 1 required)";
        throw BelowThresholdError(msg.str());
    }
    return evaluate_operating_point(params);
}

OperatingPoint evaluate_operating_point(const DeviceParams& params) {
    validate_device(params);
    if (!(params.xi >= 1.0)) throw BelowThresholdError("supercriticality must be >= 1");

    OperatingPoint op;
    op.omega_o = kTwoPi * params.gamma_hz_per_t * (params.mu0_h_app_t - params.mu0_ms_t);
    op.nu = params.nu;

    const double gilbert = params.alpha * op.omega_o;  // Gamma_+ = Gamma_G
    op.gamma_p = gilbert * (params.xi - 1.0);
    op.omega_sto = op.omega_o + params.nu * op.gamma_p;

    // Gamma_-(p) = sigma*I*(1 - p) with sigma*I = Gamma_G * xi; p0 balances Gamma_+.
    const double sigma_i = gilbert * params.xi;
    op.p0 = 1.0 - 1.0 / params.xi;
    op.c1 = sigma_i * (1.0 - op.p0);
    op.c2 = op.c1 + (-sigma_i) * op.p0;
    return op;
}

std::vector<std::string> validate_modulation(const ModulationConfig& mod, const OperatingPoint& op) {
    if (!std::isfinite(mod.mu) || mod.mu < 0.0) throw ConfigError("modulation strength mu must be >= 0");
    if (!std::isfinite(mod.omega_m) || mod.omega_m <= 0.0)
        throw ConfigError("modulation frequency must be positive");
    if (mod.n_harmonics < 1) throw ConfigError("truncation order N must be >= 1");
    if (!std::isfinite(op.gamma_p) || op.gamma_p < 0.0)
        throw ConfigError("operating point has an invalid restoration rate");

    std::vector<std::string> warnings;
    if (mod.mu >= 1.0) {
        std::ostringstream msg;
        msg << "mu = " << mod.mu << " >= 1: outside the small-modulation validity range";
        warnings.push_back(msg.str());
    }
    if (op.omega_sto > 0.0 && mod.omega_m > kSlowModulationRatio * op.omega_sto) {
        std::ostringstream msg;
        msg << "f_m = " << to_hz(mod.omega_m) << " Hz is not small against f_sto = " << to_hz(op.omega_sto)
            << " Hz";
        warnings.push_back(msg.str());
    }
    return warnings;
}

std::vector<DispersionPoint> frequency_dispersion(const DeviceParams& params,
                                                  std::span<const double> xi_grid) {
    std::vector<DispersionPoint> out;
    out.reserve(xi_grid.size());
    DeviceParams p = params;
    for (double xi : xi_grid) {
        p.xi = xi;
        out.push_back({xi, to_hz(evaluate_operating_point(p).omega_sto)});
    }
    return out;
}

}  // namespace stomod
