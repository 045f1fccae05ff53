#pragma once

#include "stomod/fourier_solver.hpp"
#include "stomod/spectrum.hpp"

namespace stomod {

enum class OscillatorModel {
    reduced,         ///< linearized power/phase equations (default)
    full_nonlinear,  ///< unexpanded power equation with the first-order damping model
};

struct IntegrationConfig {
    double dt = 0.0;             ///< s
    double t_end = 0.0;          ///< s
    double transient_cut = 0.0;  ///< s, samples before this are dropped
    double initial_delta_p = 0.0;
    double initial_phase = 0.0;  ///< rad
    OscillatorModel model = OscillatorModel::reduced;
};

/// Step size T/steps_per_period; transient rounded up to whole periods of at
/// least transient_factor / Gp; analysis window of `analysis_periods` periods.
[[nodiscard]] IntegrationConfig make_integration_config(const OperatingPoint& op,
                                                        const ModulationConfig& mod,
                                                        int steps_per_period, int analysis_periods,
                                                        double transient_factor = 10.0);

/// dt <= T/200, dt <= 0.1/Gp, transient_cut >= 10/Gp, grid-aligned times.
/// Throws IntegrationConfigError.
void validate_integration(const IntegrationConfig& icfg, const OperatingPoint& op,
                          const ModulationConfig& mod);

/// Fixed-step RK4 of the oscillator model selected by `icfg.model`. Returns
/// post-transient samples with the mean phase drift removed
/// (reference_omega = omega_sto + drift).
[[nodiscard]] TimeTrace integrate(const OperatingPoint& op, const ModulationConfig& mod,
                                  const IntegrationConfig& icfg);

/// integrate() with the linearized power/phase equations, whatever icfg.model says.
[[nodiscard]] TimeTrace integrate_reduced(const OperatingPoint& op, const ModulationConfig& mod,
                                          IntegrationConfig icfg);

/// Projects a whole-period trace onto 1, sin(n wm t), cos(n wm t).
/// Throws WindowingError when the trace does not span whole periods.
[[nodiscard]] FourierSolution project_harmonics(const TimeTrace& trace, const OperatingPoint& op,
                                                const ModulationConfig& mod, int n_harmonics);

}  // namespace stomod
