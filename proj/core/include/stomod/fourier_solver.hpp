#pragma once

#include <complex>
#include <span>
#include <vector>

#include "stomod/oscillator_model.hpp"

namespace stomod {

enum class SolveMethod { matrix, recursive };

/// Truncated Fourier series of the power perturbation
///   dp(t) = a0 + sum_n a[n-1] sin(n wm t) + b[n-1] cos(n wm t).
struct FourierSolution {
    double a0 = 0.0;
    std::vector<double> a;
    std::vector<double> b;
    OperatingPoint op;
    ModulationConfig modulation;

    [[nodiscard]] int n_harmonics() const noexcept { return static_cast<int>(a.size()); }

    /// X_n = B_n + i A_n, 1-based; zero outside [1, N].
    [[nodiscard]] std::complex<double> x(int n) const noexcept {
        if (n < 1 || n > n_harmonics()) return {};
        return {b[n - 1], a[n - 1]};
    }
};

struct HarmonicDescriptor {
    int n = 0;
    double x_abs = 0.0;       ///< |X_n|
    double psi = 0.0;         ///< atan2(A_n, B_n)
    double beta = 0.0;        ///< modulation index 2 nu Gp |X_n| / (n wm)
    double delta_f_hz = 0.0;  ///< peak deviation nu Gp |X_n| / pi
};

struct TruncationErrorPoint {
    int n_harmonics = 0;
    double total_error_pct = 0.0;
};

/// Direct solve of the (2N+1)-unknown harmonic-balance system with closure
/// A_{N+1} = B_{N+1} = 0. Throws SingularSystemError on a degenerate system.
[[nodiscard]] FourierSolution solve_coefficients_matrix(const OperatingPoint& op,
                                                        const ModulationConfig& mod);

/// Upward-marching approximation: every harmonic is solved from its lower
/// neighbour with the n+1 coupling dropped.
[[nodiscard]] FourierSolution solve_coefficients_recursive(const OperatingPoint& op,
                                                           const ModulationConfig& mod);

[[nodiscard]] FourierSolution solve_coefficients(const OperatingPoint& op, const ModulationConfig& mod,
                                                 SolveMethod method = SolveMethod::matrix);

/// Shifted-carrier offset f_s = mu nu C2 B1 / (2 pi), equal to 2 nu Gp A0 / (2 pi).
[[nodiscard]] double carrier_shift_hz(const FourierSolution& sol);

/// omega_sto + 2 nu Gp A0, rad/s.
[[nodiscard]] double shifted_carrier_omega(const FourierSolution& sol);

[[nodiscard]] double modulation_index(const FourierSolution& sol, int n);

[[nodiscard]] std::vector<HarmonicDescriptor> harmonic_descriptors(const FourierSolution& sol);

/// Soft check: |X_N| <= |X_1|.
[[nodiscard]] bool coefficients_decay(const FourierSolution& sol);

/// Relative L1 distance of the |X_n| magnitudes, in percent. Harmonics the
/// candidate lacks count with their full reference magnitude.
[[nodiscard]] double coefficient_error_pct(const FourierSolution& candidate,
                                           const FourierSolution& reference);

/// Matrix-solution truncation error for each N against an N_ref solution.
[[nodiscard]] std::vector<TruncationErrorPoint> truncation_error(const OperatingPoint& op,
                                                                 const ModulationConfig& mod,
                                                                 std::span<const int> n_values,
                                                                 int n_ref);

struct BackSolveOptions {
    double mu_max = 0.5;
    double tolerance = 1e-10;  ///< absolute, on mu; never looser than 1e-12 relative
    int monotonicity_probes = 16;
    SolveMethod method = SolveMethod::matrix;
};

/// Finds mu such that beta_1(mu) equals the target, by bisection on [0, mu_max].
/// Throws UnreachableTargetError if the target lies beyond beta_1(mu_max) or
/// beta_1 is not monotone on the bracket below the root.
[[nodiscard]] double mu_for_modulation_index(const OperatingPoint& op, double omega_m, int n_harmonics,
                                             double beta1_target, const BackSolveOptions& options = {});

}  // namespace stomod
