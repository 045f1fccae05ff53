#include "stomod/fourier_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "stomod/errors.hpp"
#include "stomod/units.hpp"

namespace stomod {

namespace {

constexpr double kSingularRcond = 1e-13;
constexpr double kRelativeMuTolerance = 1e-12;

void check_inputs(const OperatingPoint& op, const ModulationConfig& mod) {
    // Soft warnings are the caller's business; only hard violations matter here.
    (void)validate_modulation(mod, op);
}

FourierSolution empty_solution(const OperatingPoint& op, const ModulationConfig& mod) {
    FourierSolution sol;
    sol.op = op;
    sol.modulation = mod;
    sol.a.assign(static_cast<std::size_t>(mod.n_harmonics), 0.0);
    sol.b.assign(static_cast<std::size_t>(mod.n_harmonics), 0.0);
    return sol;
}

// Unknowns interleaved as [A0, A1, B1, A2, B2, ...] so the matrix stays banded.
constexpr int index_a(int n) { return 2 * n - 1; }
constexpr int index_b(int n) { return 2 * n; }

}  // namespace

// Harmonic balance of  d(dp)/dt = mu C1 cos(wm t) + (mu C2 cos(wm t) - Gp) 2 dp
// with dp = A0 + sum A_n sin(n wm t) + B_n cos(n wm t):
//   DC:         2 Gp A0 - mu C2 B1                                  = 0
//   cos, n = 1: wm A1 + 2 Gp B1 - 2 mu C2 A0 - mu C2 B2              = mu C1
//   cos, n > 1: n wm A_n + 2 Gp B_n - mu C2 (B_{n-1} + B_{n+1})      = 0
//   sin, n:     2 Gp A_n - n wm B_n - mu C2 (A_{n-1} + A_{n+1})      = 0   (A_0 term absent)
FourierSolution solve_coefficients_matrix(const OperatingPoint& op, const ModulationConfig& mod) {
    check_inputs(op, mod);
    const int n_max = mod.n_harmonics;
    const int size = 2 * n_max + 1;
    const double wm = mod.omega_m;
    const double gp2 = 2.0 * op.gamma_p;
    const double coupling = mod.mu * op.c2;

    // Rows are scaled to O(1) to keep rcond meaningful.
    const double scale = 1.0 / std::max({wm, gp2, std::abs(coupling), 1.0});

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);

    m(0, 0) = gp2 * scale;
    m(0, index_b(1)) = -coupling * scale;

    for (int n = 1; n <= n_max; ++n) {
        const int cos_row = index_a(n);
        const int sin_row = index_b(n);
        const double nw = n * wm;

        m(cos_row, index_a(n)) += nw * scale;
        m(cos_row, index_b(n)) += gp2 * scale;
        if (n == 1) {
            m(cos_row, 0) += -2.0 * coupling * scale;
            rhs(cos_row) = mod.mu * op.c1 * scale;
        } else {
            m(cos_row, index_b(n - 1)) += -coupling * scale;
        }
        if (n < n_max) m(cos_row, index_b(n + 1)) += -coupling * scale;

        m(sin_row, index_a(n)) += gp2 * scale;
        m(sin_row, index_b(n)) += -nw * scale;
        if (n > 1) m(sin_row, index_a(n - 1)) += -coupling * scale;
        if (n < n_max) m(sin_row, index_a(n + 1)) += -coupling * scale;
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > kSingularRcond)) {
        std::ostringstream msg;
        msg << "harmonic-balance system is singular (rcond " << rcond << "; Gp = " << op.gamma_p
            << " rad/s, wm = " << wm << " rad/s)";
        throw SingularSystemError(msg.str());
    }
    const Eigen::VectorXd x = lu.solve(rhs);

    FourierSolution sol = empty_solution(op, mod);
    sol.a0 = x(0);
    for (int n = 1; n <= n_max; ++n) {
        sol.a[n - 1] = x(index_a(n));
        sol.b[n - 1] = x(index_b(n));
    }
    return sol;
}

FourierSolution solve_coefficients_recursive(const OperatingPoint& op, const ModulationConfig& mod) {
    check_inputs(op, mod);
    if (!(op.gamma_p > 0.0)) throw SingularSystemError("recursive solve requires Gp > 0");

    const double wm = mod.omega_m;
    const double gp2 = 2.0 * op.gamma_p;
    const double coupling = mod.mu * op.c2;
    FourierSolution sol = empty_solution(op, mod);

    // n = 1 with A2 = B2 = 0 and A0 = mu C2 B1 / (2 Gp) substituted:
    //   wm A1 + (2 Gp - 2 mu C2 * mu C2 / (2 Gp)) B1 = mu C1
    //   2 Gp A1 - wm B1                               = 0
    {
        const double m11 = wm;
        const double m12 = gp2 - 2.0 * coupling * coupling / gp2;
        const double m21 = gp2;
        const double m22 = -wm;
        const double det = m11 * m22 - m12 * m21;
        if (det == 0.0) throw SingularSystemError("degenerate first-harmonic block");
        const double r1 = mod.mu * op.c1;
        sol.a[0] = (r1 * m22) / det;
        sol.b[0] = (-m21 * r1) / det;
        sol.a0 = coupling * sol.b[0] / gp2;
    }

    // n >= 2, dropping the n+1 coupling:
    //   n wm A_n + 2 Gp B_n = mu C2 B_{n-1}
    //   2 Gp A_n - n wm B_n = mu C2 A_{n-1}
    for (int n = 2; n <= mod.n_harmonics; ++n) {
        const double nw = n * wm;
        const double det = -(nw * nw) - gp2 * gp2;
        const double r1 = coupling * sol.b[n - 2];
        const double r2 = coupling * sol.a[n - 2];
        sol.a[n - 1] = (r1 * -nw - gp2 * r2) / det;
        sol.b[n - 1] = (nw * r2 - gp2 * r1) / det;
    }
    return sol;
}

FourierSolution solve_coefficients(const OperatingPoint& op, const ModulationConfig& mod, SolveMethod method) {
    return method == SolveMethod::matrix ? solve_coefficients_matrix(op, mod)
                                         : solve_coefficients_recursive(op, mod);
}

double carrier_shift_hz(const FourierSolution& sol) {
    if (sol.n_harmonics() == 0) return 0.0;
    return sol.modulation.mu * sol.op.nu * sol.op.c2 * sol.b[0] / kTwoPi;
}

double shifted_carrier_omega(const FourierSolution& sol) {
    return sol.op.omega_sto + 2.0 * sol.op.nu * sol.op.gamma_p * sol.a0;
}

double modulation_index(const FourierSolution& sol, int n) {
    if (n < 1 || n > sol.n_harmonics()) return 0.0;
    return 2.0 * std::abs(sol.op.nu) * sol.op.gamma_p * std::abs(sol.x(n)) / (n * sol.modulation.omega_m);
}

std::vector<HarmonicDescriptor> harmonic_descriptors(const FourierSolution& sol) {
    std::vector<HarmonicDescriptor> out;
    out.reserve(static_cast<std::size_t>(sol.n_harmonics()));
    for (int n = 1; n <= sol.n_harmonics(); ++n) {
        HarmonicDescriptor d;
        d.n = n;
        d.x_abs = std::hypot(sol.a[n - 1], sol.b[n - 1]);
        d.psi = std::atan2(sol.a[n - 1], sol.b[n - 1]);
        // |nu| keeps beta a non-negative magnitude for either sign of the nonlinearity.
        d.beta = 2.0 * std::abs(sol.op.nu) * sol.op.gamma_p * d.x_abs / (n * sol.modulation.omega_m);
        d.delta_f_hz = std::abs(sol.op.nu) * sol.op.gamma_p * d.x_abs / std::numbers::pi;
        out.push_back(d);
    }
    return out;
}

bool coefficients_decay(const FourierSolution& sol) {
    const int n = sol.n_harmonics();
    if (n <= 1) return true;
    return std::abs(sol.x(n)) <= std::abs(sol.x(1));
}

double coefficient_error_pct(const FourierSolution& candidate, const FourierSolution& reference) {
    double diff = 0.0;
    double norm = 0.0;
    for (int n = 1; n <= reference.n_harmonics(); ++n) {
        const double ref = std::abs(reference.x(n));
        norm += ref;
        diff += n <= candidate.n_harmonics() ? std::abs(std::abs(candidate.x(n)) - ref) : ref;
    }
    // Harmonics beyond the reference are not part of the metric.
    if (norm == 0.0) return 0.0;
    return 100.0 * diff / norm;
}

std::vector<TruncationErrorPoint> truncation_error(const OperatingPoint& op, const ModulationConfig& mod,
                                                   std::span<const int> n_values, int n_ref) {
    for (int n : n_values) {
        if (n < 1 || n > n_ref) throw ConfigError("truncation orders must lie in [1, n_ref]");
    }
    ModulationConfig ref_mod = mod;
    ref_mod.n_harmonics = n_ref;
    const FourierSolution reference = solve_coefficients_matrix(op, ref_mod);

    std::vector<TruncationErrorPoint> out;
    out.reserve(n_values.size());
    for (int n : n_values) {
        ModulationConfig m = mod;
        m.n_harmonics = n;
        out.push_back({n, coefficient_error_pct(solve_coefficients_matrix(op, m), reference)});
    }
    return out;
}

double mu_for_modulation_index(const OperatingPoint& op, double omega_m, int n_harmonics, double beta1_target,
                               const BackSolveOptions& options) {
    if (!std::isfinite(beta1_target) || beta1_target < 0.0)
        throw ConfigError("target modulation index must be finite and >= 0");
    if (!(options.mu_max > 0.0)) throw ConfigError("back-solve bracket mu_max must be positive");
    if (beta1_target == 0.0) return 0.0;

    auto beta1 = [&](double mu) {
        const FourierSolution sol = solve_coefficients(op, {mu, omega_m, n_harmonics}, options.method);
        return modulation_index(sol, 1);
    };

    // Coarse scan: locate the first bracket containing the target and make sure
    // beta_1 is increasing up to it.
    const int probes = std::max(options.monotonicity_probes, 1);
    double lo = 0.0;
    double beta_lo = 0.0;
    double hi = options.mu_max;
    bool found = false;
    for (int i = 1; i <= probes; ++i) {
        const double mu = options.mu_max * i / probes;
        const double beta = beta1(mu);
        if (beta < beta_lo) {
            std::ostringstream msg;
            msg << "beta_1(mu) is not monotone on [0, " << options.mu_max << "] near mu = " << mu;
            throw UnreachableTargetError(msg.str());
        }
        if (beta >= beta1_target) {
            hi = mu;
            found = true;
            break;
        }
        lo = mu;
        beta_lo = beta;
    }
    if (!found) {
        std::ostringstream msg;
        msg << "beta_1 = " << beta1_target << " is unreachable with mu <= " << options.mu_max
            << " (beta_1(mu_max) = " << beta_lo << ")";
        throw UnreachableTargetError(msg.str());
    }

    // Absolute tolerance, tightened to a relative one for tiny mu (strong phase coupling).
    auto unconverged = [&] {
        const double width = hi - lo;
        return width > std::min(options.tolerance, kRelativeMuTolerance * hi) &&
               width > 4.0 * std::numeric_limits<double>::epsilon() * hi;
    };
    while (unconverged()) {
        const double mid = 0.5 * (lo + hi);
        if (beta1(mid) < beta1_target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace stomod
