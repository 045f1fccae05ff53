// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "stomod/cli/commands.hpp"
#include "stomod/errors.hpp"
#include "stomod/fourier_solver.hpp"
#include "stomod/oracle.hpp"
#include "stomod/spectrum.hpp"
#include "stomod/units.hpp"
#include "support/reference_oracles.hpp"

using namespace stomod;

namespace {

// Pinned tolerances.
constexpr double kOracleL2 = 1e-6;
constexpr double kOracleCoefAbs = 1e-6;
constexpr double kOracleSeconds = 10.0;
constexpr double kGammaRel = 1e-12;
constexpr double kShiftRel = 1e-12;
constexpr double kTruncPct = 1e-5;
constexpr double kTruncSeconds = 5.0;
constexpr double kPureFmRel = 1e-6;
constexpr double kPureFmNu = 1e8;
constexpr double kPureAmFloor = 1e-12;
constexpr double kCrossPathRel = 0.01;
constexpr double kCrossPathSeconds = 60.0;
constexpr double kCrossPathMuMax = 5.0;
constexpr double kMbwRel = 0.02;
constexpr double kDeviationRel = 0.01;
constexpr double kMonotoneSlack = 1e-15;

struct Outcome {
    bool pass = false;
    std::string detail;
    double limit_s = 0.0;  // 0: no runtime limit
};

OperatingPoint op_at(double xi) { return derive_operating_point(test::reference_device(xi)); }

const std::vector<std::pair<std::string, double>> kPoints{{"OP1", 1.2}, {"OP2", 1.8}, {"OP3", 3.8}};

double relative(double value, double ref) {
    if (ref == 0.0) return value == 0.0 ? 0.0 : INFINITY;
    return std::abs(value - ref) / std::abs(ref);
}

Outcome oracle_equivalence() {
    const auto op = op_at(1.8);
    const ModulationConfig mod{0.05, to_rad_s(100e6), 10};
    const auto sol = solve_coefficients_matrix(op, mod);
    const auto trace = integrate(op, mod, make_integration_config(op, mod, 1024, 1));

    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double ref = test::evaluate_series(sol, trace.t[i]).value;
        num += (trace.delta_p[i] - ref) * (trace.delta_p[i] - ref);
        den += ref * ref;
    }
    const double l2 = std::sqrt(num / den);

    const auto projected = project_harmonics(trace, op, mod, 10);
    double coef = std::abs(projected.a0 - sol.a0);
    for (int n = 0; n < 10; ++n) {
        coef = std::max({coef, std::abs(projected.a[n] - sol.a[n]), std::abs(projected.b[n] - sol.b[n])});
    }
    return {l2 < kOracleL2 && coef < kOracleCoefAbs,
            fmt::format("rel L2 {:.2e} (< {:.0e}), max coef diff {:.2e} (< {:.0e})", l2, kOracleL2, coef,
                        kOracleCoefAbs),
            kOracleSeconds};
}

Outcome restoration_rates() {
    const double expected[] = {11.2e6, 44.8e6, 156.8e6};
    double worst = 0.0;
    std::string values;
    for (std::size_t i = 0; i < kPoints.size(); ++i) {
        const double gp = to_hz(op_at(kPoints[i].second).gamma_p);
        worst = std::max(worst, relative(gp, expected[i]));
        values += fmt::format("{}{:.6f}", i ? "/" : "", gp / 1e6);
    }
    return {worst < kGammaRel, fmt::format("Gp/2pi = {} MHz, worst rel {:.1e} (< {:.0e})", values, worst, kGammaRel)};
}

Outcome carrier_shift() {
    const cli::RunConfig config;
    const double wm = to_rad_s(config.psd_f_m_hz);
    BackSolveOptions bs;
    bs.mu_max = config.mu_max;
    double worst_identity = 0.0;
    double worst_bins = 0.0;
    int solves = 0;
    for (const auto& [label, xi] : kPoints) {
        const auto op = op_at(xi);
        for (double beta : config.psd_beta1) {
            const double mu = mu_for_modulation_index(op, wm, config.n_harmonics, beta, bs);
            const auto sol = solve_coefficients_matrix(op, {mu, wm, config.n_harmonics});
            const double fs = carrier_shift_hz(sol);
            const double from_a0 = 2.0 * op.nu * op.gamma_p * sol.a0 / kTwoPi;
            worst_identity = std::max(worst_identity, relative(fs, from_a0));

            // Lines sit at omega_sto + 2 pi f_s + k wm; the comb offset is the measured shift.
            const auto trace = synthesize_time_trace(sol, 64, 1024, PhaseReference::free_running);
            const auto peak = fft_peak_frequency(trace);
            double offset = std::remainder(peak.omega - op.omega_sto, wm);
            worst_bins = std::max(worst_bins, std::abs(offset - kTwoPi * fs) / peak.bin_width);
            ++solves;
        }
    }
    return {worst_identity < kShiftRel && worst_bins <= 1.0,
            fmt::format("{} solves, identity worst rel {:.1e} (< {:.0e}), FFT carrier off by {:.3f} bins (<= 1)",
                        solves, worst_identity, kShiftRel, worst_bins)};
}

Outcome truncation() {
    const auto op = op_at(1.8);
    const std::vector<int> ns{5, 20};
    std::string detail;
    bool ok = true;
    for (double f_m : {40e6, 400e6}) {
        const auto errs = truncation_error(op, {0.05, to_rad_s(f_m), 0}, ns, 20);
        ok = ok && errs[0].total_error_pct < kTruncPct;
        detail += fmt::format("{}{:.0f} MHz: {:.2e} %", detail.empty() ? "" : ", ", f_m / 1e6, errs[0].total_error_pct);
    }
    return {ok, detail + fmt::format(" (< {:.0e} %)", kTruncPct), kTruncSeconds};
}

Outcome pure_fm() {
    const double wm = to_rad_s(100e6);
    const auto op = test::with_couplings(op_at(1.8), kPureFmNu, 0.0);
    double worst = 0.0;
    for (double beta : {0.5, 1.0, 2.0}) {
        const double mu = mu_for_modulation_index(op, wm, 10, beta);
        const auto spec = psd_analytic(solve_coefficients_matrix(op, {mu, wm, 10}));
        for (int k = -5; k <= 5; ++k) {
            const double jk = std::cyl_bessel_j(static_cast<double>(std::abs(k)), beta);
            worst = std::max(worst, relative(spec.power(k), jk * jk));
        }
    }
    return {worst < kPureFmRel,
            fmt::format("C2 = 0, nu = {:.0e}, |k| <= 5: worst rel {:.2e} (< {:.0e})", kPureFmNu, worst, kPureFmRel)};
}

Outcome pure_am() {
    double worst_delta = 0.0;
    double worst_other = 0.0;
    double worst_nam = 0.0;
    for (const auto& [label, xi] : kPoints) {
        const auto base = op_at(xi);
        const auto op = test::with_couplings(base, 0.0, base.c2);
        for (double f_m : {40e6, 100e6, 400e6}) {
            const auto sol = solve_coefficients_matrix(op, {0.3, to_rad_s(f_m), 10});
            const auto spec = psd_analytic(sol);
            worst_delta = std::max(worst_delta, std::abs(sideband_asymmetry(spec)));
            for (const auto& line : spec.lines) {
                const int n = std::abs(line.k);
                if (n == 0) {
                    worst_nam = std::max(worst_nam, relative(line.power, (1.0 + sol.a0) * (1.0 + sol.a0)));
                } else if (n <= sol.n_harmonics() && std::abs(sol.x(n)) > 0.0) {
                    worst_nam = std::max(worst_nam, relative(line.power, std::norm(sol.x(n)) / 4.0));
                } else {
                    worst_other = std::max(worst_other, line.power);
                }
            }
        }
    }
    return {worst_delta == 0.0 && worst_other < kPureAmFloor && worst_nam < 1e-12,
            fmt::format("nu = 0: |Delta| = {:.1e}, other lines <= {:.1e} (< {:.0e}), envelope lines rel {:.1e}",
                        worst_delta, worst_other, kPureAmFloor, worst_nam)};
}

Outcome cross_path() {
    const SpectrumOptions so;
    BackSolveOptions bs;
    bs.mu_max = kCrossPathMuMax;
    double worst = 0.0;
    std::string where;
    double mu_peak = 0.0;
    for (const auto& [label, xi] : kPoints) {
        const auto op = op_at(xi);
        for (double beta : {0.5, 1.5, 3.0}) {
            for (double f_m : {40e6, 100e6, 400e6}) {
                const double wm = to_rad_s(f_m);
                const double mu = mu_for_modulation_index(op, wm, 10, beta, bs);
                mu_peak = std::max(mu_peak, mu);
                const auto sol = solve_coefficients_matrix(op, {mu, wm, 10});
                const auto a = psd_analytic(sol, so.j_max, so.k_max);
                const auto f = psd_fft(synthesize_time_trace(sol, so.samples_per_period, so.n_periods), so.k_max);
                for (int k : {-5, -4, -3, -2, -1, 1, 2, 3, 4, 5}) {
                    const double r = relative(f.power(k), a.power(k));
                    if (r > worst) {
                        worst = r;
                        where = fmt::format("{} beta1={} {:.0f} MHz k={}", label, beta, f_m / 1e6, k);
                    }
                }
            }
        }
    }
    return {worst < kCrossPathRel,
            fmt::format("27 cases, worst rel {:.2e} at {} (< {:.0e}); largest mu {:.2f}", worst, where,
                        kCrossPathRel, mu_peak),
            kCrossPathSeconds};
}

Outcome bandwidth() {
    bool ok = true;
    std::string detail;
    for (const auto& [label, xi] : kPoints) {
        const auto op = op_at(xi);
        const double mbw = modulation_bandwidth_hz(op, 1e-4, 0.01 * 2.0 * op.gamma_p);
        const double ref = to_hz(2.0 * op.gamma_p);
        const double r = relative(mbw, ref);
        ok = ok && r < kMbwRel;
        detail += fmt::format("{}{} {:.2f}/{:.1f} MHz ({:.2f} %)", detail.empty() ? "" : ", ", label, mbw / 1e6,
                              ref / 1e6, 100.0 * r);
    }
    return {ok, detail + fmt::format(" (< {:.0f} %)", 100.0 * kMbwRel)};
}

Outcome deviation() {
    const cli::RunConfig config;  // bandwidth.f_m_hz is the 10 MHz .. 1 GHz log grid
    double worst = 0.0;
    std::string where;
    for (const auto& [label, xi] : kPoints) {
        const auto op = op_at(xi);
        for (double f_m : config.bw_f_m_hz) {
            const auto sol = solve_coefficients_matrix(op, {0.05, to_rad_s(f_m), 10});
            const double idx = peak_frequency_deviation_hz(sol, DeviationMethod::index_based);
            const double inst = peak_frequency_deviation_hz(sol, DeviationMethod::instantaneous);
            const double r = relative(inst, idx);
            if (r > worst) {
                worst = r;
                where = fmt::format("{} {:.3g} MHz", label, f_m / 1e6);
            }
        }
    }
    return {worst < kDeviationRel,
            fmt::format("{} x 3 points, worst rel {:.2e} at {} (< {:.0e})", config.bw_f_m_hz.size(), worst, where,
                        kDeviationRel)};
}

Outcome fig3_monotonicity() {
    const cli::RunConfig config;
    const auto table = cli::cmd_asymmetry_map(config);
    // (label, f_m, beta1) -> delta
    std::map<std::string, std::map<double, std::map<double, double>>> grid;
    for (const auto& row : table.rows) {
        grid[std::get<std::string>(row[0])][std::get<double>(row[2])][std::get<double>(row[1])] = std::get<double>(row[3]);
    }
    int violations = 0;
    double min_delta = INFINITY;
    std::map<std::string, double> peak;
    for (const auto& [label, by_f] : grid) {
        for (const auto& [f, by_beta] : by_f) {
            double prev = -INFINITY;
            for (const auto& [beta, d] : by_beta) {
                min_delta = std::min(min_delta, d);
                if (d < -kMonotoneSlack) ++violations;
                if (d < prev - kMonotoneSlack) ++violations;
                prev = d;
                peak[label] = std::max(peak[label], d);
            }
        }
        const auto& first = by_f.begin()->second;
        for (const auto& [beta, unused] : first) {
            double prev = -INFINITY;
            for (const auto& [f, by_beta] : by_f) {
                const double d = by_beta.at(beta);
                if (d < prev - kMonotoneSlack) ++violations;
                prev = d;
            }
        }
    }
    const bool ok = violations == 0 && peak["OP1"] > peak["OP3"];
    return {ok, fmt::format("{} rows, {} monotonicity violations, min Delta {:.2e}, max Delta OP1 {:.4f} > OP3 {:.4f}",
                            table.rows.size(), violations, min_delta, peak["OP1"], peak["OP3"])};
}

Outcome determinism() {
    const cli::RunConfig config;
    int mismatches = 0;
    std::size_t bytes = 0;
    for (auto c : {cli::Command::operating_point, cli::Command::psd_map, cli::Command::asymmetry_map,
                   cli::Command::bandwidth, cli::Command::error_analysis}) {
        const auto first = cli::render_command(c, config, {1});
        const auto second = cli::render_command(c, config, {1});
        const auto pooled = cli::render_command(c, config, {3});
        if (first != second || first != pooled) ++mismatches;
        bytes += first.size();
    }
    return {mismatches == 0,
            fmt::format("5 commands x 3 runs (jobs 1, 1, 3), {} bytes each pass, {} mismatches", bytes, mismatches)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle equivalence", oracle_equivalence},
        {"restoration rates", restoration_rates},
        {"carrier shift identity", carrier_shift},
        {"truncation error", truncation},
        {"pure-FM limit", pure_fm},
        {"pure-AM limit", pure_am},
        {"cross-path spectrum", cross_path},
        {"modulation bandwidth", bandwidth},
        {"peak-deviation agreement", deviation},
        {"asymmetry map monotonicity", fig3_monotonicity},
        {"determinism", determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, fmt::format("threw: {}", e.what())};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string timing = fmt::format("{:.2f} s", secs);
        if (out.limit_s > 0.0) {
            timing += fmt::format(" (< {:.0f} s)", out.limit_s);
            if (secs >= out.limit_s) out.pass = false;
        }
        if (!out.pass) ++failures;
        fmt::print("{} [{:>2}] {}: {}; {}\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, out.detail, timing);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
