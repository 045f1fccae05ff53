#include "stomod/cli/commands.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "stomod/cli/work_pool.hpp"
#include "stomod/errors.hpp"
#include "stomod/units.hpp"

#ifndef STOMOD_VERSION
#define STOMOD_VERSION "unknown"
#endif

namespace stomod::cli {

namespace {

struct NamedPoint {
    std::string label;
    OperatingPoint op;
};

std::vector<NamedPoint> resolve_points(const RunConfig& config) {
    std::vector<NamedPoint> out;
    for (const auto& p : config.operating_points()) out.push_back({p.label, operating_point_for(config, p)});
    return out;
}

BackSolveOptions back_solve(const RunConfig& config, double mu_max) {
    BackSolveOptions o;
    o.mu_max = mu_max;
    o.tolerance = config.backsolve_tolerance;
    o.method = config.method;
    return o;
}

double power_scale(const RunConfig& config, const OperatingPoint& op) {
    return config.power_scale == PowerScale::p0 ? op.p0 : 1.0;
}

LineSpectrum spectrum_for(const RunConfig& config, const FourierSolution& sol, SpectrumPath path) {
    if (path == SpectrumPath::analytic) return psd_analytic(sol, config.spectrum.j_max, config.spectrum.k_max);
    const TimeTrace trace = synthesize_time_trace(sol, config.spectrum.samples_per_period, config.spectrum.n_periods);
    return psd_fft(trace, config.spectrum.k_max);
}

double relative_pct(double value, double reference) {
    if (reference == 0.0) return value == 0.0 ? 0.0 : 100.0;
    return 100.0 * std::abs(value - reference) / std::abs(reference);
}

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
    for (Command c : {Command::operating_point, Command::psd_map, Command::asymmetry_map, Command::bandwidth,
                      Command::error_analysis}) {
        if (command_name(c) == name) return c;
    }
    return std::nullopt;
}

std::string_view command_name(Command command) {
    switch (command) {
        case Command::operating_point: return "operating-point";
        case Command::psd_map: return "psd-map";
        case Command::asymmetry_map: return "asymmetry-map";
        case Command::bandwidth: return "bandwidth";
        case Command::error_analysis: return "error-analysis";
    }
    return "?";
}

Table cmd_operating_point(const RunConfig& config) {
    Table table;
    table.columns = {"xi", "f_o_hz", "f_sto_hz", "gamma_p_hz", "p0", "c1", "c2"};
    DeviceParams params = config.device;
    for (double xi : config.dispersion_xi) {
        params.xi = xi;
        const OperatingPoint op = evaluate_operating_point(params);
        table.rows.push_back({xi, to_hz(op.omega_o), to_hz(op.omega_sto), to_hz(op.gamma_p), op.p0, to_hz(op.c1),
                              to_hz(op.c2)});
    }
    return table;
}

Table cmd_psd_map(const RunConfig& config, const RunOptions& options) {
    const auto points = resolve_points(config);
    const double omega_m = to_rad_s(config.psd_f_m_hz);
    const std::size_t n_beta = config.psd_beta1.size();

    std::vector<std::vector<std::vector<Cell>>> blocks(points.size() * n_beta);
    parallel_for(blocks.size(), options.jobs, [&](std::size_t task) {
        const NamedPoint& point = points[task / n_beta];
        const double beta1 = config.psd_beta1[task % n_beta];
        const double mu = mu_for_modulation_index(point.op, omega_m, config.n_harmonics, beta1,
                                                  back_solve(config, config.mu_max));
        const FourierSolution sol = solve_coefficients(point.op, {mu, omega_m, config.n_harmonics}, config.method);
        const LineSpectrum spec = spectrum_for(config, sol, config.psd_path);
        const double scale = power_scale(config, point.op);
        const double f_s = carrier_shift_hz(sol);
        for (const auto& line : spec.lines) {
            blocks[task].push_back({point.label, beta1, mu, static_cast<long long>(line.k), scale * line.power, f_s});
        }
    });

    Table table;
    table.columns = {"op_label", "beta1", "mu", "k", "power", "f_s_hz"};
    for (auto& block : blocks) {
        for (auto& row : block) table.rows.push_back(std::move(row));
    }
    return table;
}

Table cmd_asymmetry_map(const RunConfig& config, const RunOptions& options) {
    const auto points = resolve_points(config);
    std::vector<double> f_grid = config.asym_f_m_hz;
    if (std::find(f_grid.begin(), f_grid.end(), config.asym_slice_f_m_hz) == f_grid.end())
        f_grid.push_back(config.asym_slice_f_m_hz);
    std::sort(f_grid.begin(), f_grid.end());

    const std::size_t n_beta = config.asym_beta1.size();
    const std::size_t per_point = f_grid.size() * n_beta;
    std::vector<std::vector<Cell>> rows(points.size() * per_point);

    parallel_for(rows.size(), options.jobs, [&](std::size_t task) {
        const NamedPoint& point = points[task / per_point];
        const double f_m = f_grid[(task % per_point) / n_beta];
        const double beta1 = config.asym_beta1[task % n_beta];
        const double omega_m = to_rad_s(f_m);
        const double mu = mu_for_modulation_index(point.op, omega_m, config.n_harmonics, beta1,
                                                  back_solve(config, config.mu_max));
        const FourierSolution sol = solve_coefficients(point.op, {mu, omega_m, config.n_harmonics}, config.method);
        const LineSpectrum spec = psd_analytic(sol, config.spectrum.j_max, config.spectrum.k_max);
        const double scale = power_scale(config, point.op);
        rows[task] = {point.label, beta1, f_m, scale * sideband_asymmetry(spec), scale * spec.power(1),
                      scale * spec.power(-1), scale * spec.power(0)};
    });

    Table table;
    table.columns = {"op_label", "beta1", "f_m_hz", "delta", "p_upper", "p_lower", "p_carrier"};
    table.rows = std::move(rows);
    return table;
}

Table cmd_bandwidth(const RunConfig& config, const RunOptions& options) {
    const auto points = resolve_points(config);

    std::vector<double> mbw_measured(points.size());
    parallel_for(points.size(), options.jobs, [&](std::size_t i) {
        const OperatingPoint& op = points[i].op;
        BandwidthOptions bw;
        bw.n_harmonics = config.n_harmonics;
        mbw_measured[i] = modulation_bandwidth_hz(op, config.bw_seed_mu, config.bw_seed_fraction * 2.0 * op.gamma_p, bw);
    });

    const std::size_t n_f = config.bw_f_m_hz.size();
    std::vector<std::vector<Cell>> rows(points.size() * n_f);
    parallel_for(rows.size(), options.jobs, [&](std::size_t task) {
        const std::size_t i = task / n_f;
        const OperatingPoint& op = points[i].op;
        const double f_m = config.bw_f_m_hz[task % n_f];
        const FourierSolution sol =
            solve_coefficients(op, {config.bw_mu, to_rad_s(f_m), config.n_harmonics}, config.method);
        rows[task] = {points[i].label,
                      f_m,
                      peak_frequency_deviation_hz(sol, DeviationMethod::index_based),
                      peak_frequency_deviation_hz(sol, DeviationMethod::instantaneous),
                      to_hz(2.0 * op.gamma_p),
                      mbw_measured[i]};
    });

    Table table;
    table.columns = {"op_label", "f_m_hz", "delta_f_index_hz", "delta_f_inst_hz", "mbw_hz", "mbw_measured_hz"};
    table.rows = std::move(rows);
    return table;
}

Table cmd_error_analysis(const RunConfig& config, const RunOptions& options) {
    const auto all = resolve_points(config);
    const auto it = std::find_if(all.begin(), all.end(), [&](const NamedPoint& p) { return p.label == config.err_op_label; });
    if (it == all.end()) throw ConfigError(fmt::format("no operating point '{}'", config.err_op_label));
    const NamedPoint point = *it;
    const int n_ref = config.err_n_ref;
    const auto j_max = config.spectrum.j_max;
    const auto k_max = config.spectrum.k_max;

    Table table;
    table.columns = {"analysis", "op_label", "f_m_hz", "n", "beta1", "mu", "error_pct", "sideband_error_pct"};

    // Matrix truncation error against the N_ref solution.
    std::vector<int> n_values = config.err_n_values;
    n_values.push_back(n_ref);
    n_values = sorted_unique(n_values);
    for (double f_m : config.err_f_m_hz) {
        const double omega_m = to_rad_s(f_m);
        const FourierSolution ref = solve_coefficients_matrix(point.op, {config.err_mu, omega_m, n_ref});
        const double beta1 = modulation_index(ref, 1);
        const double ref_upper = psd_analytic(ref, j_max, k_max).power(1);
        for (int n : n_values) {
            const FourierSolution sol = solve_coefficients_matrix(point.op, {config.err_mu, omega_m, n});
            table.rows.push_back({std::string("truncation"), point.label, f_m, static_cast<long long>(n), beta1,
                                  config.err_mu, coefficient_error_pct(sol, ref),
                                  relative_pct(psd_analytic(sol, j_max, k_max).power(1), ref_upper)});
        }
    }

    // Recursive approximation against the converged matrix solution, swept in beta_1.
    const std::vector<int> rec_n = sorted_unique(config.err_recursive_n);
    const std::size_t n_beta = config.err_beta1.size();
    const std::size_t per_f = rec_n.size() * n_beta;
    std::vector<std::vector<Cell>> rows(config.err_f_m_hz.size() * per_f);
    parallel_for(rows.size(), options.jobs, [&](std::size_t task) {
        const double f_m = config.err_f_m_hz[task / per_f];
        const int n = rec_n[(task % per_f) / n_beta];
        const double beta1 = config.err_beta1[task % n_beta];
        const double omega_m = to_rad_s(f_m);
        BackSolveOptions bs = back_solve(config, config.err_mu_max);
        bs.method = SolveMethod::matrix;
        const double mu = mu_for_modulation_index(point.op, omega_m, n_ref, beta1, bs);
        const FourierSolution ref = solve_coefficients_matrix(point.op, {mu, omega_m, n_ref});
        const FourierSolution rec = solve_coefficients_recursive(point.op, {mu, omega_m, n});
        rows[task] = {std::string("recursive"), point.label, f_m, static_cast<long long>(n), beta1, mu,
                      coefficient_error_pct(rec, ref),
                      relative_pct(psd_analytic(rec, j_max, k_max).power(1), psd_analytic(ref, j_max, k_max).power(1))};
    });
    for (auto& row : rows) table.rows.push_back(std::move(row));
    return table;
}

Table run_command(Command command, const RunConfig& config, const RunOptions& options) {
    switch (command) {
        case Command::operating_point: return cmd_operating_point(config);
        case Command::psd_map: return cmd_psd_map(config, options);
        case Command::asymmetry_map: return cmd_asymmetry_map(config, options);
        case Command::bandwidth: return cmd_bandwidth(config, options);
        case Command::error_analysis: return cmd_error_analysis(config, options);
    }
    throw ConfigError("unknown command");
}

std::vector<std::string> provenance(Command command, const RunConfig& config) {
    return {fmt::format("stomod {}", STOMOD_VERSION), fmt::format("command: {}", command_name(command)),
            fmt::format("config_hash: {:016x}", config_hash(config))};
}

std::string render_command(Command command, const RunConfig& config, const RunOptions& options) {
    validate(config);
    const Table table = run_command(command, config, options);
    return render_csv(table, provenance(command, config));
}

}  // namespace stomod::cli
