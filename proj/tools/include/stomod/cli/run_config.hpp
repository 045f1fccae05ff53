#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stomod/fourier_solver.hpp"
#include "stomod/oscillator_model.hpp"
#include "stomod/spectrum.hpp"

namespace stomod::cli {

struct LabeledPoint {
    std::string label;
    double xi = 0.0;
};

enum class PowerScale { unit, p0 };
enum class SpectrumPath { analytic, fft };

/// Everything a sweep command needs. Defaults reproduce the reference device
/// (1 T, 0.8 T, 28 GHz/T, alpha 0.01, nu 100) and its three operating points.
struct RunConfig {
    DeviceParams device;
    std::vector<std::string> op_labels{"OP1", "OP2", "OP3"};
    std::vector<double> op_xi{1.2, 1.8, 3.8};

    std::vector<double> dispersion_xi;  // operating-point command

    int n_harmonics = 10;
    SolveMethod method = SolveMethod::matrix;
    double mu_max = 0.5;
    double backsolve_tolerance = 1e-10;

    SpectrumOptions spectrum;
    PowerScale power_scale = PowerScale::unit;

    double psd_f_m_hz = 100e6;
    std::vector<double> psd_beta1;
    SpectrumPath psd_path = SpectrumPath::analytic;

    std::vector<double> asym_beta1;
    std::vector<double> asym_f_m_hz;
    double asym_slice_f_m_hz = 100e6;

    double bw_mu = 0.05;
    std::vector<double> bw_f_m_hz;
    double bw_seed_mu = 1e-4;
    double bw_seed_fraction = 0.01;  // seed f_m as a fraction of 2 Gp

    std::string err_op_label = "OP2";
    double err_mu = 0.05;
    std::vector<double> err_f_m_hz{40e6, 400e6};
    std::vector<int> err_n_values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    int err_n_ref = 20;
    std::vector<int> err_recursive_n{5, 10};
    std::vector<double> err_beta1;
    double err_mu_max = 2.5;

    std::string format = "csv";

    RunConfig();

    /// Zips labels with xi values; throws ConfigError on a length mismatch.
    [[nodiscard]] std::vector<LabeledPoint> operating_points() const;
};

/// Parses the sectioned key=value format on top of the defaults.
/// Throws ConfigError with a line number on malformed input or unknown keys.
[[nodiscard]] RunConfig parse_config(std::string_view text, RunConfig base = {});
[[nodiscard]] RunConfig load_config_file(const std::filesystem::path& path);

/// Applies one `section.key=value` override.
void apply_override(RunConfig& config, std::string_view assignment);

/// Restricts operating points to a comma-separated label list. If the
/// error-analysis point is filtered out, the first kept label replaces it.
void filter_operating_points(RunConfig& config, std::string_view labels);

/// Fully checks the configuration; throws ConfigError.
void validate(const RunConfig& config);

/// Stable, fully expanded rendering used for hashing and `--dump-config`.
[[nodiscard]] std::string canonical_text(const RunConfig& config);
[[nodiscard]] std::uint64_t config_hash(const RunConfig& config);

/// Grid syntax: "a, b, c", "linspace(start, stop, count)", "logspace(start, stop, count)".
[[nodiscard]] std::vector<double> parse_grid(std::string_view value);

[[nodiscard]] OperatingPoint operating_point_for(const RunConfig& config, const LabeledPoint& point);

}  // namespace stomod::cli
