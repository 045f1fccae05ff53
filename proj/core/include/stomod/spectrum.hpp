#pragma once

#include <complex>
#include <vector>

#include "stomod/fourier_solver.hpp"

namespace stomod {

struct SpectralLine {
    int k = 0;  ///< offset from the carrier in units of omega_m
    std::complex<double> amplitude;
    double power = 0.0;  ///< |amplitude|^2, unmodulated carrier = 1
};

/// Carrier-centred line spectrum on the exact k*omega_m grid.
struct LineSpectrum {
    double carrier_omega = 0.0;  ///< rad/s
    double omega_m = 0.0;
    std::vector<SpectralLine> lines;  ///< sorted by k, contiguous in k

    [[nodiscard]] const SpectralLine* find(int k) const noexcept;
    [[nodiscard]] double power(int k) const noexcept;
    [[nodiscard]] double total_power() const noexcept;
    [[nodiscard]] int k_max() const noexcept;
};

/// Sampled power perturbation and baseband phase.
///
/// `phi` is the oscillator phase with the `reference_omega * t` ramp removed;
/// t is absolute time since the modulation started.
struct TimeTrace {
    double omega_m = 0.0;
    double reference_omega = 0.0;
    std::vector<double> t;
    std::vector<double> delta_p;
    std::vector<double> phi;

    [[nodiscard]] std::size_t size() const noexcept { return t.size(); }
};

enum class PhaseReference {
    shifted_carrier,  ///< remove (omega_sto + 2 nu Gp A0) t, phi is periodic
    free_running,     ///< remove omega_sto t only, phi keeps the carrier-shift ramp
};

struct SpectrumOptions {
    int j_max = 10;
    int k_max = 40;
    int samples_per_period = 256;
    int n_periods = 8;
};

[[nodiscard]] TimeTrace synthesize_time_trace(const FourierSolution& sol, int samples_per_period,
                                              int n_periods,
                                              PhaseReference reference = PhaseReference::shifted_carrier);

/// Bessel-convolution line spectrum: the (1 + dp) line set convolved with one
/// Jacobi-Anger factor per harmonic. Lines beyond |k| > k_max are dropped.
[[nodiscard]] LineSpectrum psd_analytic(const FourierSolution& sol, int j_max = 10, int k_max = 40);

/// FFT of (1 + dp) exp(i phi). The trace must span an integer number of
/// modulation periods (WindowingError otherwise); only bins on the k*omega_m
/// grid are reported.
[[nodiscard]] LineSpectrum psd_fft(const TimeTrace& trace, int k_max = 40);

struct PeakBin {
    double omega = 0.0;      ///< absolute angular frequency of the strongest bin
    double bin_width = 0.0;  ///< rad/s
};

/// Strongest FFT bin of (1 + dp) exp(i phi) on the full (sub-omega_m) grid.
[[nodiscard]] PeakBin fft_peak_frequency(const TimeTrace& trace);

/// power(+1) - power(-1); 0 when either line is absent.
[[nodiscard]] double sideband_asymmetry(const LineSpectrum& spectrum);

enum class DeviationMethod { index_based, instantaneous };

/// First-harmonic peak frequency deviation in Hz. `instantaneous` uses the
/// half peak-to-peak excursion of 2 nu Gp dp(t) over one synthesized period.
[[nodiscard]] double peak_frequency_deviation_hz(const FourierSolution& sol, DeviationMethod method,
                                                 int samples_per_period = 2048);

struct BandwidthOptions {
    int n_harmonics = 10;
    double resolution = 1e-3;       ///< relative, on the bracket width
    double max_seed_multiple = 1e4; ///< search gives up beyond omega_m0 * this
    double flat_band_tolerance = 0.01;
};

/// Modulation frequency at which beta_1 has dropped to 1/sqrt(2) of its value at
/// the seed, holding mu / omega_m fixed. Returns Hz. Throws InvalidSeedError if
/// the seed is not in the flat band.
[[nodiscard]] double modulation_bandwidth_hz(const OperatingPoint& op, double mu0, double omega_m0,
                                             const BandwidthOptions& options = {});

}  // namespace stomod
