#include "stomod/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "stomod/bessel.hpp"
#include "stomod/errors.hpp"
#include "stomod/units.hpp"

namespace stomod {

namespace {

using cplx = std::complex<double>;

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class ForwardFft {
public:
    explicit ForwardFft(int size) : size_(size) {
        in_ = fftw_alloc_complex(static_cast<std::size_t>(size));
        out_ = fftw_alloc_complex(static_cast<std::size_t>(size));
        if (in_ == nullptr || out_ == nullptr) {
            release();
            throw NumericalError("FFT buffer allocation failed");
        }
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(size, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
        if (plan_ == nullptr) {
            release();
            throw NumericalError("FFT planning failed");
        }
    }
    ForwardFft(const ForwardFft&) = delete;
    ForwardFft& operator=(const ForwardFft&) = delete;
    ~ForwardFft() { release(); }

    void set(int i, cplx v) noexcept {
        in_[i][0] = v.real();
        in_[i][1] = v.imag();
    }
    void run() noexcept { fftw_execute(plan_); }
    [[nodiscard]] cplx bin(int i) const noexcept { return {out_[i][0], out_[i][1]}; }
    [[nodiscard]] int size() const noexcept { return size_; }

private:
    void release() noexcept {
        if (plan_ != nullptr) {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(plan_);
            plan_ = nullptr;
        }
        if (in_ != nullptr) fftw_free(in_);
        if (out_ != nullptr) fftw_free(out_);
        in_ = out_ = nullptr;
    }

    int size_;
    fftw_complex* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

// Dense complex line set on k in [-reach, reach].
class LineBuffer {
public:
    explicit LineBuffer(int reach) : reach_(reach), v_(static_cast<std::size_t>(2 * reach + 1)) {}

    [[nodiscard]] int reach() const noexcept { return reach_; }
    cplx& operator[](int k) noexcept { return v_[static_cast<std::size_t>(k + reach_)]; }
    const cplx& operator[](int k) const noexcept { return v_[static_cast<std::size_t>(k + reach_)]; }

    struct Term {
        int k;
        cplx amp;
    };

    void convolve(const std::vector<Term>& factor) {
        std::vector<cplx> next(v_.size());
        for (int k = -reach_; k <= reach_; ++k) {
            const cplx here = (*this)[k];
            if (here == cplx{}) continue;
            for (const Term& t : factor) {
                const int target = k + t.k;
                if (target < -reach_ || target > reach_) continue;
                next[static_cast<std::size_t>(target + reach_)] += here * t.amp;
            }
        }
        v_ = std::move(next);
    }

private:
    int reach_;
    std::vector<cplx> v_;
};

LineSpectrum to_spectrum(const LineBuffer& buf, int k_max, double carrier_omega, double omega_m) {
    LineSpectrum spec;
    spec.carrier_omega = carrier_omega;
    spec.omega_m = omega_m;
    spec.lines.reserve(static_cast<std::size_t>(2 * k_max + 1));
    for (int k = -k_max; k <= k_max; ++k) {
        const cplx amp = buf[k];
        spec.lines.push_back({k, amp, std::norm(amp)});
    }
    return spec;
}

struct WholePeriods {
    double dt;
    int periods;
};

WholePeriods check_sampling(const TimeTrace& trace) {
    const std::size_t m = trace.size();
    if (m < 16 || trace.delta_p.size() != m || trace.phi.size() != m)
        throw ConfigError("time trace needs >= 16 consistent samples");
    if (!(trace.omega_m > 0.0)) throw ConfigError("time trace has no modulation frequency");
    const double dt = (trace.t.back() - trace.t.front()) / static_cast<double>(m - 1);
    if (!(dt > 0.0)) throw ConfigError("time trace samples must increase");
    for (std::size_t i = 1; i < m; ++i) {
        const double expected = trace.t.front() + static_cast<double>(i) * dt;
        if (std::abs(trace.t[i] - expected) > 1e-6 * dt) throw ConfigError("time trace is not uniformly sampled");
    }
    const double periods = static_cast<double>(m) * dt * trace.omega_m / kTwoPi;
    const double whole = std::round(periods);
    if (whole < 1.0 || std::abs(periods - whole) > 1e-6) {
        std::ostringstream msg;
        msg << "trace spans " << periods << " modulation periods; a whole number is required";
        throw WindowingError(msg.str());
    }
    return {dt, static_cast<int>(whole)};
}

void load_signal(ForwardFft& fft, const TimeTrace& trace) {
    for (int i = 0; i < fft.size(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        fft.set(i, (1.0 + trace.delta_p[idx]) * std::polar(1.0, trace.phi[idx]));
    }
}

}  // namespace

const SpectralLine* LineSpectrum::find(int k) const noexcept {
    auto it = std::lower_bound(lines.begin(), lines.end(), k,
                               [](const SpectralLine& l, int key) { return l.k < key; });
    return (it != lines.end() && it->k == k) ? &*it : nullptr;
}

double LineSpectrum::power(int k) const noexcept {
    const SpectralLine* line = find(k);
    return line != nullptr ? line->power : 0.0;
}

double LineSpectrum::total_power() const noexcept {
    double sum = 0.0;
    for (const auto& l : lines) sum += l.power;
    return sum;
}

int LineSpectrum::k_max() const noexcept { return lines.empty() ? 0 : lines.back().k; }

TimeTrace synthesize_time_trace(const FourierSolution& sol, int samples_per_period, int n_periods,
                                PhaseReference reference) {
    if (samples_per_period < 16) throw ConfigError("samples_per_period must be >= 16");
    if (n_periods < 1) throw ConfigError("n_periods must be >= 1");

    const double wm = sol.modulation.omega_m;
    const double coupling = 2.0 * sol.op.nu * sol.op.gamma_p;
    const int total = samples_per_period * n_periods;
    const double dt = kTwoPi / wm / samples_per_period;

    TimeTrace trace;
    trace.omega_m = wm;
    trace.reference_omega =
        reference == PhaseReference::shifted_carrier ? shifted_carrier_omega(sol) : sol.op.omega_sto;
    trace.t.resize(static_cast<std::size_t>(total));
    trace.delta_p.resize(trace.t.size());
    trace.phi.resize(trace.t.size());

    const int n_max = sol.n_harmonics();
    for (int i = 0; i < total; ++i) {
        const double t = i * dt;
        // Periodic part evaluated on the sample index keeps exact periodicity.
        const double theta = kTwoPi * static_cast<double>(i % samples_per_period) / samples_per_period;
        double dp = sol.a0;
        double phase = 0.0;
        for (int n = 1; n <= n_max; ++n) {
            const double s = std::sin(n * theta);
            const double c = std::cos(n * theta);
            dp += sol.a[n - 1] * s + sol.b[n - 1] * c;
            // |X_n| sin(n wm t - psi_n) = B_n sin - A_n cos
            phase += coupling / (n * wm) * (sol.b[n - 1] * s - sol.a[n - 1] * c);
        }
        if (reference == PhaseReference::free_running) phase += coupling * sol.a0 * t;
        const auto idx = static_cast<std::size_t>(i);
        trace.t[idx] = t;
        trace.delta_p[idx] = dp;
        trace.phi[idx] = phase;
    }
    return trace;
}

LineSpectrum psd_analytic(const FourierSolution& sol, int j_max, int k_max) {
    if (j_max < 1) throw ConfigError("j_max must be >= 1");
    if (k_max < 1) throw ConfigError("k_max must be >= 1");

    const int reach = 2 * k_max;  // guard band so folding back into [-k_max, k_max] is kept
    const int n_max = sol.n_harmonics();
    const double wm = sol.modulation.omega_m;

    LineBuffer buf(reach);
    buf[0] = 1.0 + sol.a0;
    for (int n = 1; n <= std::min(n_max, reach); ++n) {
        buf[n] += std::conj(sol.x(n)) / 2.0;
        buf[-n] += sol.x(n) / 2.0;
    }

    std::vector<LineBuffer::Term> factor;
    for (int n = 1; n <= n_max; ++n) {
        const cplx xn = sol.x(n);
        const double mag = std::abs(xn);
        if (mag == 0.0) continue;
        const double beta = 2.0 * sol.op.nu * sol.op.gamma_p * mag / (n * wm);
        if (beta == 0.0) continue;

        const std::vector<double> jn = bessel_j_sequence(j_max, beta);
        const cplx unit_up = std::conj(xn) / mag;
        const cplx unit_down = xn / mag;
        factor.clear();
        factor.push_back({0, jn[0]});
        cplx up = 1.0;
        cplx down = 1.0;
        for (int j = 1; j <= j_max && n * j <= 2 * reach; ++j) {
            up *= unit_up;
            down *= -unit_down;
            factor.push_back({n * j, jn[static_cast<std::size_t>(j)] * up});
            factor.push_back({-n * j, jn[static_cast<std::size_t>(j)] * down});
        }
        buf.convolve(factor);
    }
    return to_spectrum(buf, k_max, shifted_carrier_omega(sol), wm);
}

LineSpectrum psd_fft(const TimeTrace& trace, int k_max) {
    if (k_max < 1) throw ConfigError("k_max must be >= 1");
    const WholePeriods sampling = check_sampling(trace);
    const int m = static_cast<int>(trace.size());
    if (2 * k_max * sampling.periods >= m) {
        std::ostringstream msg;
        msg << "trace resolves |k| < " << m / (2 * sampling.periods) << " but k_max = " << k_max;
        throw ConfigError(msg.str());
    }

    ForwardFft fft(m);
    load_signal(fft, trace);
    fft.run();

    LineBuffer buf(k_max);
    const double t0 = trace.t.front();
    for (int k = -k_max; k <= k_max; ++k) {
        const int bin = ((k * sampling.periods) % m + m) % m;
        // Undo the e^{i k wm t0} factor of a trace that does not start at t = 0.
        buf[k] = fft.bin(bin) / static_cast<double>(m) * std::polar(1.0, -k * trace.omega_m * t0);
    }
    return to_spectrum(buf, k_max, trace.reference_omega, trace.omega_m);
}

PeakBin fft_peak_frequency(const TimeTrace& trace) {
    const std::size_t m = trace.size();
    if (m < 16 || trace.delta_p.size() != m || trace.phi.size() != m)
        throw ConfigError("time trace needs >= 16 consistent samples");
    const double dt = (trace.t.back() - trace.t.front()) / static_cast<double>(m - 1);

    ForwardFft fft(static_cast<int>(m));
    load_signal(fft, trace);
    fft.run();

    int best = 0;
    double best_power = -1.0;
    for (int i = 0; i < fft.size(); ++i) {
        const double p = std::norm(fft.bin(i));
        if (p > best_power) {
            best_power = p;
            best = i;
        }
    }
    const int signed_bin = best <= fft.size() / 2 ? best : best - fft.size();
    const double width = kTwoPi / (static_cast<double>(m) * dt);
    return {trace.reference_omega + signed_bin * width, width};
}

double sideband_asymmetry(const LineSpectrum& spectrum) {
    const SpectralLine* upper = spectrum.find(1);
    const SpectralLine* lower = spectrum.find(-1);
    if (upper == nullptr || lower == nullptr) return 0.0;
    return upper->power - lower->power;
}

double peak_frequency_deviation_hz(const FourierSolution& sol, DeviationMethod method, int samples_per_period) {
    const double scale = std::abs(sol.op.nu) * sol.op.gamma_p / std::numbers::pi;
    if (method == DeviationMethod::index_based) return scale * std::abs(sol.x(1));

    const TimeTrace trace = synthesize_time_trace(sol, samples_per_period, 1);
    const auto [lo, hi] = std::minmax_element(trace.delta_p.begin(), trace.delta_p.end());
    return scale * 0.5 * (*hi - *lo);
}

double modulation_bandwidth_hz(const OperatingPoint& op, double mu0, double omega_m0,
                               const BandwidthOptions& options) {
    if (!(mu0 > 0.0)) throw ConfigError("bandwidth seed mu0 must be positive");
    if (!(omega_m0 > 0.0)) throw ConfigError("bandwidth seed frequency must be positive");

    const double ratio = mu0 / omega_m0;
    auto beta1 = [&](double omega_m) {
        const FourierSolution sol =
            solve_coefficients_matrix(op, {ratio * omega_m, omega_m, options.n_harmonics});
        return modulation_index(sol, 1);
    };

    const double beta_seed = beta1(omega_m0);
    if (!(beta_seed > 0.0)) throw InvalidSeedError("seed modulation index is zero");
    const double beta_double = beta1(2.0 * omega_m0);
    if (beta_double < (1.0 - options.flat_band_tolerance) * beta_seed) {
        std::ostringstream msg;
        msg << "seed f_m = " << to_hz(omega_m0) << " Hz is not in the flat band (beta_1 drops "
            << 100.0 * (1.0 - beta_double / beta_seed) << "% on doubling)";
        throw InvalidSeedError(msg.str());
    }

    const double target = beta_seed / std::numbers::sqrt2;
    double lo = omega_m0;
    double hi = 2.0 * omega_m0;
    double beta_hi = beta_double;
    while (beta_hi > target) {
        lo = hi;
        hi *= 2.0;
        if (hi > options.max_seed_multiple * omega_m0)
            throw NumericalError("modulation index never fell to 1/sqrt(2) of its seed value");
        beta_hi = beta1(hi);
    }
    while (hi - lo > options.resolution * lo) {
        const double mid = 0.5 * (lo + hi);
        if (beta1(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return to_hz(0.5 * (lo + hi));
}

}  // namespace stomod
