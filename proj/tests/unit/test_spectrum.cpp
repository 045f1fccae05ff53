#include <doctest.h>

#include <cmath>
#include <complex>

#include "stomod/bessel.hpp"
#include "stomod/errors.hpp"
#include "stomod/fourier_solver.hpp"
#include "stomod/spectrum.hpp"
#include "stomod/units.hpp"
#include "support/reference_oracles.hpp"

using namespace stomod;

namespace {

OperatingPoint op_at(double xi) { return derive_operating_point(test::reference_device(xi)); }

FourierSolution solve_at(double xi, double mu, double f_m, int n = 10) {
    return solve_coefficients_matrix(op_at(xi), {mu, to_rad_s(f_m), n});
}

}  // namespace

TEST_CASE("unmodulated oscillator is a single unit line") {
    const auto spec = psd_analytic(solve_at(1.8, 0.0, 100e6));
    CHECK(spec.power(0) == 1.0);
    CHECK(spec.total_power() == 1.0);
    CHECK(sideband_asymmetry(spec) == 0.0);
    CHECK(spec.k_max() == 40);
    CHECK(spec.lines.size() == 81);
}

TEST_CASE("analytic lines match a direct DFT of the synthesized signal") {
    for (double xi : {1.2, 3.8}) {
        const auto sol = solve_at(xi, 0.3, 60e6);
        // beta_1 is ~8 here, well past what the default j_max = 10 resolves
        const auto spec = psd_analytic(sol, 40, 60);
        const auto trace = synthesize_time_trace(sol, 256, 1);
        for (int k = -8; k <= 8; ++k) {
            CAPTURE(k);
            const auto ref = test::dft_line(trace, k);
            const auto* line = spec.find(k);
            REQUIRE(line != nullptr);
            CHECK(std::abs(line->amplitude - ref) < 1e-10);
        }
    }
}

TEST_CASE("default Bessel truncation is enough for moderate index") {
    const auto sol = solve_at(1.8, 0.05, 100e6);
    REQUIRE(modulation_index(sol, 1) < 3.0);
    const auto coarse = psd_analytic(sol);
    const auto fine = psd_analytic(sol, 40, 40);
    for (int k = -10; k <= 10; ++k) CHECK(std::abs(coarse.find(k)->amplitude - fine.find(k)->amplitude) < 1e-9);
}

TEST_CASE("FFT path matches a direct DFT") {
    const auto sol = solve_at(1.2, 0.2, 100e6);
    const auto trace = synthesize_time_trace(sol, 128, 2);
    const auto spec = psd_fft(trace, 10);
    for (int k = -10; k <= 10; ++k) {
        CAPTURE(k);
        CHECK(std::abs(spec.find(k)->amplitude - test::dft_line(trace, k)) < 1e-12);
    }
}

TEST_CASE("total line power equals the mean signal power") {
    const auto sol = solve_at(1.2, 0.4, 100e6);
    const auto trace = synthesize_time_trace(sol, 512, 1);
    double mean = 0.0;
    for (double dp : trace.delta_p) mean += (1.0 + dp) * (1.0 + dp);
    mean /= static_cast<double>(trace.size());
    CHECK(psd_analytic(sol, 20, 40).total_power() == doctest::Approx(mean).epsilon(1e-10));
}

TEST_CASE("pure phase modulation gives squared Bessel sidebands") {
    auto op = test::with_couplings(op_at(1.8), 1e8, 0.0);
    const double wm = to_rad_s(100e6);
    const double mu = mu_for_modulation_index(op, wm, 10, 1.3);
    const auto sol = solve_coefficients_matrix(op, {mu, wm, 10});
    const auto spec = psd_analytic(sol);
    for (int k = 0; k <= 5; ++k) {
        const double jk = std::cyl_bessel_j(static_cast<double>(k), 1.3);
        CHECK(spec.power(k) == doctest::Approx(jk * jk).epsilon(1e-6));
        CHECK(spec.power(-k) == doctest::Approx(jk * jk).epsilon(1e-6));
    }
}

TEST_CASE("pure amplitude modulation has only the envelope lines") {
    const auto op = test::with_couplings(op_at(1.2), 0.0, op_at(1.2).c2);
    const auto sol = solve_coefficients_matrix(op, {0.5, to_rad_s(40e6), 10});
    const auto spec = psd_analytic(sol);
    CHECK(sideband_asymmetry(spec) == 0.0);
    CHECK(spec.power(0) == doctest::Approx((1.0 + sol.a0) * (1.0 + sol.a0)));
    for (int n = 1; n <= 10; ++n) {
        CHECK(spec.power(n) == doctest::Approx(std::norm(sol.x(n)) / 4.0));
        CHECK(spec.power(-n) == spec.power(n));
    }
    for (int k = 11; k <= 40; ++k) CHECK(spec.power(k) == 0.0);
}

TEST_CASE("sideband asymmetry") {
    const auto sol = solve_at(1.2, 0.1, 100e6);
    const auto spec = psd_analytic(sol);
    CHECK(sideband_asymmetry(spec) == doctest::Approx(spec.power(1) - spec.power(-1)));
    CHECK(sideband_asymmetry(spec) > 0.0);
    LineSpectrum empty;
    CHECK(sideband_asymmetry(empty) == 0.0);
}

TEST_CASE("time trace periodicity and phase reference") {
    const auto sol = solve_at(1.2, 0.3, 50e6);
    const int spp = 64;
    const auto shifted = synthesize_time_trace(sol, spp, 3);
    const auto free = synthesize_time_trace(sol, spp, 3, PhaseReference::free_running);
    REQUIRE(shifted.size() == 3u * spp);
    for (int i = 0; i < spp; ++i) {
        CHECK(shifted.phi[i + spp] == shifted.phi[i]);
        CHECK(shifted.delta_p[i + 2 * spp] == shifted.delta_p[i]);
    }
    const double period = kTwoPi / sol.modulation.omega_m;
    const double ramp = 2.0 * sol.op.nu * sol.op.gamma_p * sol.a0 * period;
    CHECK(free.phi[spp] - free.phi[0] == doctest::Approx(ramp).epsilon(1e-12));
    CHECK(shifted.reference_omega == shifted_carrier_omega(sol));
    CHECK(free.reference_omega == sol.op.omega_sto);
}

TEST_CASE("FFT peak finds the shifted carrier") {
    const auto sol = solve_at(1.2, 0.05, 100e6);
    const auto trace = synthesize_time_trace(sol, 64, 1024, PhaseReference::free_running);
    const auto peak = fft_peak_frequency(trace);
    CHECK(std::abs(peak.omega - shifted_carrier_omega(sol)) <= peak.bin_width);
    CHECK(peak.bin_width == doctest::Approx(sol.modulation.omega_m / 1024));
}

TEST_CASE("psd_fft input checks") {
    const auto sol = solve_at(1.8, 0.05, 100e6);
    auto trace = synthesize_time_trace(sol, 64, 2);
    CHECK_THROWS_AS((void)psd_fft(trace, 40), ConfigError);
    trace.t.pop_back();
    trace.delta_p.pop_back();
    trace.phi.pop_back();
    CHECK_THROWS_AS((void)psd_fft(trace, 4), WindowingError);
    CHECK_THROWS_AS((void)psd_analytic(sol, 0, 4), ConfigError);
}

TEST_CASE("index-based and instantaneous deviation agree below the corner") {
    for (double xi : {1.2, 1.8, 3.8}) {
        const auto sol = solve_at(xi, 0.05, 10e6);
        const double idx = peak_frequency_deviation_hz(sol, DeviationMethod::index_based);
        const double inst = peak_frequency_deviation_hz(sol, DeviationMethod::instantaneous);
        CHECK(idx == doctest::Approx(sol.op.nu * sol.op.gamma_p * std::abs(sol.x(1)) / test::kPi));
        CHECK(inst == doctest::Approx(idx).epsilon(0.01));
    }
}

TEST_CASE("modulation bandwidth in the low-pass limit") {
    const auto op = test::with_couplings(op_at(1.8), 100.0, 0.0);
    const double mbw = modulation_bandwidth_hz(op, 1e-4, 0.02 * op.gamma_p);
    CHECK(mbw == doctest::Approx(to_hz(2.0 * op.gamma_p)).epsilon(2e-3));
}

TEST_CASE("modulation bandwidth rejects a seed outside the flat band") {
    const auto op = op_at(1.8);
    CHECK_THROWS_AS((void)modulation_bandwidth_hz(op, 1e-4, 2.0 * op.gamma_p), InvalidSeedError);
    CHECK_THROWS_AS((void)modulation_bandwidth_hz(op, 0.0, 0.02 * op.gamma_p), ConfigError);
}
