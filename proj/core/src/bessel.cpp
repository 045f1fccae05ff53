#include "stomod/bessel.hpp"

#include <algorithm>
#include <cmath>

#include "stomod/errors.hpp"

namespace stomod {

namespace {

constexpr double kRescaleAbove = 1e250;
constexpr double kRescaleFactor = 1e-250;

}  // namespace

// Backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1} from an order well above
// both n_max and x, normalized with J_0 + 2 sum_k J_{2k} = 1.
std::vector<double> bessel_j_sequence(int n_max, double x) {
    if (n_max < 0) throw ConfigError("Bessel order must be >= 0");
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (!std::isfinite(x)) throw NumericalError("Bessel argument must be finite");

    const bool negative = x < 0.0;
    const double ax = std::abs(x);
    const double reach = std::max(static_cast<double>(n_max), ax);
    int start = static_cast<int>(reach + 20.0 + std::sqrt(160.0 * std::max(reach, 1.0)));
    start += start % 2;

    const double two_over_x = 2.0 / ax;
    double j_above = 0.0;
    double j_here = 1e-30;
    double norm = 0.0;
    for (int k = start; k > 0; --k) {
        const double j_below = k * two_over_x * j_here - j_above;
        j_above = j_here;
        j_here = j_below;  // now J_{k-1}
        if (std::abs(j_here) > kRescaleAbove) {
            j_here *= kRescaleFactor;
            j_above *= kRescaleFactor;
            norm *= kRescaleFactor;
            for (double& v : out) v *= kRescaleFactor;
        }
        const int order = k - 1;
        if (order <= n_max) out[static_cast<std::size_t>(order)] = j_here;
        if (order > 0 && order % 2 == 0) norm += 2.0 * j_here;
    }
    norm += j_here;  // J_0

    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] /= norm;
        if (negative && n % 2 == 1) out[n] = -out[n];
    }
    return out;
}

double bessel_j(int n, double x) {
    const int order = std::abs(n);
    const double value = bessel_j_sequence(order, x)[static_cast<std::size_t>(order)];
    return (n < 0 && order % 2 == 1) ? -value : value;
}

}  // namespace stomod
