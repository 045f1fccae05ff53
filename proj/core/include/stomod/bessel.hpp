#pragma once

#include <vector>

namespace stomod {

/// J_0(x) .. J_{n_max}(x) by normalized Miller backward recurrence.
/// Relative accuracy ~1e-13 for |x| <= 30.
[[nodiscard]] std::vector<double> bessel_j_sequence(int n_max, double x);

/// Integer-order Bessel function of the first kind; negative orders via
/// J_{-n} = (-1)^n J_n.
[[nodiscard]] double bessel_j(int n, double x);

}  // namespace stomod
