// special.hpp — special functions used by the sideband expansion and phase-space code

#pragma once

#include <vector>

namespace rabiqpt {

// Bessel function of the first kind J_order(x), order ≥ 0, |x| ≤ 30.
// Throws DomainError for negative order; callers apply J_{-n} = (-1)^n J_n.
double bessel_j(int order, double x);

// J_m for any integer m via the reflection J_{-m}(x) = (-1)^m J_m(x).
double bessel_j_signed(int order, double x);

// Generalized Laguerre values L_0^{(k)}(x) … L_{count-1}^{(k)}(x) by upward recurrence.
std::vector<double> laguerre_sequence(int k, double x, int count);

}  // namespace rabiqpt
