// special.cpp — Bessel and Laguerre evaluations

#include "rabiqpt/special.hpp"

#include "rabiqpt/errors.hpp"

#include <cmath>
#include <string>

namespace rabiqpt {

double bessel_j(int order, double x) {
    if (order < 0) {
        throw DomainError("bessel_j: negative order " + std::to_string(order));
    }
    if (!std::isfinite(x)) {
        throw DomainError("bessel_j: non-finite argument");
    }
    const double value = std::cyl_bessel_j(static_cast<double>(order), std::abs(x));
    return (x < 0.0 && (order % 2 != 0)) ? -value : value;
}

double bessel_j_signed(int order, double x) {
    if (order >= 0) return bessel_j(order, x);
    const double value = bessel_j(-order, x);
    return ((-order) % 2 != 0) ? -value : value;
}

std::vector<double> laguerre_sequence(int k, double x, int count) {
    std::vector<double> out;
    if (count <= 0) return out;
    out.resize(static_cast<std::size_t>(count));
    out[0] = 1.0;
    if (count == 1) return out;
    out[1] = 1.0 + k - x;
    for (int j = 1; j + 1 < count; ++j) {
        out[j + 1] = ((2.0 * j + 1.0 + k - x) * out[j] - (j + k) * out[j - 1]) / (j + 1.0);
    }
    return out;
}

}  // namespace rabiqpt
