#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace schro::special {

// Exponential integral E1(x) = Gamma(0, x), x > 0. Series for x <= 1,
// continued fraction (modified Lentz) for x > 1. Abs error ~1e-14.
inline double expint_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("expint_e1: x must be positive");
    constexpr double euler = 0.5772156649015328606;
    if (x <= 1.0) {
        double sum = 0.0, term = 1.0;
        for (int k = 1; k <= 40; ++k) {
            term *= -x / k;
            double add = term / k;
            sum += add;
            if (std::abs(add) < 1e-18 * (std::abs(sum) + 1e-300)) break;
        }
        return -euler - std::log(x) - sum;
    }
    double b = x + 1.0, c = 1e308, d = 1.0 / b, h = d;
    for (int k = 1; k <= 200; ++k) {
        double an = -static_cast<double>(k) * k;
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x);
}

// Upper incomplete gamma Gamma(1/2, x) = sqrt(pi) * erfc(sqrt(x)).
inline double upper_gamma_half(double x) {
    if (!(x >= 0.0)) throw std::domain_error("upper_gamma_half: x must be >= 0");
    return std::sqrt(std::numbers::pi) * std::erfc(std::sqrt(x));
}

// Lower incomplete gamma gamma(1/2, x) = sqrt(pi) * erf(sqrt(x)).
inline double lower_gamma_half(double x) {
    if (!(x >= 0.0)) throw std::domain_error("lower_gamma_half: x must be >= 0");
    return std::sqrt(std::numbers::pi) * std::erf(std::sqrt(x));
}

// Exponentially scaled modified Bessel I0e(x) = exp(-|x|) * I0(x).
// Abramowitz-Stegun 9.8.1/9.8.2 polynomial fits, rel error < 2e-7.
inline double bessel_i0e(double x) {
    double ax = std::abs(x);
    if (ax < 3.75) {
        double y = (x / 3.75) * (x / 3.75);
        double i0 = 1.0 + y * (3.5156229 + y * (3.0899424 + y * (1.2067492 +
                    y * (0.2659732 + y * (0.0360768 + y * 0.0045813)))));
        return i0 * std::exp(-ax);
    }
    double y = 3.75 / ax;
    double p = 0.39894228 + y * (0.01328592 + y * (0.00225319 + y * (-0.00157565 +
               y * (0.00916281 + y * (-0.02057706 + y * (0.02635537 +
               y * (-0.01647633 + y * 0.00392377)))))));
    return p / std::sqrt(ax);
}

} // namespace schro::special
