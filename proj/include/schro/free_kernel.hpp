#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

namespace schro {

inline double norm2(std::span<const double> x) noexcept {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

inline double norm(std::span<const double> x) noexcept { return std::sqrt(norm2(x)); }

inline double dist2(std::span<const double> x, std::span<const double> y) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

inline double dist(std::span<const double> x, std::span<const double> y) noexcept {
    return std::sqrt(dist2(x, y));
}

// Heat kernel of -(1/2)*Laplacian: (2*pi*t)^(-d/2) * exp(-|x-y|^2/(2t)).
inline double gaussian_kernel(double t, double r2, int dim) {
    if (!(t > 0.0)) throw std::domain_error("gaussian_kernel: t must be positive");
    if (dim < 1) throw std::domain_error("gaussian_kernel: dim must be >= 1");
    return std::pow(2.0 * std::numbers::pi * t, -0.5 * dim) * std::exp(-r2 / (2.0 * t));
}

inline double gaussian_kernel(double t, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("gaussian_kernel: x and y must have equal positive dimension");
    return gaussian_kernel(t, dist2(x, y), static_cast<int>(x.size()));
}

// Time scale (1+s)^(1+alpha/2) separating the local and global decay regimes
// at spatial scale s.
inline double transition_time(double s, double alpha) {
    if (!(s >= 0.0)) throw std::domain_error("transition_time: s must be >= 0");
    if (!(alpha > 0.0)) throw std::domain_error("transition_time: alpha must be positive");
    return std::pow(1.0 + s, 1.0 + 0.5 * alpha);
}

} // namespace schro
