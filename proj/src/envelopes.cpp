#include "schro/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "schro/free_kernel.hpp"

namespace schro::envelopes {

std::string to_string(RegimeLabel r) {
    switch (r) {
        case RegimeLabel::diagonal_local: return "diagonal_local";
        case RegimeLabel::offdiag_gaussian: return "offdiag_gaussian";
        case RegimeLabel::large_time_global: return "large_time_global";
        case RegimeLabel::growth_local: return "growth_local";
        case RegimeLabel::growth_spatial: return "growth_spatial";
    }
    return "?";
}

static void require_subcritical(double alpha, const char* who) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::domain_error(std::string(who) + ": alpha must lie in (0,2)");
}

static void require_positive_t(double t, const char* who) {
    if (!(t > 0.0)) throw std::domain_error(std::string(who) + ": t must be positive");
}

double weight_pos(double t, double max_norm, double alpha, double arg) {
    require_subcritical(alpha, "weight_pos");
    require_positive_t(t, "weight_pos");
    if (!(max_norm >= 0.0)) throw std::domain_error("weight_pos: norm must be >= 0");
    double local = t * std::pow(1.0 + max_norm, -alpha);
    double global = std::pow(t, (2.0 - alpha) / (2.0 + alpha));
    return std::exp(-arg * std::min(local, global));
}

double weight_pos(double t, std::span<const double> x, std::span<const double> y,
                  double alpha, double arg) {
    return weight_pos(t, std::max(norm(x), norm(y)), alpha, arg);
}

double survival_bound_pos(double t, double x_norm, double alpha, double c1, double c2) {
    require_subcritical(alpha, "survival_bound_pos");
    require_positive_t(t, "survival_bound_pos");
    double local = t * std::pow(1.0 + x_norm, -alpha);
    double global = std::pow(t, (2.0 - alpha) / (2.0 + alpha));
    return c1 * (std::exp(-c2 * local) + std::exp(-c2 * global));
}

double weight_zhang(double t, double max_norm, double alpha, Side side, double c) {
    require_subcritical(alpha, "weight_zhang");
    require_positive_t(t, "weight_zhang");
    double u = t * std::pow(1.0 + max_norm, -alpha);
    if (side == Side::lower) return std::exp(-c * u);
    return std::exp(-c * std::pow(u, (2.0 - alpha) / 4.0));
}

double green_envelope(double r, double max_norm, double alpha, int dim, double arg) {
    require_subcritical(alpha, "green_envelope");
    if (dim < 2) throw std::domain_error("green_envelope: dim must be >= 2");
    if (!(r > 0.0)) throw std::domain_error("green_envelope: |x-y| must be positive");
    double scale = std::pow(1.0 + max_norm, 0.5 * alpha);
    double core = std::pow(r, -(dim - 2)) * std::exp(-arg * r / scale);
    if (dim == 2) {
        double lg = std::log(scale / r);
        core *= 1.0 + std::max(0.0, lg);
    }
    return core;
}

double weight_neg(double t, double min_norm, double alpha,
                  double growth_c, double spatial_c) {
    if (!(alpha > 0.0)) throw std::domain_error("weight_neg: alpha must be positive");
    require_positive_t(t, "weight_neg");
    double mn1 = 1.0 + min_norm;
    double local = growth_c * t * std::pow(mn1, -alpha);
    double spatial = growth_c * t - spatial_c * mn1 * mn1 / t;
    return std::exp(std::max(local, spatial));
}

double weight_neg(double t, std::span<const double> x, std::span<const double> y,
                  double alpha, double growth_c, double spatial_c) {
    return weight_neg(t, std::min(norm(x), norm(y)), alpha, growth_c, spatial_c);
}

double survival_bound_neg(double t, double x_norm, double alpha, double c1, double c2) {
    if (!(alpha > 0.0)) throw std::domain_error("survival_bound_neg: alpha must be positive");
    require_positive_t(t, "survival_bound_neg");
    double local = t * std::pow(1.0 + x_norm, -alpha);
    double spatial = t - (1.0 + x_norm * x_norm) / t;
    return c1 * std::exp(c2 * std::max(local, spatial));
}

RegimeLabel regime(double t, double x_norm, double y_norm, double r,
                   double alpha, Sign sign) {
    require_positive_t(t, "regime");
    if (sign == Sign::positive) {
        require_subcritical(alpha, "regime");
        double m = std::max(x_norm, y_norm);
        if (t > transition_time(m, alpha)) return RegimeLabel::large_time_global;
        if (t <= r * std::pow(1.0 + m, 0.5 * alpha)) return RegimeLabel::offdiag_gaussian;
        return RegimeLabel::diagonal_local;
    }
    double mn1 = 1.0 + std::min(x_norm, y_norm);
    double local = t * std::pow(mn1, -alpha);
    double spatial = t - mn1 * mn1 / t;
    return local >= spatial ? RegimeLabel::growth_local : RegimeLabel::growth_spatial;
}

RegimeLabel regime(double t, std::span<const double> x, std::span<const double> y,
                   double alpha, Sign sign) {
    return regime(t, norm(x), norm(y), dist(x, y), alpha, sign);
}

} // namespace schro::envelopes
