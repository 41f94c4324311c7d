#pragma once

#include <span>
#include <string>

#include "schro/potential.hpp"

namespace schro::envelopes {

// Explicit constant slots of a two-sided comparison
//   mult_lower * f(arg_lower * .) <= p <= mult_upper * f(arg_upper * .).
struct EnvelopeParams {
    double mult_lower = 1.0;
    double arg_lower = 1.0;
    double mult_upper = 1.0;
    double arg_upper = 1.0;
};

enum class RegimeLabel {
    diagonal_local,
    offdiag_gaussian,
    large_time_global,
    growth_local,
    growth_spatial,
};

std::string to_string(RegimeLabel);

// --- repulsive case (V >= 0, alpha in (0,2)) --------------------------------

// exp(-arg * min(t/(1+m)^alpha, t^((2-alpha)/(2+alpha)))), m = max(|x|,|y|).
// Multiplies the free kernel in the two-sided comparison.
double weight_pos(double t, double max_norm, double alpha, double arg = 1.0);
double weight_pos(double t, std::span<const double> x, std::span<const double> y,
                  double alpha, double arg = 1.0);

// Upper bound shape for the total mass T_t 1(x):
// c1*(exp(-c2*t/(1+|x|)^alpha) + exp(-c2*t^((2-alpha)/(2+alpha)))).
double survival_bound_pos(double t, double x_norm, double alpha, double c1, double c2);

// Comparison-theorem shapes for the global branch: lower weight exp(-c*u),
// upper weight exp(-c*u^((2-alpha)/4)), with u = t/(1+m)^alpha.
enum class Side { lower, upper };
double weight_zhang(double t, double max_norm, double alpha, Side side, double c);

// Green function shape |x-y|^-(d-2) * exp(-arg * |x-y|/(1+m)^(alpha/2)), with
// the extra factor 1 + log_+((1+m)^(alpha/2)/|x-y|) in d = 2.
double green_envelope(double r, double max_norm, double alpha, int dim, double arg = 1.0);

// --- attractive case (V <= 0) -----------------------------------------------

// exp(max(growth_c*t/(1+mn)^alpha, growth_c*t - spatial_c*(1+mn)^2/t)),
// mn = min(|x|,|y|). Multiplies the Gaussian profile in the growth comparison.
double weight_neg(double t, double min_norm, double alpha,
                  double growth_c, double spatial_c);
double weight_neg(double t, std::span<const double> x, std::span<const double> y,
                  double alpha, double growth_c, double spatial_c);

// Total-mass growth bound c1*exp(c2*max(t/(1+|x|)^alpha, t-(1+|x|^2)/t)).
double survival_bound_neg(double t, double x_norm, double alpha, double c1, double c2);

// --- regime classification ---------------------------------------------------

// Repulsive case: large_time_global beyond the transition time of m; otherwise
// offdiag_gaussian when t <= |x-y|*(1+m)^(alpha/2), else diagonal_local.
// Attractive case: whichever branch of weight_neg attains the max at unit
// constants (growth_local vs growth_spatial).
RegimeLabel regime(double t, std::span<const double> x, std::span<const double> y,
                   double alpha, Sign sign);
RegimeLabel regime(double t, double x_norm, double y_norm, double r,
                   double alpha, Sign sign);

} // namespace schro::envelopes
