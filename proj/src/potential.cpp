#include "schro/potential.hpp"

#include <algorithm>

#include "schro/rng.hpp"

namespace schro {

std::pair<double, double> Potential::bounds_on_ball(std::span<const double> center,
                                                    double radius) const {
    if (static_cast<int>(center.size()) != dim_)
        throw std::invalid_argument("bounds_on_ball: center dimension mismatch");
    if (!(radius >= 0.0)) throw std::domain_error("bounds_on_ball: radius must be >= 0");
    double c = norm(center);
    double r_lo = std::max(0.0, c - radius);
    double r_hi = c + radius;

    if (kind_ == PotentialKind::power_decay) {
        // |V| is decreasing in r, so the extremes sit at the radial endpoints.
        double at_lo = eval_radius(r_lo);
        double at_hi = eval_radius(r_hi);
        return {std::min(at_lo, at_hi), std::max(at_lo, at_hi)};
    }

    // Piecewise linear: extremes at interval endpoints or interior profile nodes.
    double vmin = eval_radius(r_lo), vmax = vmin;
    auto take = [&](double v) { vmin = std::min(vmin, v); vmax = std::max(vmax, v); };
    take(eval_radius(r_hi));
    for (std::size_t i = 0; i < radii_.size(); ++i)
        if (radii_[i] > r_lo && radii_[i] < r_hi) take(values_[i]);
    return {vmin, vmax};
}

ClassCheck Potential::validate_class(int n_samples, double r_max, std::uint64_t seed) const {
    if (n_samples < 2) throw std::invalid_argument("validate_class: n_samples must be >= 2");
    if (!(r_max > 0.0)) throw std::domain_error("validate_class: r_max must be positive");
    if (!(class_lower_ > 0.0 && class_upper_ >= class_lower_))
        throw std::invalid_argument("validate_class: class bounds not set");

    std::vector<double> radii;
    radii.reserve(static_cast<std::size_t>(n_samples) + radii_.size() + 2);
    radii.push_back(0.0);
    radii.push_back(r_max);
    for (double r : radii_)
        if (r <= r_max) radii.push_back(r);
    rng::CounterRng gen(seed, 0);
    for (int i = 0; i < n_samples - 2; ++i) radii.push_back(gen.uniform(i) * r_max);

    ClassCheck out;
    for (double r : radii) {
        double mag = std::abs(eval_radius(r));
        double env = std::pow(1.0 + r, -alpha_);
        double lo = class_lower_ * env, hi = class_upper_ * env;
        double viol = 0.0;
        if (mag < lo) viol = (lo - mag) / lo;
        if (mag > hi) viol = std::max(viol, (mag - hi) / hi);
        if (viol > 0.0) {
            out.ok = false;
            out.worst_violation = std::max(out.worst_violation, viol);
        }
    }
    return out;
}

} // namespace schro
