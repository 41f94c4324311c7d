#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "schro/free_kernel.hpp"

namespace schro {

enum class Sign { positive, negative };
enum class PotentialKind { power_decay, custom_radial };

struct ClassCheck {
    bool ok = true;
    double worst_violation = 0.0; // worst relative excursion outside the class envelopes
};

// Radial potential V(x) = sign * K * (1+|x|)^(-alpha), or a user-supplied
// piecewise-linear radial profile tagged with the same class parameters
// K1*(1+r)^(-alpha) <= |V| <= K2*(1+r)^(-alpha).
class Potential {
public:
    static Potential power_decay(Sign sign, double alpha, double amplitude, int dim,
                                 double class_lower = 0.0, double class_upper = 0.0) {
        if (!(alpha > 0.0)) throw std::invalid_argument("Potential: alpha must be positive");
        if (!(amplitude > 0.0)) throw std::invalid_argument("Potential: amplitude must be positive");
        if (dim < 1) throw std::invalid_argument("Potential: dim must be >= 1");
        Potential p;
        p.kind_ = PotentialKind::power_decay;
        p.sign_ = sign;
        p.alpha_ = alpha;
        p.amplitude_ = amplitude;
        p.dim_ = dim;
        p.class_lower_ = class_lower > 0.0 ? class_lower : amplitude;
        p.class_upper_ = class_upper > 0.0 ? class_upper : amplitude;
        if (!(p.class_lower_ <= p.amplitude_ && p.amplitude_ <= p.class_upper_))
            throw std::invalid_argument("Potential: need class_lower <= amplitude <= class_upper");
        p.detect_fast_alpha();
        return p;
    }

    // profile: radii (strictly increasing, starting at 0) and |V| is NOT assumed;
    // values carry their own sign composed with `sign` being metadata for the class.
    static Potential custom_radial(Sign sign, double alpha, int dim,
                                   std::vector<double> radii, std::vector<double> values,
                                   double class_lower = 0.0, double class_upper = 0.0) {
        if (radii.size() < 2 || radii.size() != values.size())
            throw std::invalid_argument("Potential: profile needs >= 2 matching (radius, value) nodes");
        if (radii.front() != 0.0) throw std::invalid_argument("Potential: profile must start at r = 0");
        for (std::size_t i = 1; i < radii.size(); ++i)
            if (!(radii[i] > radii[i - 1]))
                throw std::invalid_argument("Potential: profile radii must be strictly increasing");
        if (!(alpha > 0.0)) throw std::invalid_argument("Potential: alpha must be positive");
        if (dim < 1) throw std::invalid_argument("Potential: dim must be >= 1");
        Potential p;
        p.kind_ = PotentialKind::custom_radial;
        p.sign_ = sign;
        p.alpha_ = alpha;
        p.dim_ = dim;
        p.class_lower_ = class_lower;
        p.class_upper_ = class_upper;
        p.amplitude_ = class_upper;
        p.radii_ = std::move(radii);
        p.values_ = std::move(values);
        return p;
    }

    // V identically 0 (free motion), usable wherever a potential is expected.
    static Potential zero(int dim) {
        return custom_radial(Sign::positive, 1.0, dim, {0.0, 1e9}, {0.0, 0.0});
    }

    // V identically equal to `value` (sign carried by the value itself).
    static Potential constant(int dim, double value) {
        return custom_radial(value < 0.0 ? Sign::negative : Sign::positive, 1.0, dim,
                             {0.0, 1e9}, {value, value});
    }

    PotentialKind kind() const noexcept { return kind_; }
    Sign sign() const noexcept { return sign_; }
    double alpha() const noexcept { return alpha_; }
    double amplitude() const noexcept { return amplitude_; }
    double class_lower() const noexcept { return class_lower_; }
    double class_upper() const noexcept { return class_upper_; }
    int dim() const noexcept { return dim_; }

    // Signed value at radius r >= 0.
    double eval_radius(double r) const {
        if (kind_ == PotentialKind::power_decay) {
            double base = 1.0 + r;
            double mag;
            switch (fast_alpha_) {
                case 1: mag = amplitude_ / base; break;
                case 2: mag = amplitude_ / (base * base); break;
                case 3: mag = amplitude_ / (base * base * base); break;
                case 4: { double b2 = base * base; mag = amplitude_ / (b2 * b2); break; }
                default: mag = amplitude_ * std::pow(base, -alpha_); break;
            }
            return sign_ == Sign::positive ? mag : -mag;
        }
        // piecewise linear profile
        if (r < 0.0) throw std::domain_error("Potential: negative radius");
        if (r > radii_.back())
            throw std::out_of_range("Potential: radius beyond custom profile support");
        auto it = std::lower_bound(radii_.begin(), radii_.end(), r);
        std::size_t hi = static_cast<std::size_t>(it - radii_.begin());
        if (hi == 0) return values_[0];
        std::size_t lo = hi - 1;
        double w = (r - radii_[lo]) / (radii_[hi] - radii_[lo]);
        return values_[lo] + w * (values_[hi] - values_[lo]);
    }

    double operator()(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim_)
            throw std::invalid_argument("Potential: point dimension mismatch");
        return eval_radius(norm(x));
    }

    // (inf V, sup V) over the closed ball B(center, radius).
    std::pair<double, double> bounds_on_ball(std::span<const double> center, double radius) const;

    // Monte Carlo check that |V| stays inside [K1*(1+r)^(-alpha), K2*(1+r)^(-alpha)]
    // on [0, r_max]; r = 0, r = r_max and all profile nodes are always included.
    ClassCheck validate_class(int n_samples, double r_max, std::uint64_t seed) const;

private:
    Potential() = default;

    void detect_fast_alpha() noexcept {
        double r = std::round(alpha_);
        fast_alpha_ = (std::abs(alpha_ - r) < 1e-12 && r >= 1.0 && r <= 4.0)
                          ? static_cast<int>(r) : 0;
    }

    PotentialKind kind_ = PotentialKind::power_decay;
    Sign sign_ = Sign::positive;
    double alpha_ = 1.0;
    double amplitude_ = 1.0;
    double class_lower_ = 1.0;
    double class_upper_ = 1.0;
    int dim_ = 1;
    int fast_alpha_ = 0;
    std::vector<double> radii_, values_; // custom_radial only
};

} // namespace schro
