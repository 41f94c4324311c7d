#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>

#include "schro/paths.hpp"
#include "schro/potential.hpp"

namespace schro::fkmc {

enum class Quadrature { left, midpoint, trapezoid };

Quadrature quadrature_from_string(const std::string&);
std::string to_string(Quadrature);

struct McConfig {
    std::int64_t n_paths = 10000;
    int n_steps = 64;
    std::uint64_t seed = 1;
    Quadrature quadrature = Quadrature::trapezoid;
    bool antithetic = false;
    bool step_halving_check = false;
    bool compensated_sum = false;
    int n_threads = 1;
    // Attractive potentials grow the weight like exp(c*t); refuse horizons
    // beyond this unless the caller raises it explicitly.
    double t_cap = 30.0;
};

struct KernelEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_paths = 0;
    int n_steps = 0;
    // |mean weight at n_steps - mean weight on the halved grid| over the probe
    // subset (same Brownian paths, every second node). NaN when the probe is off.
    double bias_probe = std::numeric_limits<double>::quiet_NaN();
    std::string method;
};

// Quadrature of s -> V(path(s)) along the stored path; returns exp(-Q).
double path_weight(const Potential& pot, const Path& path, Quadrature quad);

// Mean of exp(-int_0^t V(B_s) ds) over free Brownian paths from x.
KernelEstimate estimate_survival(const Potential& pot, double t,
                                 std::span<const double> x, const McConfig& cfg);

// p(t,x,y) = q(t,x,y) * E[exp(-int V) along the x->y bridge].
KernelEstimate estimate_kernel(const Potential& pot, double t,
                               std::span<const double> x, std::span<const double> y,
                               const McConfig& cfg);

struct GreenConfig {
    double t_min = 1e-4;
    double t_max = 100.0;
    int nodes_per_decade = 40;
    McConfig mc;
    // per-node step count: clamp(steps_per_unit_time * t, steps_min, steps_max)
    double steps_per_unit_time = 16.0;
    int steps_min = 16;
    int steps_max = 2048;
};

struct GreenEstimate {
    double value = 0.0;      // log-spaced trapezoid over [t_min, t_max]
    double std_error = 0.0;
    double small_t_tail = 0.0; // bound: free-kernel mass below t_min (closed form)
    double large_t_tail = 0.0; // bound: unit-constant global weight branch above t_max
    int n_nodes = 0;
    double t_min = 0.0, t_max = 0.0;
    std::string method = "fkmc_green";
};

// G(x,y) = int_0^inf p(t,x,y) dt for a repulsive potential (V >= 0, alpha in
// (0,2), d >= 2, x != y). Central part by quadrature of estimate_kernel, the
// two tails reported separately as bounds.
GreenEstimate estimate_green(const Potential& pot, std::span<const double> x,
                             std::span<const double> y, const GreenConfig& cfg);

// Free-kernel time integral int_0^T q(t,x,y) dt (closed form; d in {2,3}).
double free_kernel_time_integral(double r, int dim, double t_upper);
// Full free Green function int_0^inf q dt, finite for d >= 3.
double free_green(double r, int dim);

} // namespace schro::fkmc
