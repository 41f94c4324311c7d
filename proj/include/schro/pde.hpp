#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "schro/potential.hpp"

namespace schro::pde {

struct GridConfig {
    double x_range = 0.0;        // half-width (1d) or r_max (radial); 0 = auto
    int n_space = 1024;
    int n_time = 400;
    double delta_init_width = 0.0; // epsilon of the mollified delta; 0 = t/1000
};

struct Solution {
    int dim = 1;
    double t = 0.0;
    double epsilon = 0.0;
    double x0 = 0.0;             // source position (1d); radial solves start at 0
    int n_space = 0, n_time = 0;
    std::vector<double> grid;    // x (1d, symmetric about 0) or r (radial) nodes
    std::vector<double> values;  // kernel profile p(t, x0, .)
    double mass = 0.0;           // integral of the profile (survival proxy)
    bool positivity_violated = false;
    bool time_resolution_warning = false;

    double value_at(double pos) const; // linear interpolation on the grid
    // columns: r (or x), value; header line records t, d, epsilon, n_space, n_time
    void write_csv(std::ostream& os) const;
};

// Crank-Nicolson solve of u_t = (1/2) u_xx - V u on [-x_range, x_range] with
// homogeneous Dirichlet walls, initial data q(eps, x0, .), marched to total
// heat time t with geometrically graded steps.
Solution solve_1d(const Potential& pot, double t, double x0, const GridConfig& cfg);

// Radial version for dim in {2,3}: u_t = (1/2)(u_rr + (d-1)/r u_r) - V u on
// [0, r_max], reflecting at 0, Dirichlet at r_max; source at the origin.
Solution solve_radial(const Potential& pot, double t, int dim, const GridConfig& cfg);

// Continue an existing profile for extra_t more time (semigroup restart).
Solution advance(const Potential& pot, const Solution& state, double extra_t, int n_time);

// Apply the spatial generator (1/2)Delta - V to a profile on the stored grid
// (interior nodes; boundary entries are set to 0).
std::vector<double> apply_operator(const Potential& pot, const Solution& state);

// Solve plus one Richardson refinement (doubled n_space and n_time); returns
// the extrapolated kernel value at y (1d) or radius r (radial) and an error
// estimate |fine - coarse|/3.
struct RefinedValue { double value = 0.0, error = 0.0; };
RefinedValue kernel_value_1d(const Potential& pot, double t, double x0, double y,
                             const GridConfig& cfg);
RefinedValue kernel_value_radial(const Potential& pot, double t, int dim, double r,
                                 const GridConfig& cfg);

// Time slices of a 1d solve: records u(h, probe_j) at every time node h
// (heat time, including the initial eps). Used by the exit-identity check.
struct Trace {
    std::vector<double> times;                 // heat times
    std::vector<std::vector<double>> values;   // values[j][k] = u(times[k], probe_j)
    double value_at(std::size_t probe, double h) const; // linear in h, 0 below eps
};
Trace solve_1d_trace(const Potential& pot, double t, double x0, const GridConfig& cfg,
                     std::span<const double> probes);

} // namespace schro::pde
