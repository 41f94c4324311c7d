#pragma once

#include <span>

#include "schro/feynman_kac.hpp"
#include "schro/pde.hpp"
#include "schro/potential.hpp"

namespace schro::dirichlet {

// Dirichlet heat kernel of (-1/2) d^2/dx^2 on the interval (-R, R):
// sum_n (1/R) sin(n pi (x+R)/(2R)) sin(n pi (y+R)/(2R)) exp(-n^2 pi^2 t / (8 R^2)).
// n_terms = 0 picks the count automatically so the dropped tail is < 1e-12.
double interval_kernel_exact(double t, double x, double y, double R, int n_terms = 0);

// Killed kernel q_B(t,x,y) on the ball B(center,R) by bridge sampling with
// per-step boundary-crossing corrections: in d = 1 the exact one-sided factors
// for both walls, in d >= 2 the tangent-plane factor 1 - exp(-2 d_k d_{k+1}/dt)
// with d_k the distance to the sphere; any node outside kills the path.
fkmc::KernelEstimate estimate_killed_kernel(double t, std::span<const double> x,
                                            std::span<const double> y,
                                            std::span<const double> center, double R,
                                            const fkmc::McConfig& cfg);

struct ExitCheck {
    double lhs = 0.0, lhs_error = 0.0; // bridge estimate of p(t,x,y)
    double rhs = 0.0, rhs_error = 0.0; // exit decomposition estimate
    double sigma_distance = 0.0;       // |lhs-rhs| / combined standard error
    double exit_fraction = 0.0;        // share of paths leaving U before t
};

// First-exit decomposition for x inside U = (center-R, center+R) and y outside
// its closure (d = 1): p(t,x,y) = E_x[ exp(-int_0^tau V) 1(tau <= t)
// p(t - tau, B_tau, y) ], with tau the first exit time of U. The kernel on the
// right is tabulated at the two boundary points by one PDE solve from y.
ExitCheck check_exit_identity(const Potential& pot, double t, double x, double y,
                              double center, double R, const fkmc::McConfig& mc,
                              const pde::GridConfig& grid);

} // namespace schro::dirichlet
