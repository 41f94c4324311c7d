#pragma once

#include <span>
#include <vector>

#include "schro/potential.hpp"

namespace schro::duhamel {

// Shared space-time grid for the perturbation series. Stored time nodes are
// s_j = t_max*(j/n_time)^2 (uniform in sqrt(s)), so every node's Duhamel
// integral can reuse the stored rows with a composite rule in u = sqrt(s) and
// no cross-term re-interpolation.
struct Grid {
    int dim = 3;        // 1 (full line) or 3 (radial about the source)
    double t_max = 1.0;
    int n_time = 48;
    double x_max = 8.0; // half-width (1d) or r_max (3d)
    int n_space = 200;
    double y = 0.0;     // source position (1d); the 3d version keeps y = 0

    double s_node(int j) const { return t_max * (static_cast<double>(j) / n_time) *
                                        (static_cast<double>(j) / n_time); }
    double x_node(int i) const {
        return dim == 1 ? -x_max + 2.0 * x_max * i / n_space : x_max * i / n_space;
    }
    void validate() const;
};

// One series term on the grid; v[(j-1)*(n_space+1) + i] is p_n(s_j, x_i, y).
struct Term {
    int n = 0;
    std::vector<double> v;
    double at(const Grid& g, int j, int i) const {
        return v[static_cast<std::size_t>(j - 1) * (g.n_space + 1) + i];
    }
};

Term base_term(const Grid& g);                           // p_0 = free kernel
// p_n(t,x,y) = int_0^t int q(t-s,x,z) (-V(z)) p_{n-1}(s,z,y) dz ds.
// Requires an attractive potential (-V >= 0); repulsive input is rejected
// because the alternating series has no termwise comparison argument.
Term next_term(const Potential& pot, const Grid& g, const Term& prev);

struct SumResult {
    Term total;                    // sum of the kept terms (p_0 included)
    std::vector<double> term_sup;  // sup over the grid of p_n / q
    std::vector<double> sup_ratio; // term_sup[n+1] / term_sup[n]
    int n_terms = 0;               // kept terms beyond p_0
    bool diverged = false;         // sup_ratio >= 1 three times in a row
};
SumResult sum(const Potential& pot, const Grid& g, int n_max = 12, double tol = 1e-10);

// int (1+|z|)^(-alpha) exp(-kappa |z - R e1|^2) dz over R^d, d in {1,2,3}.
double radial_gauss_integral(double alpha, int dim, double kappa, double R);

struct ScalarSample { double s = 1.0, r = 0.0; };
struct ConvSample { double t = 1.0, x3 = 0.0, y3 = 0.0; };

struct FitResult {
    double c_max = 0.0, c_min = 0.0, band = 0.0;
    std::vector<double> ratios;
};

// Ratio of int s^(-d/2) (1+|z|)^(-alpha) exp(-|x-z|^2/s) dz to its stated
// envelope: (1 + log(2+|x|) [d==alpha]) (1+|x|)^(-min(d,alpha)) for
// s < (1+|x|)^2, and s^(-min(d,alpha)/2) (1 + log(1+s) [d==alpha]) otherwise.
// Requires alpha > 2.
FitResult check_equ1(double alpha, int dim, std::span<const ScalarSample> samples);

// Ratio of int_0^t int (t-s)^(-3/2) e^(-b|x-z|^2/(t-s)) (1+|z|)^(-alpha)
// s^(-3/2) e^(-a|z-y|^2/s) dz ds to t^(-3/2) e^(-a|x-y|^2/t), for x, y on a
// common axis. Requires alpha > 2 and 0 < a < b.
FitResult check_convolution_bound(double alpha, double a, double b,
                                  std::span<const ConvSample> samples);

} // namespace schro::duhamel
