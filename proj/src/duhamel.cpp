#include "schro/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "schro/free_kernel.hpp"
#include "schro/special.hpp"

namespace schro::duhamel {

namespace {

constexpr double kPi = std::numbers::pi;

// 1d free kernel
inline double q1(double t, double dx) {
    return std::exp(-dx * dx / (2.0 * t)) / std::sqrt(2.0 * kPi * t);
}

// Integral kernel taking a radial profile g(rho) to int q(tau, x, z) g(|z|) dz
// in d = 3, |x| = r: K(tau,r,rho) = (rho/r) (2 pi tau)^(-1/2)
// [exp(-(r-rho)^2/2tau) - exp(-(r+rho)^2/2tau)]; smooth r -> 0 limit.
inline double radial_heat_kernel_3d(double tau, double r, double rho) {
    double base = std::exp(-(r - rho) * (r - rho) / (2.0 * tau)) / std::sqrt(2.0 * kPi * tau);
    if (r < 1e-12) return base * 2.0 * rho * rho / tau;
    return base * (rho / r) * (-std::expm1(-2.0 * r * rho / tau));
}

double q_on_grid(const Grid& g, int j, int i) {
    double s = g.s_node(j), x = g.x_node(i);
    if (g.dim == 1) return q1(s, x - g.y);
    return std::pow(2.0 * kPi * s, -1.5) * std::exp(-x * x / (2.0 * s));
}

// Composite integration of samples f_0..f_J on a uniform grid of spacing h:
// Simpson where possible, 3/8 rule for an odd tail, trapezoid for J = 1.
double integrate_uniform(const std::vector<double>& f, int J, double h) {
    if (J == 1) return 0.5 * h * (f[0] + f[1]);
    double total = 0.0;
    int j = 0;
    int even_end = (J % 2 == 0) ? J : J - 3;
    for (; j + 2 <= even_end; j += 2)
        total += h / 3.0 * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
    if (J % 2 != 0) {
        if (J == 3) {
            total = 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
        } else {
            total += 3.0 * h / 8.0 * (f[J - 3] + 3.0 * f[J - 2] + 3.0 * f[J - 1] + f[J]);
        }
    }
    return total;
}

} // namespace

void Grid::validate() const {
    if (dim != 1 && dim != 3) throw std::invalid_argument("duhamel::Grid: dim must be 1 or 3");
    if (!(t_max > 0.0)) throw std::invalid_argument("duhamel::Grid: t_max must be positive");
    if (n_time < 4) throw std::invalid_argument("duhamel::Grid: n_time must be >= 4");
    if (!(x_max > 0.0)) throw std::invalid_argument("duhamel::Grid: x_max must be positive");
    if (n_space < 16) throw std::invalid_argument("duhamel::Grid: n_space must be >= 16");
    if (dim == 3 && y != 0.0)
        throw std::invalid_argument("duhamel::Grid: radial grid keeps the source at 0");
    if (dim == 1 && std::abs(y) >= x_max)
        throw std::invalid_argument("duhamel::Grid: source must lie inside the domain");
}

Term base_term(const Grid& g) {
    g.validate();
    Term t;
    t.n = 0;
    t.v.resize(static_cast<std::size_t>(g.n_time) * (g.n_space + 1));
    for (int j = 1; j <= g.n_time; ++j)
        for (int i = 0; i <= g.n_space; ++i)
            t.v[static_cast<std::size_t>(j - 1) * (g.n_space + 1) + i] = q_on_grid(g, j, i);
    return t;
}

Term next_term(const Potential& pot, const Grid& g, const Term& prev) {
    g.validate();
    if (pot.sign() != Sign::negative)
        throw std::invalid_argument(
            "duhamel::next_term: series requires an attractive potential (V <= 0); "
            "for repulsive V the terms alternate and the comparison argument fails");
    if (pot.dim() != g.dim) throw std::invalid_argument("duhamel::next_term: dimension mismatch");

    const int nx = g.n_space, nt = g.n_time;
    const double h = g.dim == 1 ? 2.0 * g.x_max / nx : g.x_max / nx;
    const double du = std::sqrt(g.t_max) / nt; // stored nodes are uniform in u = sqrt(s)

    std::vector<double> neg_v(static_cast<std::size_t>(nx) + 1);
    for (int i = 0; i <= nx; ++i) neg_v[static_cast<std::size_t>(i)] = -pot.eval_radius(std::abs(g.x_node(i)));

    // weighted rows: (-V(z)) * prev(s_j, z) * trapezoid weight * h
    std::vector<double> rows(static_cast<std::size_t>(nt) * (nx + 1));
    for (int j = 1; j <= nt; ++j)
        for (int i = 0; i <= nx; ++i) {
            double w = (i == 0 || i == nx) ? 0.5 : 1.0;
            rows[static_cast<std::size_t>(j - 1) * (nx + 1) + i] =
                prev.at(g, j, i) * neg_v[static_cast<std::size_t>(i)] * w * h;
        }

    Term out;
    out.n = prev.n + 1;
    out.v.assign(static_cast<std::size_t>(nt) * (nx + 1), 0.0);

    std::vector<double> G(static_cast<std::size_t>(nt) + 1);
    for (int J = 1; J <= nt; ++J) {
        const double t = g.s_node(J);
        for (int i = 0; i <= nx; ++i) {
            const double x = g.x_node(i);
            G[0] = 0.0; // 2u * F(u^2) vanishes at u = 0 (F stays bounded)
            for (int j = 1; j < J; ++j) {
                const double tau = t - g.s_node(j);
                const double* row = rows.data() + static_cast<std::size_t>(j - 1) * (nx + 1);
                double F = 0.0;
                if (g.dim == 1) {
                    for (int k = 0; k <= nx; ++k) F += q1(tau, x - g.x_node(k)) * row[k];
                } else {
                    for (int k = 1; k <= nx; ++k)
                        F += radial_heat_kernel_3d(tau, x, g.x_node(k)) * row[k];
                }
                G[static_cast<std::size_t>(j)] = 2.0 * (j * du) * F;
            }
            // s = t endpoint: q(0,x,.) collapses to the point mass at x
            double F_end = neg_v[static_cast<std::size_t>(i)] * prev.at(g, J, i);
            G[static_cast<std::size_t>(J)] = 2.0 * (J * du) * F_end;
            out.v[static_cast<std::size_t>(J - 1) * (nx + 1) + i] = integrate_uniform(G, J, du);
        }
    }
    return out;
}

SumResult sum(const Potential& pot, const Grid& g, int n_max, double tol) {
    SumResult res;
    Term q = base_term(g);
    res.total = q;
    res.total.n = -1;

    // sup of term/q over grid points where q is representable
    auto sup_rel = [&](const Term& t) {
        double s = 0.0;
        for (std::size_t k = 0; k < t.v.size(); ++k)
            if (q.v[k] > 1e-280) s = std::max(s, t.v[k] / q.v[k]);
        return s;
    };

    res.term_sup.push_back(1.0);
    Term cur = q;
    int consecutive = 0;
    for (int n = 1; n <= n_max; ++n) {
        cur = next_term(pot, g, cur);
        for (std::size_t k = 0; k < cur.v.size(); ++k) res.total.v[k] += cur.v[k];
        double s = sup_rel(cur);
        res.sup_ratio.push_back(s / res.term_sup.back());
        res.term_sup.push_back(s);
        res.n_terms = n;
        if (res.sup_ratio.back() >= 1.0) {
            if (++consecutive >= 3) {
                res.diverged = true;
                break;
            }
        } else {
            consecutive = 0;
        }
        if (s < tol) break;
    }
    return res;
}

double radial_gauss_integral(double alpha, int dim, double kappa, double R) {
    if (!(alpha > 0.0)) throw std::domain_error("radial_gauss_integral: alpha must be positive");
    if (!(kappa > 0.0)) throw std::domain_error("radial_gauss_integral: kappa must be positive");
    if (!(R >= 0.0)) throw std::domain_error("radial_gauss_integral: R must be >= 0");
    const double w = 9.0 / std::sqrt(kappa);
    const int n = 800;
    double lo = dim == 1 ? R - w : std::max(0.0, R - w);
    double hi = R + w;
    const double h = (hi - lo) / n;
    auto f = [&](double z) -> double {
        double pen = std::pow(1.0 + std::abs(z), -alpha);
        if (dim == 1) return pen * std::exp(-kappa * (z - R) * (z - R));
        if (dim == 2)
            return 2.0 * kPi * z * pen * std::exp(-kappa * (z - R) * (z - R)) *
                   special::bessel_i0e(2.0 * kappa * R * z);
        // dim == 3
        double base = std::exp(-kappa * (z - R) * (z - R));
        if (R < 1e-12) return 4.0 * kPi * z * z * pen * base;
        return pen * base * (kPi * z / (kappa * R)) * (-std::expm1(-4.0 * kappa * R * z));
    };
    double total = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < n; ++i) total += f(lo + i * h);
    return total * h;
}

FitResult check_equ1(double alpha, int dim, std::span<const ScalarSample> samples) {
    if (!(alpha > 2.0)) throw std::domain_error("check_equ1: requires alpha > 2");
    if (dim < 1 || dim > 3) throw std::invalid_argument("check_equ1: dim must be 1, 2 or 3");
    if (samples.empty()) throw std::invalid_argument("check_equ1: no samples");
    const bool log_case = std::abs(alpha - dim) < 1e-12;
    const double power = std::min(static_cast<double>(dim), alpha);

    FitResult fit;
    fit.c_min = std::numeric_limits<double>::infinity();
    for (const auto& sm : samples) {
        if (!(sm.s > 0.0) || !(sm.r >= 0.0))
            throw std::domain_error("check_equ1: need s > 0 and r >= 0");
        double lhs = std::pow(sm.s, -0.5 * dim) *
                     radial_gauss_integral(alpha, dim, 1.0 / sm.s, sm.r);
        double onr = 1.0 + sm.r;
        double rhs;
        if (sm.s < onr * onr) {
            rhs = (log_case ? 1.0 + std::log(2.0 + sm.r) : 1.0) * std::pow(onr, -power);
        } else {
            rhs = std::pow(sm.s, -0.5 * power) * (log_case ? 1.0 + std::log(1.0 + sm.s) : 1.0);
        }
        double ratio = lhs / rhs;
        fit.ratios.push_back(ratio);
        fit.c_max = std::max(fit.c_max, ratio);
        fit.c_min = std::min(fit.c_min, ratio);
    }
    fit.band = fit.c_max / fit.c_min;
    return fit;
}

FitResult check_convolution_bound(double alpha, double a, double b,
                                  std::span<const ConvSample> samples) {
    if (!(alpha > 2.0)) throw std::domain_error("check_convolution_bound: requires alpha > 2");
    if (!(a > 0.0 && a < b)) throw std::domain_error("check_convolution_bound: need 0 < a < b");
    if (samples.empty()) throw std::invalid_argument("check_convolution_bound: no samples");

    FitResult fit;
    fit.c_min = std::numeric_limits<double>::infinity();
    const int m = 64; // time nodes per half, uniform in sqrt(s) resp. sqrt(t-s)

    for (const auto& sm : samples) {
        if (!(sm.t > 0.0)) throw std::domain_error("check_convolution_bound: t must be positive");
        // Merging the two Gaussians: b|x-z|^2/tau + a|z-y|^2/s =
        // kappa|z - mu|^2 + const, reducing the z-integral to a single center.
        auto F = [&](double s) -> double {
            double tau = sm.t - s;
            double kappa = b / tau + a / s;
            double mu = (b * sm.x3 / tau + a * sm.y3 / s) / kappa;
            double c0 = b * sm.x3 * sm.x3 / tau + a * sm.y3 * sm.y3 / s - kappa * mu * mu;
            return std::pow(tau, -1.5) * std::pow(s, -1.5) * std::exp(-std::max(0.0, c0)) *
                   radial_gauss_integral(alpha, 3, kappa, std::abs(mu));
        };
        const double half = 0.5 * sm.t;
        const double uh = std::sqrt(half) / m;
        double lhs = 0.0;
        for (int half_idx = 0; half_idx < 2; ++half_idx) {
            // integrand 2u F(u^2) resp. 2v F(t - v^2); vanishes at u = 0
            double prev = 0.0;
            for (int i = 1; i <= m; ++i) {
                double u = i * uh;
                double s = half_idx == 0 ? u * u : sm.t - u * u;
                double g = 2.0 * u * F(s);
                lhs += 0.5 * (prev + g) * uh;
                prev = g;
            }
        }
        double dxy = sm.x3 - sm.y3;
        double rhs = std::pow(sm.t, -1.5) * std::exp(-a * dxy * dxy / sm.t);
        double ratio = lhs / rhs;
        fit.ratios.push_back(ratio);
        fit.c_max = std::max(fit.c_max, ratio);
        fit.c_min = std::min(fit.c_min, ratio);
    }
    fit.band = fit.c_max / fit.c_min;
    return fit;
}

} // namespace schro::duhamel
