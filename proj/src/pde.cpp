#include "schro/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "schro/free_kernel.hpp"

namespace schro::pde {

namespace {

// Tridiagonal rows of the generator L = (1/2)Delta - V on the grid.
struct Operator {
    std::vector<double> lower, diag, upper;
    int solve_lo = 0; // first unknown index (0 radial, 1 for 1d Dirichlet wall)
};

Operator build_operator_1d(const Potential& pot, const std::vector<double>& grid) {
    const std::size_t n = grid.size();
    const double h = grid[1] - grid[0];
    Operator op;
    op.solve_lo = 1;
    op.lower.assign(n, 0.0);
    op.diag.assign(n, 0.0);
    op.upper.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        op.lower[i] = 0.5 / (h * h);
        op.upper[i] = 0.5 / (h * h);
        op.diag[i] = -1.0 / (h * h) - pot.eval_radius(std::abs(grid[i]));
    }
    return op;
}

Operator build_operator_radial(const Potential& pot, const std::vector<double>& grid, int dim) {
    const std::size_t n = grid.size();
    const double h = grid[1] - grid[0];
    Operator op;
    op.solve_lo = 0;
    op.lower.assign(n, 0.0);
    op.diag.assign(n, 0.0);
    op.upper.assign(n, 0.0);
    // r = 0: reflecting node, (1/2)*d*u'' with the symmetric ghost u(-h) = u(h)
    op.diag[0] = -static_cast<double>(dim) / (h * h) - pot.eval_radius(0.0);
    op.upper[0] = static_cast<double>(dim) / (h * h);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double drift = (dim - 1) / (4.0 * h * grid[i]);
        op.lower[i] = 0.5 / (h * h) - drift;
        op.upper[i] = 0.5 / (h * h) + drift;
        op.diag[i] = -1.0 / (h * h) - pot.eval_radius(grid[i]);
    }
    return op;
}

// One Crank-Nicolson step of size dt; boundary values stay 0.
void cn_step(const Operator& op, double dt, std::vector<double>& u,
             std::vector<double>& rhs, std::vector<double>& cp, std::vector<double>& dp) {
    const std::size_t n = u.size();
    const std::size_t lo = static_cast<std::size_t>(op.solve_lo), hi = n - 2;
    // rhs = (I + dt/2 L) u on the unknowns
    for (std::size_t i = lo; i <= hi; ++i) {
        double left = i > 0 ? u[i - 1] : 0.0;
        rhs[i] = u[i] + 0.5 * dt * (op.lower[i] * left + op.diag[i] * u[i] + op.upper[i] * u[i + 1]);
    }
    // Thomas solve of (I - dt/2 L) u+ = rhs
    double b0 = 1.0 - 0.5 * dt * op.diag[lo];
    cp[lo] = (-0.5 * dt * op.upper[lo]) / b0;
    dp[lo] = rhs[lo] / b0;
    for (std::size_t i = lo + 1; i <= hi; ++i) {
        double a = -0.5 * dt * op.lower[i];
        double b = 1.0 - 0.5 * dt * op.diag[i];
        double c = -0.5 * dt * op.upper[i];
        double m = b - a * cp[i - 1];
        cp[i] = c / m;
        dp[i] = (rhs[i] - a * dp[i - 1]) / m;
    }
    u[hi] = dp[hi];
    for (std::size_t i = hi; i-- > lo;) u[i] = dp[i] - cp[i] * u[i + 1];
    u[n - 1] = 0.0;
    if (lo == 1) u[0] = 0.0;
}

double sup_abs_potential(const Potential& pot, double radius) {
    std::vector<double> origin(static_cast<std::size_t>(pot.dim()), 0.0);
    auto [lo, hi] = pot.bounds_on_ball(origin, radius);
    return std::max(std::abs(lo), std::abs(hi));
}

double profile_mass(const Solution& s) {
    const double h = s.grid[1] - s.grid[0];
    double m = 0.0;
    if (s.dim == 1) {
        for (std::size_t i = 0; i + 1 < s.grid.size(); ++i)
            m += 0.5 * (s.values[i] + s.values[i + 1]) * h;
    } else {
        const double omega = s.dim == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
        auto f = [&](std::size_t i) {
            return s.values[i] * std::pow(s.grid[i], s.dim - 1);
        };
        for (std::size_t i = 0; i + 1 < s.grid.size(); ++i) m += 0.5 * (f(i) + f(i + 1)) * h;
        m *= omega;
    }
    return m;
}

void finalize(Solution& s) {
    s.mass = profile_mass(s);
    double vmax = 0.0, vmin = 0.0;
    for (double v : s.values) {
        vmax = std::max(vmax, v);
        vmin = std::min(vmin, v);
    }
    if (vmin < -1e-12 * std::max(vmax, 1e-300)) s.positivity_violated = true;
}

// March from heat time eps to t with geometrically graded steps; step k ends
// at eps*(t/eps)^(k/n). Records probes after each step when trace != nullptr.
void march(const Operator& op, Solution& s, double t_target, int n_time,
           Trace* trace, const std::vector<double>* probes) {
    std::vector<double> rhs(s.values.size()), cp(s.values.size()), dp(s.values.size());
    const double ratio = std::log(t_target / s.epsilon) / n_time;
    double h_prev = s.epsilon;
    auto record = [&](double h) {
        if (!trace) return;
        trace->times.push_back(h);
        for (std::size_t j = 0; j < probes->size(); ++j)
            trace->values[j].push_back(s.value_at((*probes)[j]));
    };
    record(h_prev);
    for (int k = 1; k <= n_time; ++k) {
        double h_next = k == n_time ? t_target : s.epsilon * std::exp(ratio * k);
        cn_step(op, h_next - h_prev, s.values, rhs, cp, dp);
        h_prev = h_next;
        record(h_prev);
    }
    s.t = t_target;
}

// Weight the mollified delta by exp(-eps V), a split first step. The free
// kernel alone drops the potential over [0, eps] and leaves an O(eps V(x0))
// relative bias that neither grid refinement nor Richardson can see.
void weight_initial_data(const Potential& pot, Solution& s) {
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        double r = s.dim == 1 ? std::abs(s.grid[i]) : s.grid[i];
        s.values[i] *= std::exp(-s.epsilon * pot.eval_radius(r));
    }
}

void check_common(const Potential& pot, double t, const GridConfig& cfg, const char* who) {
    if (!(t > 0.0)) throw std::domain_error(std::string(who) + ": t must be positive");
    if (cfg.n_space < 8) throw std::invalid_argument(std::string(who) + ": n_space must be >= 8");
    if (cfg.n_time < 2) throw std::invalid_argument(std::string(who) + ": n_time must be >= 2");
    if (cfg.delta_init_width != 0.0 && !(cfg.delta_init_width > 0.0 && cfg.delta_init_width < t / 10.0))
        throw std::invalid_argument(std::string(who) + ": delta_init_width must lie in (0, t/10)");
    (void)pot;
}

} // namespace

double Solution::value_at(double pos) const {
    if (dim != 1 && pos < 0.0) throw std::domain_error("value_at: negative radius");
    if (pos <= grid.front()) {
        if (dim == 1 && pos < grid.front()) return 0.0;
        return values.front();
    }
    if (pos >= grid.back()) return 0.0;
    double h = grid[1] - grid[0];
    std::size_t i = std::min(grid.size() - 2,
                             static_cast<std::size_t>((pos - grid.front()) / h));
    double w = (pos - grid[i]) / h;
    return values[i] * (1.0 - w) + values[i + 1] * w;
}

void Solution::write_csv(std::ostream& os) const {
    os << "# t=" << t << " d=" << dim << " eps=" << epsilon
       << " n_space=" << n_space << " n_time=" << n_time << "\n";
    os << (dim == 1 ? "x" : "r") << ",value\n";
    for (std::size_t i = 0; i < grid.size(); ++i) os << grid[i] << "," << values[i] << "\n";
}

Solution solve_1d(const Potential& pot, double t, double x0, const GridConfig& cfg) {
    check_common(pot, t, cfg, "solve_1d");
    if (pot.dim() != 1) throw std::invalid_argument("solve_1d: potential must be 1-dimensional");
    const double need = std::abs(x0) + 6.0 * std::sqrt(t);
    double L = cfg.x_range > 0.0 ? cfg.x_range : need + 1.0;
    if (L < need) throw std::invalid_argument("solve_1d: x_range must be >= |x0| + 6*sqrt(t)");

    Solution s;
    s.dim = 1;
    s.x0 = x0;
    s.epsilon = cfg.delta_init_width > 0.0 ? cfg.delta_init_width : t / 1000.0;
    s.n_space = cfg.n_space;
    s.n_time = cfg.n_time;
    s.grid.resize(static_cast<std::size_t>(cfg.n_space) + 1);
    for (int i = 0; i <= cfg.n_space; ++i)
        s.grid[static_cast<std::size_t>(i)] = -L + 2.0 * L * i / cfg.n_space;
    s.values.resize(s.grid.size());
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        double dx = s.grid[i] - x0;
        s.values[i] = std::exp(-dx * dx / (2.0 * s.epsilon)) /
                      std::sqrt(2.0 * std::numbers::pi * s.epsilon);
    }
    weight_initial_data(pot, s);
    s.time_resolution_warning = cfg.n_time < 8.0 * std::log(t / s.epsilon) ||
                                sup_abs_potential(pot, L) * (t / cfg.n_time) > 0.5;

    Operator op = build_operator_1d(pot, s.grid);
    march(op, s, t, cfg.n_time, nullptr, nullptr);
    finalize(s);
    return s;
}

Solution solve_radial(const Potential& pot, double t, int dim, const GridConfig& cfg) {
    check_common(pot, t, cfg, "solve_radial");
    if (dim != 2 && dim != 3) throw std::invalid_argument("solve_radial: dim must be 2 or 3");
    if (pot.dim() != dim) throw std::invalid_argument("solve_radial: potential dimension mismatch");
    const double need = 6.0 * std::sqrt(t);
    double R = cfg.x_range > 0.0 ? cfg.x_range : need + 1.0;
    if (R < need) throw std::invalid_argument("solve_radial: r_max must be >= 6*sqrt(t)");

    Solution s;
    s.dim = dim;
    s.epsilon = cfg.delta_init_width > 0.0 ? cfg.delta_init_width : t / 1000.0;
    s.n_space = cfg.n_space;
    s.n_time = cfg.n_time;
    s.grid.resize(static_cast<std::size_t>(cfg.n_space) + 1);
    for (int i = 0; i <= cfg.n_space; ++i)
        s.grid[static_cast<std::size_t>(i)] = R * i / cfg.n_space;
    s.values.resize(s.grid.size());
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        double r = s.grid[i];
        s.values[i] = std::pow(2.0 * std::numbers::pi * s.epsilon, -0.5 * dim) *
                      std::exp(-r * r / (2.0 * s.epsilon));
    }
    weight_initial_data(pot, s);
    s.time_resolution_warning = cfg.n_time < 8.0 * std::log(t / s.epsilon) ||
                                sup_abs_potential(pot, R) * (t / cfg.n_time) > 0.5;

    Operator op = build_operator_radial(pot, s.grid, dim);
    march(op, s, t, cfg.n_time, nullptr, nullptr);
    finalize(s);
    return s;
}

Solution advance(const Potential& pot, const Solution& state, double extra_t, int n_time) {
    if (!(extra_t > 0.0)) throw std::domain_error("advance: extra_t must be positive");
    if (n_time < 1) throw std::invalid_argument("advance: n_time must be >= 1");
    Solution s = state;
    Operator op = s.dim == 1 ? build_operator_1d(pot, s.grid)
                             : build_operator_radial(pot, s.grid, s.dim);
    std::vector<double> rhs(s.values.size()), cp(s.values.size()), dp(s.values.size());
    const double t0 = s.t, t1 = s.t + extra_t;
    double h_prev = t0;
    for (int k = 1; k <= n_time; ++k) {
        double h_next = t0 * std::exp(std::log(t1 / t0) * k / n_time);
        if (k == n_time) h_next = t1;
        cn_step(op, h_next - h_prev, s.values, rhs, cp, dp);
        h_prev = h_next;
    }
    s.t = t1;
    finalize(s);
    return s;
}

std::vector<double> apply_operator(const Potential& pot, const Solution& state) {
    Operator op = state.dim == 1 ? build_operator_1d(pot, state.grid)
                                 : build_operator_radial(pot, state.grid, state.dim);
    std::vector<double> out(state.values.size(), 0.0);
    const std::size_t n = state.values.size();
    for (std::size_t i = static_cast<std::size_t>(op.solve_lo); i + 1 < n; ++i) {
        double left = i > 0 ? state.values[i - 1] : 0.0;
        out[i] = op.lower[i] * left + op.diag[i] * state.values[i] +
                 op.upper[i] * state.values[i + 1];
    }
    return out;
}

RefinedValue kernel_value_1d(const Potential& pot, double t, double x0, double y,
                             const GridConfig& cfg) {
    GridConfig c = cfg;
    if (c.x_range <= 0.0) c.x_range = std::abs(x0) + 6.0 * std::sqrt(t) + 1.0;
    GridConfig f = c;
    f.n_space *= 2;
    f.n_time *= 2;
    double vc = solve_1d(pot, t, x0, c).value_at(y);
    double vf = solve_1d(pot, t, x0, f).value_at(y);
    return {vf + (vf - vc) / 3.0, std::abs(vf - vc) / 3.0};
}

RefinedValue kernel_value_radial(const Potential& pot, double t, int dim, double r,
                                 const GridConfig& cfg) {
    GridConfig c = cfg;
    if (c.x_range <= 0.0) c.x_range = 6.0 * std::sqrt(t) + 1.0;
    GridConfig f = c;
    f.n_space *= 2;
    f.n_time *= 2;
    double vc = solve_radial(pot, t, dim, c).value_at(r);
    double vf = solve_radial(pot, t, dim, f).value_at(r);
    return {vf + (vf - vc) / 3.0, std::abs(vf - vc) / 3.0};
}

double Trace::value_at(std::size_t probe, double h) const {
    const auto& v = values.at(probe);
    if (times.empty() || h < times.front()) return 0.0;
    if (h >= times.back()) return v.back();
    auto it = std::upper_bound(times.begin(), times.end(), h);
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    double w = (h - times[i - 1]) / (times[i] - times[i - 1]);
    return v[i - 1] * (1.0 - w) + v[i] * w;
}

Trace solve_1d_trace(const Potential& pot, double t, double x0, const GridConfig& cfg,
                     std::span<const double> probes) {
    check_common(pot, t, cfg, "solve_1d_trace");
    if (pot.dim() != 1) throw std::invalid_argument("solve_1d_trace: potential must be 1d");
    const double need = std::abs(x0) + 6.0 * std::sqrt(t);
    double L = cfg.x_range > 0.0 ? cfg.x_range : need + 1.0;
    if (L < need) throw std::invalid_argument("solve_1d_trace: x_range must be >= |x0| + 6*sqrt(t)");

    Solution s;
    s.dim = 1;
    s.x0 = x0;
    s.epsilon = cfg.delta_init_width > 0.0 ? cfg.delta_init_width : t / 1000.0;
    s.n_space = cfg.n_space;
    s.n_time = cfg.n_time;
    s.grid.resize(static_cast<std::size_t>(cfg.n_space) + 1);
    for (int i = 0; i <= cfg.n_space; ++i)
        s.grid[static_cast<std::size_t>(i)] = -L + 2.0 * L * i / cfg.n_space;
    s.values.resize(s.grid.size());
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        double dx = s.grid[i] - x0;
        s.values[i] = std::exp(-dx * dx / (2.0 * s.epsilon)) /
                      std::sqrt(2.0 * std::numbers::pi * s.epsilon);
    }
    weight_initial_data(pot, s);

    Trace trace;
    std::vector<double> probe_list(probes.begin(), probes.end());
    trace.values.resize(probe_list.size());
    Operator op = build_operator_1d(pot, s.grid);
    march(op, s, t, cfg.n_time, &trace, &probe_list);
    return trace;
}

} // namespace schro::pde
