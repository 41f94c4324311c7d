#include "schro/dirichlet.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "schro/free_kernel.hpp"
#include "schro/rng.hpp"

namespace schro::dirichlet {

double interval_kernel_exact(double t, double x, double y, double R, int n_terms) {
    if (!(t > 0.0)) throw std::domain_error("interval_kernel_exact: t must be positive");
    if (!(R > 0.0)) throw std::domain_error("interval_kernel_exact: R must be positive");
    if (!(std::abs(x) < R && std::abs(y) < R))
        throw std::domain_error("interval_kernel_exact: x and y must lie in (-R, R)");
    const double pi = std::numbers::pi;
    const double rate = pi * pi * t / (8.0 * R * R);
    if (n_terms <= 0) {
        // tail below 1e-12: (1/R) e^{-N^2 rate} * 2 < 1e-12
        double need = std::log(2e12 / R);
        n_terms = static_cast<int>(std::ceil(std::sqrt(std::max(1.0, need / rate)))) + 1;
        n_terms = std::min(n_terms, 2'000'000);
    }
    double sum = 0.0;
    for (int n = n_terms; n >= 1; --n) { // small terms first
        double e = std::exp(-static_cast<double>(n) * n * rate);
        if (e == 0.0) continue;
        sum += e * std::sin(n * pi * (x + R) / (2.0 * R)) * std::sin(n * pi * (y + R) / (2.0 * R));
    }
    return sum / R;
}

namespace {

constexpr int kMaxDim = 8;
constexpr std::int64_t kChunk = 4096;

struct Partials {
    double sum = 0.0, sum2 = 0.0;
    double probe_fine = 0.0, probe_coarse = 0.0;
    std::int64_t n_probe = 0;
};

// survival factor of one step against one flat wall, distances a, b > 0 inside
inline double wall_factor(double a, double b, double dt) {
    return -std::expm1(-2.0 * a * b / dt);
}

} // namespace

fkmc::KernelEstimate estimate_killed_kernel(double t, std::span<const double> x,
                                            std::span<const double> y,
                                            std::span<const double> center, double R,
                                            const fkmc::McConfig& cfg) {
    const int d = static_cast<int>(x.size());
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("estimate_killed_kernel: bad dimension");
    if (y.size() != x.size() || center.size() != x.size())
        throw std::invalid_argument("estimate_killed_kernel: dimension mismatch");
    if (!(t > 0.0)) throw std::domain_error("estimate_killed_kernel: t must be positive");
    if (!(R > 0.0)) throw std::domain_error("estimate_killed_kernel: R must be positive");
    if (!(dist(x, center) < R && dist(y, center) < R))
        throw std::domain_error("estimate_killed_kernel: endpoints must lie inside the ball");
    if (cfg.n_paths < 2) throw std::invalid_argument("estimate_killed_kernel: n_paths must be >= 2");

    int n = cfg.n_steps;
    const bool probe = cfg.step_halving_check;
    if (probe && n % 2 != 0) ++n;
    const double dt = t / n;
    const double sqrt_dt = std::sqrt(dt);

    std::vector<double> frac(static_cast<std::size_t>(n)), sd(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        double remain = t - k * dt;
        frac[static_cast<std::size_t>(k)] = dt / remain;
        sd[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, dt * (remain - dt) / remain));
    }
    (void)sqrt_dt;

    const int pols = cfg.antithetic ? 2 : 1;
    const std::int64_t n_units = cfg.antithetic ? (cfg.n_paths + 1) / 2 : cfg.n_paths;
    const std::int64_t n_probe = probe ? std::max<std::int64_t>(1, n_units / 8) : 0;
    const std::int64_t n_chunks = (n_units + kChunk - 1) / kChunk;
    std::vector<Partials> parts(static_cast<std::size_t>(n_chunks));

    // distance to the boundary: d = 1 gives two wall distances, d >= 2 the
    // sphere distance used in the tangent-plane factor
    auto walk = [&](std::uint64_t unit, bool unit_probe, double out_fine[2], double out_coarse[2]) {
        rng::CounterRng gen(cfg.seed, unit);
        for (int p = 0; p < pols; ++p) {
            const double sign = p == 0 ? 1.0 : -1.0;
            double cur[kMaxDim], prev_even[kMaxDim];
            for (int j = 0; j < d; ++j) cur[j] = prev_even[j] = x[j];
            double lw = 0.0, lw_c = 0.0; // log survival products
            bool dead = false, dead_c = false;

            auto dist_low = [&](const double* z) { // d=1: distance to left wall
                return z[0] - (center[0] - R);
            };
            auto dist_high = [&](const double* z) {
                return (center[0] + R) - z[0];
            };
            auto dist_sphere = [&](const double* z) {
                double s = 0.0;
                for (int j = 0; j < d; ++j) {
                    double u = z[j] - center[j];
                    s += u * u;
                }
                return R - std::sqrt(s);
            };

            for (int k = 0; k < n; ++k) {
                double nxt[kMaxDim];
                if (k == n - 1) {
                    for (int j = 0; j < d; ++j) nxt[j] = y[j];
                } else {
                    for (int j = 0; j < d; ++j) {
                        double z = gen.normal(static_cast<std::uint64_t>(k) * d + j);
                        nxt[j] = cur[j] + frac[static_cast<std::size_t>(k)] * (y[j] - cur[j]) +
                                 sd[static_cast<std::size_t>(k)] * sign * z;
                    }
                }
                if (!dead) {
                    if (d == 1) {
                        double a1 = dist_low(cur), b1 = dist_low(nxt);
                        double a2 = dist_high(cur), b2 = dist_high(nxt);
                        if (b1 <= 0.0 || b2 <= 0.0) dead = true;
                        else lw += std::log(wall_factor(a1, b1, dt)) + std::log(wall_factor(a2, b2, dt));
                    } else {
                        double a = dist_sphere(cur), b = dist_sphere(nxt);
                        if (b <= 0.0) dead = true;
                        else lw += std::log(wall_factor(a, b, dt));
                    }
                }
                if (unit_probe && !dead_c && (k + 1) % 2 == 0) {
                    if (d == 1) {
                        double a1 = dist_low(prev_even), b1 = dist_low(nxt);
                        double a2 = dist_high(prev_even), b2 = dist_high(nxt);
                        if (b1 <= 0.0 || b2 <= 0.0) dead_c = true;
                        else lw_c += std::log(wall_factor(a1, b1, 2.0 * dt)) +
                                     std::log(wall_factor(a2, b2, 2.0 * dt));
                    } else {
                        double a = dist_sphere(prev_even), b = dist_sphere(nxt);
                        if (b <= 0.0) dead_c = true;
                        else lw_c += std::log(wall_factor(a, b, 2.0 * dt));
                    }
                    for (int j = 0; j < d; ++j) prev_even[j] = nxt[j];
                }
                for (int j = 0; j < d; ++j) cur[j] = nxt[j];
            }
            out_fine[p] = dead ? 0.0 : std::exp(lw);
            out_coarse[p] = (unit_probe && !dead_c) ? std::exp(lw_c) : 0.0;
        }
    };

    std::atomic<std::int64_t> next_chunk{0};
    auto worker = [&]() {
        for (;;) {
            std::int64_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) break;
            const std::int64_t lo = c * kChunk, hi = std::min(n_units, lo + kChunk);
            Partials p;
            double wf[2], wc[2];
            for (std::int64_t u = lo; u < hi; ++u) {
                bool u_probe = probe && u < n_probe;
                walk(static_cast<std::uint64_t>(u), u_probe, wf, wc);
                double unit = cfg.antithetic ? 0.5 * (wf[0] + wf[1]) : wf[0];
                p.sum += unit;
                p.sum2 += unit * unit;
                if (u_probe) {
                    p.probe_fine += unit;
                    p.probe_coarse += cfg.antithetic ? 0.5 * (wc[0] + wc[1]) : wc[0];
                    ++p.n_probe;
                }
            }
            parts[static_cast<std::size_t>(c)] = p;
        }
    };
    const int n_threads = std::max(1, cfg.n_threads);
    if (n_threads == 1 || n_chunks == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < std::min<std::int64_t>(n_threads, n_chunks); ++i)
            pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    double sum = 0.0, sum2 = 0.0, pf = 0.0, pc = 0.0;
    std::int64_t probe_units = 0;
    for (const auto& p : parts) {
        sum += p.sum;
        sum2 += p.sum2;
        pf += p.probe_fine;
        pc += p.probe_coarse;
        probe_units += p.n_probe;
    }
    const double nn = static_cast<double>(n_units);
    const double q = gaussian_kernel(t, x, y);
    fkmc::KernelEstimate est;
    est.value = q * sum / nn;
    double var = std::max(0.0, (sum2 - sum * sum / nn) / std::max(1.0, nn - 1.0));
    est.std_error = q * std::sqrt(var / nn);
    est.n_paths = n_units * pols;
    est.n_steps = n;
    if (probe && probe_units > 0)
        est.bias_probe = q * std::abs(pf - pc) / static_cast<double>(probe_units);
    est.method = "fkmc_killed";
    return est;
}

ExitCheck check_exit_identity(const Potential& pot, double t, double x, double y,
                              double center, double R, const fkmc::McConfig& mc,
                              const pde::GridConfig& grid) {
    if (pot.dim() != 1) throw std::invalid_argument("check_exit_identity: 1d only");
    if (!(t > 0.0)) throw std::domain_error("check_exit_identity: t must be positive");
    if (!(R > 0.0)) throw std::domain_error("check_exit_identity: R must be positive");
    const double wl = center - R, wr = center + R;
    if (!(x > wl && x < wr))
        throw std::domain_error("check_exit_identity: x must lie inside the interval");
    if (!(y < wl || y > wr))
        throw std::domain_error("check_exit_identity: y must lie outside the closed interval");

    ExitCheck out;
    const double xs[1] = {x}, ys[1] = {y};
    fkmc::KernelEstimate lhs = fkmc::estimate_kernel(pot, t, xs, ys, mc);
    out.lhs = lhs.value;
    out.lhs_error = lhs.std_error;

    // kernel p(. , wall, y) traced by one solve started from y
    pde::GridConfig g = grid;
    if (g.x_range <= 0.0)
        g.x_range = std::max(std::abs(y), std::abs(center) + R) + 6.0 * std::sqrt(t) + 1.0;
    const double probes[2] = {wl, wr};
    pde::Trace trace = pde::solve_1d_trace(pot, t, y, g, probes);

    const int n = std::max(2, mc.n_steps);
    const double dt = t / n;
    const double sqrt_dt = std::sqrt(dt);
    const std::int64_t n_paths = std::max<std::int64_t>(2, mc.n_paths);

    double sum = 0.0, sum2 = 0.0;
    std::int64_t exits = 0;
    const double vl = pot.eval_radius(std::abs(wl)), vr = pot.eval_radius(std::abs(wr));
    for (std::int64_t i = 0; i < n_paths; ++i) {
        rng::CounterRng gen(mc.seed, static_cast<std::uint64_t>(i));
        double z = x, q_acc = 0.0, contrib = 0.0;
        double vz = pot.eval_radius(std::abs(z));
        for (int k = 0; k < n; ++k) {
            double zn = z + sqrt_dt * gen.normal(3ULL * k);
            double vn = pot.eval_radius(std::abs(zn));
            int side = -1; // 0 = left wall, 1 = right wall
            double tau = 0.0, q_at_exit = 0.0;
            if (zn <= wl || zn >= wr) {
                side = zn <= wl ? 0 : 1;
                double wall = side == 0 ? wl : wr;
                double theta = (wall - z) / (zn - z);
                tau = (k + theta) * dt;
                q_at_exit = q_acc + 0.5 * (vz + (side == 0 ? vl : vr)) * theta * dt;
            } else {
                double pl = std::exp(-2.0 * (z - wl) * (zn - wl) / dt);
                double pr = std::exp(-2.0 * (wr - z) * (wr - zn) / dt);
                double u1 = gen.uniform(3ULL * k + 1), u2 = gen.uniform(3ULL * k + 2);
                if (u1 < pl || u2 < pr) {
                    side = (u1 < pl && (!(u2 < pr) || pl >= pr)) ? 0 : 1;
                    tau = (k + 0.5) * dt;
                    q_at_exit = q_acc + 0.5 * (vz + (side == 0 ? vl : vr)) * 0.5 * dt;
                }
            }
            if (side >= 0) {
                double rem = t - tau;
                double pk = trace.value_at(static_cast<std::size_t>(side), rem);
                contrib = std::exp(-q_at_exit) * pk;
                ++exits;
                break;
            }
            q_acc += 0.5 * (vz + vn) * dt;
            z = zn;
            vz = vn;
        }
        sum += contrib;
        sum2 += contrib * contrib;
    }
    const double nn = static_cast<double>(n_paths);
    out.rhs = sum / nn;
    double var = std::max(0.0, (sum2 - sum * sum / nn) / (nn - 1.0));
    out.rhs_error = std::sqrt(var / nn);
    out.exit_fraction = static_cast<double>(exits) / nn;
    double floor = 1e-3 * std::max(out.lhs, out.rhs);
    out.sigma_distance = std::abs(out.lhs - out.rhs) /
                         std::sqrt(out.lhs_error * out.lhs_error +
                                   out.rhs_error * out.rhs_error + floor * floor);
    return out;
}

} // namespace schro::dirichlet
