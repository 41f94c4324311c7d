#include "schro/feynman_kac.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "schro/free_kernel.hpp"
#include "schro/special.hpp"

namespace schro::fkmc {

Quadrature quadrature_from_string(const std::string& s) {
    if (s == "left") return Quadrature::left;
    if (s == "midpoint") return Quadrature::midpoint;
    if (s == "trapezoid") return Quadrature::trapezoid;
    throw std::invalid_argument("unknown quadrature '" + s + "' (valid: left, midpoint, trapezoid)");
}

std::string to_string(Quadrature q) {
    switch (q) {
        case Quadrature::left: return "left";
        case Quadrature::midpoint: return "midpoint";
        case Quadrature::trapezoid: return "trapezoid";
    }
    return "?";
}

double path_weight(const Potential& pot, const Path& path, Quadrature quad) {
    if (path.dim != pot.dim()) throw std::invalid_argument("path_weight: dimension mismatch");
    if (path.n_steps < 1) throw std::invalid_argument("path_weight: empty path");
    const double dt = path.t / path.n_steps;
    double q = 0.0;
    switch (quad) {
        case Quadrature::left:
            for (int k = 0; k < path.n_steps; ++k) q += pot.eval_radius(norm(path.at(k))) * dt;
            break;
        case Quadrature::trapezoid: {
            double vp = pot.eval_radius(norm(path.at(0)));
            for (int k = 1; k <= path.n_steps; ++k) {
                double vn = pot.eval_radius(norm(path.at(k)));
                q += 0.5 * (vp + vn) * dt;
                vp = vn;
            }
            break;
        }
        case Quadrature::midpoint:
            for (int k = 0; k < path.n_steps; ++k) {
                auto a = path.at(k), b = path.at(k + 1);
                double s = 0.0;
                for (int j = 0; j < path.dim; ++j) {
                    double m = 0.5 * (a[j] + b[j]);
                    s += m * m;
                }
                q += pot.eval_radius(std::sqrt(s)) * dt;
            }
            break;
    }
    return std::exp(-q);
}

namespace {

constexpr int kMaxDim = 8;
constexpr std::int64_t kChunk = 4096; // units per chunk; fixed so reductions are
                                      // independent of the worker count

struct WalkPlan {
    double t = 0.0, dt = 0.0, sqrt_dt = 0.0;
    int n = 0, d = 1;
    bool bridge = false;
    double start[kMaxDim] = {0};
    double target[kMaxDim] = {0};
    std::vector<double> frac, sd; // bridge step coefficients
};

inline double pot_at(const Potential& pot, const double* z, int d) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += z[j] * z[j];
    return pot.eval_radius(std::sqrt(s));
}

// One unit = one path, or an antithetic pair sharing (negated) increments.
// Walks without materializing the path; optionally evaluates the quadrature a
// second time on every other node (the halved-step grid of the same path).
struct UnitWeights {
    double fine[2];
    double coarse[2];
};

void walk_unit(const Potential& pot, const WalkPlan& plan, std::uint64_t seed,
               std::uint64_t unit_index, bool antithetic, bool probe,
               Quadrature quad, UnitWeights& out) {
    const int d = plan.d, n = plan.n;
    const int pols = antithetic ? 2 : 1;
    rng::CounterRng gen(seed, unit_index);

    double cur[2][kMaxDim], prev_even[2][kMaxDim];
    double q_acc[2] = {0.0, 0.0}, qc_acc[2] = {0.0, 0.0};
    double v_prev[2] = {0.0, 0.0}, v_prev_even[2] = {0.0, 0.0};

    for (int p = 0; p < pols; ++p)
        for (int j = 0; j < d; ++j) cur[p][j] = prev_even[p][j] = plan.start[j];
    if (quad != Quadrature::midpoint) {
        double v0 = pot_at(pot, cur[0], d);
        v_prev[0] = v_prev[1] = v0;
        v_prev_even[0] = v_prev_even[1] = v0;
    }

    double z[kMaxDim];
    for (int k = 0; k < n; ++k) {
        const bool last_bridge = plan.bridge && k == n - 1;
        if (!last_bridge)
            for (int j = 0; j < d; ++j)
                z[j] = gen.normal(static_cast<std::uint64_t>(k) * d + j);

        for (int p = 0; p < pols; ++p) {
            const double sign = p == 0 ? 1.0 : -1.0;
            double nxt[kMaxDim];
            if (last_bridge) {
                for (int j = 0; j < d; ++j) nxt[j] = plan.target[j];
            } else if (plan.bridge) {
                const double f = plan.frac[k], sd = plan.sd[k];
                for (int j = 0; j < d; ++j)
                    nxt[j] = cur[p][j] + f * (plan.target[j] - cur[p][j]) + sd * sign * z[j];
            } else {
                for (int j = 0; j < d; ++j)
                    nxt[j] = cur[p][j] + plan.sqrt_dt * sign * z[j];
            }

            switch (quad) {
                case Quadrature::left:
                    q_acc[p] += v_prev[p] * plan.dt;
                    v_prev[p] = pot_at(pot, nxt, d);
                    break;
                case Quadrature::trapezoid: {
                    double vn = pot_at(pot, nxt, d);
                    q_acc[p] += 0.5 * (v_prev[p] + vn) * plan.dt;
                    v_prev[p] = vn;
                    break;
                }
                case Quadrature::midpoint: {
                    double s = 0.0;
                    for (int j = 0; j < d; ++j) {
                        double m = 0.5 * (cur[p][j] + nxt[j]);
                        s += m * m;
                    }
                    q_acc[p] += pot.eval_radius(std::sqrt(s)) * plan.dt;
                    break;
                }
            }

            if (probe && ((k + 1) % 2 == 0)) {
                // arrived at an even node: close the coarse step of width 2*dt
                switch (quad) {
                    case Quadrature::left:
                        qc_acc[p] += v_prev_even[p] * 2.0 * plan.dt;
                        v_prev_even[p] = v_prev[p];
                        break;
                    case Quadrature::trapezoid:
                        qc_acc[p] += (v_prev_even[p] + v_prev[p]) * plan.dt;
                        v_prev_even[p] = v_prev[p];
                        break;
                    case Quadrature::midpoint: {
                        double s = 0.0;
                        for (int j = 0; j < d; ++j) {
                            double m = 0.5 * (prev_even[p][j] + nxt[j]);
                            s += m * m;
                        }
                        qc_acc[p] += pot.eval_radius(std::sqrt(s)) * 2.0 * plan.dt;
                        break;
                    }
                }
                for (int j = 0; j < d; ++j) prev_even[p][j] = nxt[j];
            }
            for (int j = 0; j < d; ++j) cur[p][j] = nxt[j];
        }
    }

    for (int p = 0; p < pols; ++p) {
        out.fine[p] = std::exp(-q_acc[p]);
        out.coarse[p] = probe ? std::exp(-qc_acc[p]) : 0.0;
    }
}

struct Partials {
    double sum = 0.0, sum2 = 0.0;
    double probe_fine = 0.0, probe_coarse = 0.0;
    std::int64_t n_probe = 0;
};

struct Accum {
    double s = 0.0, c = 0.0;
    bool kahan = false;
    void add(double v) {
        if (!kahan) { s += v; return; }
        double y = v - c, t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

KernelEstimate run_mc(const Potential& pot, double t, std::span<const double> x,
                      const double* y, const McConfig& cfg, const char* who) {
    if (!(t > 0.0)) throw std::domain_error(std::string(who) + ": t must be positive");
    if (static_cast<int>(x.size()) != pot.dim())
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    if (pot.dim() > kMaxDim) throw std::invalid_argument(std::string(who) + ": dim too large");
    if (cfg.n_paths < 2) throw std::invalid_argument(std::string(who) + ": n_paths must be >= 2");
    if (cfg.n_steps < 1) throw std::invalid_argument(std::string(who) + ": n_steps must be >= 1");
    if (pot.sign() == Sign::negative && t > cfg.t_cap)
        throw std::domain_error(std::string(who) +
            ": t exceeds t_cap for an attractive potential; raise t_cap to confirm");

    WalkPlan plan;
    plan.t = t;
    plan.d = pot.dim();
    plan.n = cfg.n_steps;
    const bool probe = cfg.step_halving_check;
    if (probe && plan.n % 2 != 0) ++plan.n; // coarse grid needs an even count
    plan.dt = t / plan.n;
    plan.sqrt_dt = std::sqrt(plan.dt);
    for (int j = 0; j < plan.d; ++j) plan.start[j] = x[j];
    if (y != nullptr) {
        plan.bridge = true;
        for (int j = 0; j < plan.d; ++j) plan.target[j] = y[j];
        plan.frac.resize(plan.n);
        plan.sd.resize(plan.n);
        for (int k = 0; k < plan.n; ++k) {
            double remain = t - k * plan.dt;
            plan.frac[k] = plan.dt / remain;
            plan.sd[k] = std::sqrt(std::max(0.0, plan.dt * (remain - plan.dt) / remain));
        }
    }

    const int pols = cfg.antithetic ? 2 : 1;
    const std::int64_t n_units = cfg.antithetic ? (cfg.n_paths + 1) / 2 : cfg.n_paths;
    const std::int64_t n_probe = probe ? std::max<std::int64_t>(1, n_units / 8) : 0;
    const std::int64_t n_chunks = (n_units + kChunk - 1) / kChunk;
    std::vector<Partials> parts(static_cast<std::size_t>(n_chunks));

    std::atomic<std::int64_t> next_chunk{0};
    auto worker = [&]() {
        for (;;) {
            std::int64_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) break;
            const std::int64_t lo = c * kChunk;
            const std::int64_t hi = std::min(n_units, lo + kChunk);
            Partials p;
            Accum s, s2, pf, pc;
            s.kahan = s2.kahan = pf.kahan = pc.kahan = cfg.compensated_sum;
            UnitWeights w;
            for (std::int64_t u = lo; u < hi; ++u) {
                bool u_probe = probe && u < n_probe;
                walk_unit(pot, plan, cfg.seed, static_cast<std::uint64_t>(u),
                          cfg.antithetic, u_probe, cfg.quadrature, w);
                double unit = cfg.antithetic ? 0.5 * (w.fine[0] + w.fine[1]) : w.fine[0];
                s.add(unit);
                s2.add(unit * unit);
                if (u_probe) {
                    double cf = cfg.antithetic ? 0.5 * (w.coarse[0] + w.coarse[1]) : w.coarse[0];
                    pf.add(unit);
                    pc.add(cf);
                    ++p.n_probe;
                }
            }
            p.sum = s.s;
            p.sum2 = s2.s;
            p.probe_fine = pf.s;
            p.probe_coarse = pc.s;
            parts[static_cast<std::size_t>(c)] = p;
        }
    };

    const int n_threads = std::max(1, cfg.n_threads);
    if (n_threads == 1 || n_chunks == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        int spawn = static_cast<int>(std::min<std::int64_t>(n_threads, n_chunks));
        pool.reserve(static_cast<std::size_t>(spawn));
        for (int i = 0; i < spawn; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    Accum sum, sum2, pfine, pcoarse;
    sum.kahan = sum2.kahan = pfine.kahan = pcoarse.kahan = cfg.compensated_sum;
    std::int64_t probe_units = 0;
    for (const auto& p : parts) { // fixed chunk order: worker-count independent
        sum.add(p.sum);
        sum2.add(p.sum2);
        pfine.add(p.probe_fine);
        pcoarse.add(p.probe_coarse);
        probe_units += p.n_probe;
    }

    const double n = static_cast<double>(n_units);
    double mean = sum.s / n;
    double var = std::max(0.0, (sum2.s - sum.s * sum.s / n) / std::max(1.0, n - 1.0));
    KernelEstimate est;
    est.value = mean;
    est.std_error = std::sqrt(var / n);
    est.n_paths = n_units * pols;
    est.n_steps = plan.n;
    if (probe && probe_units > 0)
        est.bias_probe = std::abs(pfine.s - pcoarse.s) / static_cast<double>(probe_units);
    return est;
}

} // namespace

KernelEstimate estimate_survival(const Potential& pot, double t,
                                 std::span<const double> x, const McConfig& cfg) {
    KernelEstimate est = run_mc(pot, t, x, nullptr, cfg, "estimate_survival");
    est.method = "fkmc_survival";
    return est;
}

KernelEstimate estimate_kernel(const Potential& pot, double t,
                               std::span<const double> x, std::span<const double> y,
                               const McConfig& cfg) {
    if (x.size() != y.size()) throw std::invalid_argument("estimate_kernel: x/y dimension mismatch");
    KernelEstimate est = run_mc(pot, t, x, y.data(), cfg, "estimate_kernel");
    double q = gaussian_kernel(t, x, y);
    est.value *= q;
    est.std_error *= q;
    est.bias_probe *= q;
    est.method = "fkmc_bridge";
    return est;
}

double free_kernel_time_integral(double r, int dim, double t_upper) {
    if (!(r > 0.0)) throw std::domain_error("free_kernel_time_integral: r must be positive");
    if (!(t_upper > 0.0)) throw std::domain_error("free_kernel_time_integral: t_upper must be positive");
    const double u0 = r * r / (2.0 * t_upper);
    const double pi = std::numbers::pi;
    if (dim == 2) return special::expint_e1(u0) / (2.0 * pi);
    if (dim == 3) return special::upper_gamma_half(u0) * std::sqrt(2.0) / (r * std::pow(2.0 * pi, 1.5));
    throw std::invalid_argument("free_kernel_time_integral: dim must be 2 or 3");
}

double free_green(double r, int dim) {
    if (!(r > 0.0)) throw std::domain_error("free_green: r must be positive");
    if (dim < 3) throw std::invalid_argument("free_green: finite only for dim >= 3");
    const double pi = std::numbers::pi;
    return std::tgamma(0.5 * dim - 1.0) / (2.0 * std::pow(pi, 0.5 * dim)) * std::pow(r, 2.0 - dim);
}

GreenEstimate estimate_green(const Potential& pot, std::span<const double> x,
                             std::span<const double> y, const GreenConfig& cfg) {
    if (pot.sign() != Sign::positive)
        throw std::invalid_argument("estimate_green: requires a repulsive potential (V >= 0)");
    if (pot.dim() < 2) throw std::invalid_argument("estimate_green: dim must be >= 2");
    if (x.size() != y.size() || static_cast<int>(x.size()) != pot.dim())
        throw std::invalid_argument("estimate_green: dimension mismatch");
    if (!(cfg.t_min > 0.0 && cfg.t_max > cfg.t_min))
        throw std::invalid_argument("estimate_green: need 0 < t_min < t_max");
    const double r = dist(x, y);
    if (!(r > 0.0)) throw std::domain_error("estimate_green: x and y must differ");

    const int n_nodes = std::max(
        2, static_cast<int>(std::ceil(cfg.nodes_per_decade * std::log10(cfg.t_max / cfg.t_min))) + 1);
    const double dlog = std::log(cfg.t_max / cfg.t_min) / (n_nodes - 1);

    GreenEstimate g;
    g.t_min = cfg.t_min;
    g.t_max = cfg.t_max;
    g.n_nodes = n_nodes;
    double var = 0.0;
    for (int j = 0; j < n_nodes; ++j) {
        double t = cfg.t_min * std::exp(dlog * j);
        McConfig mc = cfg.mc;
        mc.seed = rng::derive_seed(cfg.mc.seed, static_cast<std::uint64_t>(j) + 1);
        mc.n_steps = std::clamp(static_cast<int>(std::ceil(cfg.steps_per_unit_time * t)),
                                cfg.steps_min, cfg.steps_max);
        KernelEstimate k = estimate_kernel(pot, t, x, y, mc);
        double w = dlog * ((j == 0 || j == n_nodes - 1) ? 0.5 : 1.0) * t;
        g.value += w * k.value;
        var += w * w * k.std_error * k.std_error;
    }
    g.std_error = std::sqrt(var);

    g.small_t_tail = free_kernel_time_integral(r, pot.dim(), cfg.t_min);

    // Above t_max the kernel is bounded by (2*pi*t)^(-d/2) * exp(-t^beta) with
    // the unit-constant global branch; integrate that bound numerically.
    const double beta = (2.0 - pot.alpha()) / (2.0 + pot.alpha());
    if (pot.alpha() > 0.0 && pot.alpha() < 2.0) {
        double tail = 0.0, lt = std::log(cfg.t_max);
        const double dl = 0.01;
        double prev = std::pow(2.0 * std::numbers::pi * cfg.t_max, -0.5 * pot.dim()) *
                      std::exp(-std::pow(cfg.t_max, beta)) * cfg.t_max;
        for (int i = 1; i < 40000; ++i) {
            double t = std::exp(lt + i * dl);
            double f = std::pow(2.0 * std::numbers::pi * t, -0.5 * pot.dim()) *
                       std::exp(-std::pow(t, beta)) * t;
            tail += 0.5 * (prev + f) * dl;
            prev = f;
            if (f < 1e-300) break;
        }
        g.large_t_tail = tail;
    }
    return g;
}

} // namespace schro::fkmc
