#include "schro/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "schro/free_kernel.hpp"

namespace schro::verify {

namespace {

const char* status_str(PointStatus s) {
    switch (s) {
        case PointStatus::used: return "used";
        case PointStatus::excluded: return "excluded";
        case PointStatus::rejected: return "rejected";
    }
    return "?";
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        g[static_cast<std::size_t>(k)] = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
    return g;
}

struct LinFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LinFit linreg(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    LinFit f;
    double den = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double e = ys[i] - (f.intercept + f.slope * xs[i]);
        ss_res += e * e;
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

} // namespace

void VerifyReport::write_csv(std::ostream& os) const {
    os << "t,x_norm,y_norm,dist,estimate,stderr,envelope,ratio,regime,status\n";
    for (const auto& r : table)
        os << r.t << "," << r.x_norm << "," << r.y_norm << "," << r.dist << ","
           << r.value << "," << r.std_error << "," << r.envelope << "," << r.ratio << ","
           << r.regime << "," << status_str(r.status) << "\n";
}

VerifyReport fit_sandwich(std::span<const SamplePoint> points, const EnvelopeFamily& family,
                          const FitConfig& cfg) {
    if (points.size() < 10)
        throw std::invalid_argument("fit_sandwich: need at least 10 points");
    if (family.n_args < 1 || family.n_args > 2)
        throw std::invalid_argument("fit_sandwich: envelope must expose 1 or 2 argument slots");
    if (cfg.grid_points < 2 || !(cfg.grid_min > 0.0 && cfg.grid_max > cfg.grid_min))
        throw std::invalid_argument("fit_sandwich: bad constant grid");

    VerifyReport rep;
    rep.band_ceiling = cfg.band_ceiling;
    rep.envelope_name = family.name;
    rep.n_points = static_cast<int>(points.size());

    std::vector<std::size_t> used, excluded;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (!(p.value > 0.0) || !std::isfinite(p.value)) {
            ++rep.n_rejected;
        } else if (p.value < cfg.exclusion_sigma * p.std_error) {
            excluded.push_back(i);
        } else {
            used.push_back(i);
        }
    }
    rep.n_used = static_cast<int>(used.size());
    rep.n_excluded = static_cast<int>(excluded.size());

    double reject_frac = static_cast<double>(rep.n_rejected) / static_cast<double>(points.size());
    if (reject_frac > cfg.max_reject_fraction) {
        rep.invalid = true;
        rep.invalid_reason = "too many nonpositive estimates";
    } else if (used.empty()) {
        rep.invalid = true;
        rep.invalid_reason = "no points usable for the fit";
    }

    std::vector<double> grid = log_grid(cfg.grid_min, cfg.grid_max, cfg.grid_points);

    // Candidate slot tuples, with the envelope evaluated once per candidate.
    // A candidate is viable only if the envelope is positive on every used
    // point; mult_min/mult_max are then the extreme value/envelope ratios, so
    // mult_min * env sits below the data and mult_max * env above it.
    struct Candidate {
        std::vector<double> args;
        std::vector<double> env;
        double mult_min = 0.0, mult_max = 0.0;
    };
    std::vector<Candidate> cands;
    if (!rep.invalid) {
        std::vector<std::vector<double>> tuples;
        if (family.n_args == 1) {
            for (double c : grid) tuples.push_back({c});
        } else {
            for (double c1 : grid)
                for (double c2 : grid) tuples.push_back({c1, c2});
        }
        for (auto& args : tuples) {
            Candidate c;
            c.args = std::move(args);
            c.env.reserve(used.size());
            c.mult_min = std::numeric_limits<double>::infinity();
            bool ok = true;
            for (std::size_t i : used) {
                double env = family.eval(points[i], c.args);
                if (!(env > 0.0) || !std::isfinite(env)) {
                    ok = false;
                    break;
                }
                double r = points[i].value / env;
                c.mult_min = std::min(c.mult_min, r);
                c.mult_max = std::max(c.mult_max, r);
                c.env.push_back(env);
            }
            if (ok) cands.push_back(std::move(c));
        }
        if (cands.empty()) {
            rep.invalid = true;
            rep.invalid_reason = "envelope not positive on the sample";
        }
    }

    // Search lower/upper argument constants independently; the figure of merit
    // is the worst pointwise gap between the two bounding curves.
    const Candidate* best_lo = nullptr;
    const Candidate* best_hi = nullptr;
    double best_band = std::numeric_limits<double>::infinity();
    if (!rep.invalid) {
        for (const auto& lo : cands) {
            for (const auto& hi : cands) {
                double gap = 0.0;
                for (std::size_t k = 0; k < used.size(); ++k)
                    gap = std::max(gap, (hi.mult_max * hi.env[k]) / (lo.mult_min * lo.env[k]));
                if (gap < best_band) {
                    best_band = gap;
                    best_lo = &lo;
                    best_hi = &hi;
                }
            }
        }
    }

    if (!rep.invalid) {
        rep.fitted_args = best_lo->args;
        rep.fitted_args.insert(rep.fitted_args.end(), best_hi->args.begin(), best_hi->args.end());
        rep.band = best_band;
        rep.ratio_min = best_lo->mult_min;
        rep.ratio_max = best_hi->mult_max;
        rep.fitted.mult_lower = best_lo->mult_min;
        rep.fitted.mult_upper = best_hi->mult_max;
        rep.fitted.arg_lower = best_lo->args.front();
        rep.fitted.arg_upper = best_hi->args.front();

        for (std::size_t i : excluded) {
            double env_lo = family.eval(points[i], best_lo->args);
            double env_hi = family.eval(points[i], best_hi->args);
            double slack = cfg.containment_sigma * points[i].std_error;
            if (points[i].value < best_lo->mult_min * env_lo - slack ||
                points[i].value > best_hi->mult_max * env_hi + slack)
                ++rep.n_containment_failed;
        }
        rep.pass = rep.band <= cfg.band_ceiling && rep.n_containment_failed == 0;
    }

    std::vector<double> ones(static_cast<std::size_t>(family.n_args), 1.0);
    std::span<const double> args_lo = best_lo ? std::span<const double>(best_lo->args)
                                              : std::span<const double>(ones);
    std::span<const double> args_hi = best_hi ? std::span<const double>(best_hi->args)
                                              : std::span<const double>(ones);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        FitRow row;
        row.t = p.t;
        row.x_norm = norm(p.x);
        row.y_norm = norm(p.y);
        row.dist = dist(p.x, p.y);
        row.value = p.value;
        row.std_error = p.std_error;
        // table reports the geometric mean of the two fitted envelope shapes
        double e_lo = family.eval(p, args_lo);
        double e_hi = family.eval(p, args_hi);
        row.envelope = e_lo > 0.0 && e_hi > 0.0 ? std::sqrt(e_lo * e_hi) : 0.0;
        row.ratio = row.envelope > 0.0 && p.value > 0.0 ? p.value / row.envelope : 0.0;
        if (family.regime) row.regime = family.regime(p);
        if (!(p.value > 0.0) || !std::isfinite(p.value)) row.status = PointStatus::rejected;
        else if (p.value < cfg.exclusion_sigma * p.std_error) row.status = PointStatus::excluded;
        rep.table.push_back(std::move(row));
    }
    return rep;
}

SlopeFit slope_fit(std::span<const std::pair<double, double>> series, SlopeModel model) {
    if (model != SlopeModel::stretched_exp)
        throw std::invalid_argument("slope_fit: unknown model");
    if (series.size() < 5) throw std::invalid_argument("slope_fit: need at least 5 points");

    std::vector<std::pair<double, double>> pts(series.begin(), series.end());
    std::sort(pts.begin(), pts.end());
    SlopeFit fit;
    for (const auto& [t, v] : pts) {
        if (!(t > 0.0)) throw std::invalid_argument("slope_fit: t must be positive");
        if (!(v > 0.0)) {
            fit.reason = "nonpositive value in series";
            return fit;
        }
    }
    if (pts.back().first < 10.0 * pts.front().first)
        throw std::invalid_argument("slope_fit: ts must span at least one decade");

    std::vector<double> yraw(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) yraw[i] = -std::log(pts[i].second);
    double range = *std::max_element(yraw.begin(), yraw.end()) -
                   *std::min_element(yraw.begin(), yraw.end());
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (yraw[i] <= yraw[i - 1] - 0.05 * std::max(range, 1e-12)) {
            fit.reason = "-log(value) not increasing in t";
            return fit;
        }

    // profile least squares for -log v = a + c * t^beta, c > 0
    auto sse_at = [&](double beta, double* a_out, double* c_out) -> double {
        double su = 0, sy = 0, suu = 0, suy = 0;
        const double n = static_cast<double>(pts.size());
        std::vector<double> u(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            u[i] = std::pow(pts[i].first, beta);
            su += u[i];
            sy += yraw[i];
            suu += u[i] * u[i];
            suy += u[i] * yraw[i];
        }
        double den = n * suu - su * su;
        if (!(std::abs(den) > 0.0)) return std::numeric_limits<double>::infinity();
        double c = (n * suy - su * sy) / den;
        double a = (sy - c * su) / n;
        if (!(c > 0.0)) return std::numeric_limits<double>::infinity();
        double sse = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double e = yraw[i] - (a + c * u[i]);
            sse += e * e;
        }
        if (a_out) *a_out = a;
        if (c_out) *c_out = c;
        return sse;
    };

    double best_beta = 0.0, best_sse = std::numeric_limits<double>::infinity();
    for (double beta : log_grid(0.02, 2.0, 200)) {
        double s = sse_at(beta, nullptr, nullptr);
        if (s < best_sse) {
            best_sse = s;
            best_beta = beta;
        }
    }
    if (!std::isfinite(best_sse)) {
        fit.reason = "no decaying stretched-exponential fit";
        return fit;
    }
    double lo = best_beta / 1.35, hi = best_beta * 1.35;
    for (int it = 0; it < 60; ++it) {
        double m1 = lo + (hi - lo) * 0.382, m2 = lo + (hi - lo) * 0.618;
        if (sse_at(m1, nullptr, nullptr) < sse_at(m2, nullptr, nullptr)) hi = m2;
        else lo = m1;
    }
    best_beta = 0.5 * (lo + hi);
    double a = 0.0, c = 0.0;
    if (!std::isfinite(sse_at(best_beta, &a, &c))) {
        fit.reason = "no decaying stretched-exponential fit";
        return fit;
    }

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double y = yraw[i] - a; // -log(value * e^a)
        if (!(y > 0.0)) {
            fit.reason = "normalized -log values not positive";
            return fit;
        }
        lx.push_back(std::log(pts[i].first));
        ly.push_back(std::log(y));
    }
    LinFit lf = linreg(lx, ly);
    fit.exponent = lf.slope;
    fit.r2 = lf.r2;
    fit.normalizer = std::exp(a);
    fit.shape = best_beta;
    fit.valid = true;
    return fit;
}

void ScanReport::write_csv(std::ostream& os) const {
    os << "t,x_norm,y_norm,dist,estimate,stderr,q,log_ratio,branch,regime\n";
    for (const auto& r : rows)
        os << r.t << "," << r.x_norm << "," << r.y_norm << "," << r.dist << ","
           << r.value << "," << r.std_error << "," << r.q << "," << r.log_ratio << ","
           << r.branch << "," << r.regime << "\n";
}

ScanReport regime_scan(const Potential& pot, const SampleGrid& grid, const ScanConfig& cfg) {
    if (grid.points.empty()) throw std::invalid_argument("regime_scan: empty grid");
    ScanReport rep;

    // group indices by identical (x, y)
    std::map<std::vector<double>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const auto& p = grid.points[i];
        if (static_cast<int>(p.x.size()) != grid.dim || p.x.size() != p.y.size())
            throw std::invalid_argument("regime_scan: point dimension mismatch");
        std::vector<double> key(p.x);
        key.insert(key.end(), p.y.begin(), p.y.end());
        groups[key].push_back(i);
    }

    rep.rows.resize(grid.points.size());
    // PDE estimator reuses one solve per distinct (t, source)
    std::map<std::pair<double, double>, pde::Solution> pde_cache;

    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const auto& p = grid.points[i];
        ScanRow row;
        row.t = p.t;
        row.x_norm = norm(p.x);
        row.y_norm = norm(p.y);
        row.dist = dist(p.x, p.y);
        row.q = gaussian_kernel(p.t, p.x, p.y);
        if (cfg.estimator == Estimator::fkmc) {
            auto est = fkmc::estimate_kernel(pot, p.t, p.x, p.y, cfg.mc);
            row.value = est.value;
            row.std_error = est.std_error;
        } else {
            if (grid.dim == 1) {
                auto key = std::make_pair(p.t, p.x[0]);
                auto it = pde_cache.find(key);
                if (it == pde_cache.end())
                    it = pde_cache.emplace(key, pde::solve_1d(pot, p.t, p.x[0], cfg.pde)).first;
                row.value = it->second.value_at(p.y[0]);
            } else {
                if (row.x_norm != 0.0)
                    throw std::invalid_argument(
                        "regime_scan: pde estimator needs x at the origin for radial solves");
                auto key = std::make_pair(p.t, 0.0);
                auto it = pde_cache.find(key);
                if (it == pde_cache.end())
                    it = pde_cache.emplace(key, pde::solve_radial(pot, p.t, grid.dim, cfg.pde)).first;
                row.value = it->second.value_at(row.y_norm);
            }
        }
        row.log_ratio = row.value > 0.0 ? std::log(row.value / row.q)
                                        : -std::numeric_limits<double>::infinity();
        if (pot.sign() == Sign::positive) {
            double m = std::max(row.x_norm, row.y_norm);
            double local = p.t * std::pow(1.0 + m, -pot.alpha());
            double global = std::pow(p.t, (2.0 - pot.alpha()) / (2.0 + pot.alpha()));
            row.branch = local <= global ? "local" : "global";
        } else {
            double mn1 = 1.0 + std::min(row.x_norm, row.y_norm);
            double local = p.t * std::pow(mn1, -pot.alpha());
            row.branch = local >= p.t - mn1 * mn1 / p.t ? "growth_local" : "growth_spatial";
        }
        if (pot.sign() == Sign::negative || pot.alpha() < 2.0)
            row.regime = envelopes::to_string(
                envelopes::regime(p.t, row.x_norm, row.y_norm, row.dist, pot.alpha(), pot.sign()));
        rep.rows[i] = std::move(row);
    }

    for (auto& [key, idx] : groups) {
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return rep.rows[a].t < rep.rows[b].t; });
        ScanSwitch sw;
        sw.x_norm = rep.rows[idx.front()].x_norm;
        sw.y_norm = rep.rows[idx.front()].y_norm;
        double max_abs = 0.0;
        for (std::size_t k : idx) max_abs = std::max(max_abs, std::abs(rep.rows[k].log_ratio));
        if (max_abs < cfg.degenerate_threshold) {
            sw.degenerate = true;
            sw.note = "log(p/q) flat across the series";
            rep.switches.push_back(sw);
            continue;
        }
        if (pot.sign() == Sign::negative) {
            sw.note = "switch detection covers repulsive potentials only";
            rep.switches.push_back(sw);
            continue;
        }
        // Below the crossover -log(p/q) tracks c*t/(1+m)^alpha with c roughly
        // constant; normalize by that argument, fit c on the earliest points,
        // and date the switch where the series first drops departure_tol below.
        double loc_pow = std::pow(1.0 + std::max(sw.x_norm, sw.y_norm), pot.alpha());
        std::vector<double> ts, zs;
        for (std::size_t k : idx) {
            double y = -rep.rows[k].log_ratio;
            if (y > 1e-6 && std::isfinite(y)) {
                ts.push_back(rep.rows[k].t);
                zs.push_back(y * loc_pow / rep.rows[k].t);
            }
        }
        if (ts.size() < 4) {
            sw.note = "too few usable points";
            rep.switches.push_back(sw);
            continue;
        }
        std::size_t n_fit = std::max<std::size_t>(2, ts.size() / 4);
        double log_c = 0.0;
        for (std::size_t k = 0; k < n_fit; ++k) log_c += std::log(zs[k]);
        double c_loc = std::exp(log_c / static_cast<double>(n_fit));
        // Deep in the global regime the normalized series already decays like
        // t^(-2a/(2+a)); a steep opening slope means the crossover predates the grid.
        double first_slope = (std::log(zs[1]) - std::log(zs[0])) /
                             (std::log(ts[1]) - std::log(ts[0]));
        if (first_slope <= -0.25) {
            sw.note = "series entirely past the crossover";
            rep.switches.push_back(sw);
            continue;
        }
        double thr = (1.0 - cfg.departure_tol) * c_loc;
        for (std::size_t k = 1; k < ts.size(); ++k) {
            if (zs[k] < thr && zs[k - 1] >= thr) {
                double w = (zs[k - 1] - thr) / (zs[k - 1] - zs[k]);
                sw.t_switch = std::exp(std::log(ts[k - 1]) +
                                       w * (std::log(ts[k]) - std::log(ts[k - 1])));
                sw.found = true;
                break;
            }
        }
        if (!sw.found) sw.note = "series entirely before the crossover";
        rep.switches.push_back(sw);
    }
    return rep;
}

} // namespace schro::verify
