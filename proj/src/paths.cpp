#include "schro/paths.hpp"

#include <cmath>
#include <stdexcept>

namespace schro {

void Path::write_csv(std::ostream& os) const {
    os << "s";
    for (int j = 1; j <= dim; ++j) os << ",x_" << j;
    os << "\n";
    for (int k = 0; k <= n_steps; ++k) {
        os << time_at(k);
        for (int j = 0; j < dim; ++j) os << "," << nodes[static_cast<std::size_t>(k) * dim + j];
        os << "\n";
    }
}

static void check_path_args(double t, std::size_t dim, int n_steps) {
    if (!(t > 0.0)) throw std::domain_error("path sampling: t must be positive");
    if (dim == 0) throw std::invalid_argument("path sampling: empty start point");
    if (n_steps < 1) throw std::invalid_argument("path sampling: n_steps must be >= 1");
}

Path sample_bm(double t, std::span<const double> x, int n_steps,
               std::uint64_t seed, std::uint64_t path_index) {
    check_path_args(t, x.size(), n_steps);
    const int d = static_cast<int>(x.size());
    rng::CounterRng gen(seed, path_index);

    Path p;
    p.t = t;
    p.dim = d;
    p.n_steps = n_steps;
    p.nodes.resize(static_cast<std::size_t>(n_steps + 1) * d);
    for (int j = 0; j < d; ++j) p.nodes[j] = x[j];

    const double sdt = std::sqrt(t / n_steps);
    for (int k = 1; k <= n_steps; ++k) {
        for (int j = 0; j < d; ++j) {
            double z = gen.normal(static_cast<std::uint64_t>(k - 1) * d + j);
            p.nodes[static_cast<std::size_t>(k) * d + j] =
                p.nodes[static_cast<std::size_t>(k - 1) * d + j] + sdt * z;
        }
    }
    return p;
}

Path sample_bridge(double t, std::span<const double> x, std::span<const double> y,
                   int n_steps, std::uint64_t seed, std::uint64_t path_index) {
    check_path_args(t, x.size(), n_steps);
    if (x.size() != y.size()) throw std::invalid_argument("sample_bridge: dimension mismatch");
    const int d = static_cast<int>(x.size());
    rng::CounterRng gen(seed, path_index);

    Path p;
    p.t = t;
    p.dim = d;
    p.n_steps = n_steps;
    p.nodes.resize(static_cast<std::size_t>(n_steps + 1) * d);
    for (int j = 0; j < d; ++j) p.nodes[j] = x[j];
    for (int j = 0; j < d; ++j) p.nodes[static_cast<std::size_t>(n_steps) * d + j] = y[j];

    // Conditional on the current node z at time s and the endpoint y at time t,
    // the next node is Gaussian with mean z + dt*(y-z)/(t-s) and variance
    // dt*(t-s-dt)/(t-s) per coordinate.
    const double dt = t / n_steps;
    for (int k = 1; k < n_steps; ++k) {
        double remain = t - (k - 1) * dt;        // t - s_{k-1}
        double frac = dt / remain;
        double sd = std::sqrt(dt * (remain - dt) / remain);
        for (int j = 0; j < d; ++j) {
            double prev = p.nodes[static_cast<std::size_t>(k - 1) * d + j];
            double z = gen.normal(static_cast<std::uint64_t>(k - 1) * d + j);
            p.nodes[static_cast<std::size_t>(k) * d + j] = prev + frac * (y[j] - prev) + sd * z;
        }
    }
    return p;
}

} // namespace schro
