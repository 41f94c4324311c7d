#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "schro/rng.hpp"

namespace schro {

// Discrete path on the uniform grid s_k = k*t/n_steps, k = 0..n_steps.
// nodes is row-major: nodes[k*dim + j] is coordinate j at time s_k.
struct Path {
    double t = 0.0;
    int dim = 0;
    int n_steps = 0;
    std::vector<double> nodes;

    double time_at(int k) const { return t * k / n_steps; }
    std::span<const double> at(int k) const {
        return {nodes.data() + static_cast<std::size_t>(k) * dim, static_cast<std::size_t>(dim)};
    }
    // columns: s, x_1..x_d
    void write_csv(std::ostream& os) const;
};

// Brownian motion started at x. Draw k*dim+j of stream (seed, path_index)
// feeds step k, coordinate j; results do not depend on how paths are
// distributed over workers.
Path sample_bm(double t, std::span<const double> x, int n_steps,
               std::uint64_t seed, std::uint64_t path_index);

// Brownian bridge from x at time 0 to y at time t, sampled by the exact
// conditional Gaussian recursion; both endpoints are stored bit-exactly.
Path sample_bridge(double t, std::span<const double> x, std::span<const double> y,
                   int n_steps, std::uint64_t seed, std::uint64_t path_index);

} // namespace schro
