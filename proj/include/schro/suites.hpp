#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schro/verify.hpp"

namespace schro::suites {

// Envelope families shared by the verification suites and the acceptance gate.
// weight_pos: q * two-branch repulsive weight, one argument slot.
// weight_neg: q * growth weight, slots (growth_c, spatial_c).
// green: power-law times exponential range factor, one slot.
verify::EnvelopeFamily family_weight_pos(double alpha);
verify::EnvelopeFamily family_weight_neg(double alpha);
verify::EnvelopeFamily family_green(double alpha, int dim);

struct SuiteParams {
    double alpha = 1.0;
    int dim = 2;
    double K = 1.0;
    std::uint64_t seed = 1;
    int threads = 1;
    double scale = 1.0; // path-budget multiplier in (0, 1]
    verify::FitConfig fit;
};

struct SuiteResult {
    std::string suite;
    bool pass = false;
    verify::VerifyReport report;
    std::vector<verify::SamplePoint> samples; // raw estimates behind the fit
    std::vector<std::string> notes;
};

// thm1.1: repulsive sandwich over a (t, x, y) grid, d >= 2, alpha in (0, 2).
// thm1.2: attractive on-diagonal growth sandwich, t <= 20.
// green: Green-function sandwich, d in {2, 3} (d=2 sweeps two decades of
// separation at fixed base point).
const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, const SuiteParams& p);

} // namespace schro::suites
