#pragma once

#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schro/envelopes.hpp"
#include "schro/feynman_kac.hpp"
#include "schro/pde.hpp"
#include "schro/potential.hpp"

namespace schro::verify {

struct SamplePoint {
    double t = 0.0;
    std::vector<double> x, y;
    double value = 0.0;
    double std_error = 0.0;
};

// Envelope shape with one or two argument-constant slots; eval returns the
// envelope at the point for the given slot values.
struct EnvelopeFamily {
    std::string name;
    int n_args = 1;
    std::function<double(const SamplePoint&, std::span<const double>)> eval;
    std::function<std::string(const SamplePoint&)> regime; // optional labeler
};

struct FitConfig {
    double band_ceiling = 25.0;
    int grid_points = 17;          // log-spaced argument-constant candidates
    double grid_min = 0.125, grid_max = 8.0;
    double exclusion_sigma = 10.0; // value < sigma*stderr drops out of the fit
    double containment_sigma = 3.0;
    double max_reject_fraction = 0.2;
};

enum class PointStatus { used, excluded, rejected };

struct FitRow {
    double t = 0.0, x_norm = 0.0, y_norm = 0.0, dist = 0.0;
    double value = 0.0, std_error = 0.0, envelope = 0.0, ratio = 0.0;
    std::string regime;
    PointStatus status = PointStatus::used;
};

struct VerifyReport {
    envelopes::EnvelopeParams fitted; // mult_/arg_ pairs for the two fitted sides
    std::vector<double> fitted_args;  // lower-side slot values, then upper-side
    double ratio_min = 0.0, ratio_max = 0.0;
    double band = std::numeric_limits<double>::infinity();
    bool pass = false, invalid = false;
    std::string invalid_reason;
    int n_points = 0, n_used = 0, n_excluded = 0, n_rejected = 0, n_containment_failed = 0;
    double band_ceiling = 0.0;
    std::string envelope_name;
    std::vector<FitRow> table;

    void write_csv(std::ostream& os) const;
};

// Sandwich fit: the lower and upper bounds get independent argument constants,
// each searched on the log grid. For a candidate pair the multiplicative
// constants are the extreme value/envelope ratios (so both curves enclose every
// used point) and the band is the largest pointwise gap upper/lower over the
// sample; the search keeps the pair with the smallest band. Points with value
// below exclusion_sigma * stderr are reported but only checked for containment;
// nonpositive values are rejected (too many rejects invalidate the fit).
VerifyReport fit_sandwich(std::span<const SamplePoint> points, const EnvelopeFamily& family,
                          const FitConfig& cfg = {});

enum class SlopeModel { stretched_exp };

struct SlopeFit {
    double exponent = 0.0, r2 = 0.0;
    double normalizer = 1.0; // multiplicative constant absorbed before the log-log fit
    double shape = 0.0;      // profile-fitted exponent of the inner power
    bool valid = false;
    std::string reason;
};

// Fit -log(value * normalizer) ~ c * t^beta and report the slope and R^2 of
// log(-log(value * normalizer)) against log t. Invariant under scaling the
// values by a positive constant.
SlopeFit slope_fit(std::span<const std::pair<double, double>> series,
                   SlopeModel model = SlopeModel::stretched_exp);

struct GridPoint {
    double t = 0.0;
    std::vector<double> x, y;
};

struct SampleGrid {
    int dim = 1;
    std::vector<GridPoint> points;
};

enum class Estimator { fkmc, pde };

struct ScanConfig {
    Estimator estimator = Estimator::fkmc;
    fkmc::McConfig mc;
    pde::GridConfig pde;
    double departure_tol = 0.05; // relative drop below the local-branch fit that dates the switch
    double degenerate_threshold = 0.05;
};

struct ScanRow {
    double t = 0.0, x_norm = 0.0, y_norm = 0.0, dist = 0.0;
    double value = 0.0, std_error = 0.0, q = 0.0, log_ratio = 0.0;
    std::string branch;  // active branch of the unit-constant weight
    std::string regime;
};

struct ScanSwitch {
    double x_norm = 0.0, y_norm = 0.0;
    bool found = false, degenerate = false;
    double t_switch = 0.0;
    std::string note;
};

struct ScanReport {
    std::vector<ScanRow> rows;
    std::vector<ScanSwitch> switches; // one per distinct (x, y) series
    void write_csv(std::ostream& os) const;
};

// Evaluate p-hat/q over the grid and label branches and regimes. For each
// repulsive (x,y) series, -log(p/q) tracks c*t/(1+max(|x|,|y|))^alpha until the
// local-to-global crossover; the switch is dated where the series first falls
// departure_tol below the constant fitted on its earliest points.
ScanReport regime_scan(const Potential& pot, const SampleGrid& grid, const ScanConfig& cfg);

} // namespace schro::verify
