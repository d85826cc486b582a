#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fpt/boundary.hpp"
#include "fpt/clock.hpp"
#include "fpt/pipeline.hpp"
#include "fpt/propagator.hpp"
#include "json.hpp"

namespace fpt::cli {

struct ClockSection {
    std::string kind = "constant";  // constant | exponential | power | tabulated | ou
    double sigma = 1.0;             // constant
    double lambda = 1.0;            // exponential
    double scale = 1.0;             // power
    double exponent = 1.0;          // power
    std::vector<double> u;          // tabulated knots
    std::vector<double> h;          // tabulated values
};

struct BoundarySection {
    std::string kind = "constant";  // constant | polynomial | linear_in_variance | ou_level
    double level = 1.0;             // constant barrier, or the ou level
    std::vector<double> coeffs;     // polynomial in time, ascending degree
    double a = 1.0;                 // linear_in_variance start
    double c = 0.0;                 // linear_in_variance slope per unit variance
};

struct GridSection {
    double s_min = 0.05;
    double s_max = 1.0;
    int n = 20;
    std::string spacing = "uniform";  // uniform | log
};

struct McSection {
    std::size_t paths = 100000;
    std::size_t steps = 1000;
    std::uint64_t seed = 1;
};

struct PropagatorSection {
    double delta_frac = 1e-4;
    bool richardson = true;
    double b_max_sigmas = 12.0;
};

struct OutputSection {
    std::string path;            // empty = stdout
    std::string format = "csv";  // csv | json
};

struct RunConfig {
    ClockSection clock;
    BoundarySection boundary;
    GridSection grid;
    McSection mc;
    PropagatorSection propagator;
    OutputSection output;
};

// Sectioned key=value text; lines starting with '#' or ';' are comments.
// Unknown sections, unknown keys, malformed values, or out-of-range settings
// throw ConfigError.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

struct Scenario {
    VolatilityClock clock;
    MovingBoundary boundary;
};

Scenario build_scenario(const RunConfig& cfg);
std::vector<double> build_grid(const GridSection& grid);
PropagatorConfig build_propagator(const PropagatorSection& p);

// Full parsed state (defaults included) as ordered JSON; never contains the
// thread count, so outputs are byte-identical across parallelism levels.
nlohmann::ordered_json config_echo(const RunConfig& cfg);

std::string format_double(double v);  // 17 significant digits
// "tag1;tag2": the part of each warning before the first ':', deduplicated
std::string short_tags(const WarningLog& warnings);

std::string curve_csv(const DensityCurve& curve, const RunConfig& cfg);
std::string curve_json(const DensityCurve& curve, const RunConfig& cfg);

struct ValidateReport {
    nlohmann::ordered_json json;
    bool pass = false;
};

// Analytic route vs simulation: K-S distance between the analytic CDF and the
// empirical first-passage law on the configured grid, plus the bridge
// expectation at s_max against its sampling estimate.  pass is strict
// agreement (K-S under 3 * 0.886 / sqrt(n) and expectation within 3 stderr),
// or a documented gap: an expectation discrepancy beyond 5 stderr that the
// report quantifies (sigma_distance, gap_absolute, gap_relative) -- the
// behavior of the shifted-image route under a nonzero potential.
ValidateReport run_mc_validate(const RunConfig& cfg, int threads);

// Finite-difference residual suite: conditioned-transition backward/forward
// equations, absorbed-kernel heat equations, and second-order decay of every
// residual under step refinement.  Prints one line per check.
bool run_selftest(std::ostream& out);

}  // namespace fpt::cli
