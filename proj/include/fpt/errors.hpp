#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fpt {

// Numerical failure (quadrature, ODE/PDE solves, refinement stalls).
class NumericsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Adaptive quadrature could not reach the requested tolerance.  Carries the
// worst remaining bracket so the caller can see where the integrand resists.
class QuadratureError : public NumericsError {
public:
    QuadratureError(const std::string& what, double lo, double hi,
                    double estimate, double error_bound)
        : NumericsError(what + " [worst bracket " + std::to_string(lo) + ", " +
                        std::to_string(hi) + "; estimate " + std::to_string(estimate) +
                        ", error bound " + std::to_string(error_bound) + "]"),
          lo_(lo), hi_(hi), estimate_(estimate), error_bound_(error_bound) {}

    double bracket_lo() const { return lo_; }
    double bracket_hi() const { return hi_; }
    double estimate() const { return estimate_; }
    double error_bound() const { return error_bound_; }

private:
    double lo_, hi_, estimate_, error_bound_;
};

// A limit/refinement procedure failed to settle.  Carries the iterates.
class ConvergenceError : public NumericsError {
public:
    ConvergenceError(const std::string& what, std::vector<double> iterates)
        : NumericsError(what), iterates_(std::move(iterates)) {}

    const std::vector<double>& iterates() const { return iterates_; }

private:
    std::vector<double> iterates_;
};

// Bad run configuration (unknown key, missing section, unparsable value).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-fatal diagnostics accumulated during a computation.
using WarningLog = std::vector<std::string>;

inline void warn(WarningLog* log, const std::string& tag) {
    if (!log) return;
    for (const auto& existing : *log)
        if (existing == tag) return;
    log->push_back(tag);
}

}  // namespace fpt
