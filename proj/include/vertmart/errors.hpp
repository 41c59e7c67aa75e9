#pragma once

#include <stdexcept>
#include <string>

namespace vertmart {

/// Metric failed to be symmetric positive definite where it was needed.
struct DegenerateMetricError : std::runtime_error {
    explicit DegenerateMetricError(const std::string& what) : std::runtime_error(what) {}
};

/// A point (or a finite-difference stencil around it) left the chart domain.
struct ChartBoundaryError : std::runtime_error {
    explicit ChartBoundaryError(const std::string& what) : std::runtime_error(what) {}
};

/// An operation was called with inputs violating its stated preconditions.
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// Too few usable paths survived to the horizon for a statistical verdict.
struct InsufficientSampleError : std::runtime_error {
    explicit InsufficientSampleError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad experiment configuration (unknown names, malformed file, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace vertmart
