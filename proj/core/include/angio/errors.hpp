#pragma once

#include <stdexcept>
#include <string>

namespace angio {

/// Malformed or invalid run configuration. The message names the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point or cell position outside the closed disk, or mismatched grids.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linear solver failed to reach the requested residual.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

/// Snapshot or summary file could not be written or read.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace angio
