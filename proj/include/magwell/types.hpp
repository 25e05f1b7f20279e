#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace magwell {

using Point = Eigen::Vector2d;
using Complex = std::complex<double>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    bool contains(double x) const { return x > lo && x < hi; }
};

/// Bad input data or a violated precondition.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed configuration (maps to exit code 2 in the CLI).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical breakdown: failed factorization, non-convergence, inertia
/// mismatch (maps to exit code 3 in the CLI).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Torus assembly with a total flux that is not an integer multiple of 2*pi*h.
struct QuantizationError : ValidationError {
    using ValidationError::ValidationError;
};

/// A spectral window that contains no eigenvalues where some were required.
struct WindowEmptyError : NumericalError {
    using NumericalError::NumericalError;
};

/// A weight function failed the admissibility margin test.
struct WeightClassError : ValidationError {
    int node = -1;
    double margin = 0.0;
    WeightClassError(const std::string& msg, int node_, double margin_)
        : ValidationError(msg), node(node_), margin(margin_) {}
};

} // namespace magwell
