#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "magwell/lattice.hpp"

namespace magwell {

struct LanczosOptions {
    double tol = 1e-10;          // residual tolerance, relative to ||H||_1
    std::uint64_t seed = 0x5EED; // starting-vector seed
    int max_restarts = 80;
    int basis_budget = 0;        // 0 = choose automatically
    std::optional<double> shift; // shift-invert pole; default 0.5*h*min(Tr+B)
};

struct EigenResult {
    std::vector<double> eigenvalues; // ascending
    Eigen::MatrixXcd vectors;        // unit-norm columns, vectors.col(i) <-> eigenvalues[i]
    std::vector<double> residuals;   // ||H v - lambda v||
    struct Meta {
        int iterations = 0;
        int restarts = 0;
        double shift = 0.0;
        double tol = 0.0;      // absolute residual bound used
        long dim = 0;
        std::uint64_t seed = 0;
    } meta;
    double max_residual() const;
};

/// Lowest `count` eigenpairs by shift-invert Lanczos with full
/// reorthogonalization, deflating converged pairs between restarts.
/// Completeness of the returned set is certified against the inertia of a
/// shifted factorization, so clustered and multiple eigenvalues are all
/// enumerated.
EigenResult lowest_eigenpairs(const SparseHermitian& H, int count,
                              const LanczosOptions& opts);
EigenResult lowest_eigenpairs(const MagneticOperator& op, int count, double tol = 1e-10,
                              std::optional<double> shift = {},
                              std::uint64_t seed = 0x5EED);

/// Exact count of eigenvalues strictly below `threshold` via the inertia of
/// the LDL^* factorization of H - threshold*I (Sylvester's law). Throws
/// NumericalError when the threshold sits within 1e-12 of an eigenvalue.
int eigen_count_below(const SparseHermitian& H, double threshold);
int eigen_count_below(const MagneticOperator& op, double threshold);

/// All eigenpairs below `hi`, count certified by inertia. Returns an empty
/// result when the window holds no spectrum.
EigenResult enumerate_below(const MagneticOperator& op, double hi, double tol = 1e-10,
                            std::optional<double> shift = {}, std::uint64_t seed = 0x5EED);

/// Dense full diagonalization (property-test oracle), dim guarded.
std::vector<double> dense_eigenvalues(const SparseHermitian& H);

} // namespace magwell
