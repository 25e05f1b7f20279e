#pragma once

#include "magwell/agmon.hpp"
#include "magwell/eigensolve.hpp"

namespace magwell {

/// Distances of the supercell spectrum in [0, h(b0+eps1)] to the Dirichlet
/// well spectrum.
struct ClusterReport {
    double h = 0.0;
    Interval window;
    std::vector<double> supercell;       // in-window supercell eigenvalues
    std::vector<double> dirichlet;       // full enumerated well spectrum
    std::vector<double> distances;       // per in-window eigenvalue
    double delta = 0.0;                  // max distance
    double solver_floor = 0.0;           // 10x the larger max residual
    bool below_solver_floor = false;     // delta not resolvable at this tolerance
};

ClusterReport cluster_check(const EigenResult& supercell, const EigenResult& wells, double h,
                            double eps1, double b0);

struct GapCensus {
    double h = 0.0;
    Interval window;
    double M = 4.0;          // gaps of width >= h^M are counted
    double guard = 0.0;      // 10x max solver residual; narrower gaps are not asserted
    std::vector<double> eigenvalues;       // in-window
    std::vector<Interval> gaps;            // asserted gaps, width > guard
    int count_ge_hM = 0;
};

/// Maximal eigenvalue-free open subintervals between consecutive in-window
/// eigenvalues (the whole window when it is empty). The enumeration is
/// validated against the given inertia count; a mismatch is a hard error.
GapCensus gap_census(const EigenResult& eig, double h, Interval window, double M,
                     int inertia_count_in_window);

struct SpacingReport {
    double h = 0.0;
    double alpha = 0.0, beta = 0.0;
    int count = 0;             // eigenvalues inside [h alpha, h beta]
    double max_spacing = 0.0;
    double edge_lo = 0.0;      // first - h alpha
    double edge_hi = 0.0;      // h beta - last
};

SpacingReport spacing_bound_check(const EigenResult& wells, double h, double alpha, double beta);

struct WeylReport {
    double sup_scaled = 0.0;                  // sup of N(h) h^n
    std::vector<double> scaled;               // per sweep point
    double finest_ratio = 1.0;                // ratio across the two finest h
};

WeylReport weyl_count_check(const std::vector<std::pair<double, int>>& counts, int n = 2);

struct AwayReport {
    double h = 0.0;
    double eta = 0.0;
    double level = 0.0;       // b0 + eps1 + eta
    double b0_region = 0.0;   // min Tr+B over the away mask
    double lambda_min = 0.0;
    double deficit = 0.0;     // (h b0_region - lambda_min) / h^{5/4}
    double window_top = 0.0;  // h (b0 + eps1)
    bool window_clear = false;
};

AwayReport away_region_check(const FieldModel& model, const GaugeField& gauge, const Grid& grid,
                             double h, double eta, double eps1, double b0, double tol = 1e-10,
                             std::uint64_t seed = 0x5EED);

/// Operator norm of e^{Phi/sqrt h} (H - z)^{-1} e^{-Phi/sqrt h} by power
/// iteration on the normal operator, to about 1% relative accuracy.
/// Requires an admissible weight and Re z below h * min(Tr+B over the mask).
double conjugated_resolvent_norm(const MagneticOperator& op, const WeightFunction& w,
                                 const AgmonField& dist, Complex z);

/// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
/// least-squares slope of log y against 1/sqrt(x)
double exp_fit_slope(const std::vector<double>& h, const std::vector<double>& y);

} // namespace magwell
