#pragma once

#include "magwell/eigensolve.hpp"
#include "magwell/lattice.hpp"

namespace magwell {

/// Compactly supported trial state concentrated at a point y:
///   u(x) = N chi(|x-y|/r) exp(i psi(x)/h) exp(-b(y)|x-y|^2 / 4h)
/// with r = r0 h^(1/3), chi a C^2 quintic bump (1 on [0,1/2], 0 from 1 on)
/// and psi the second-order gauge corrector built from A(y) and the
/// symmetric part of DA(y), so A - grad(psi) matches the symmetric gauge of
/// the frozen field b(y) to first order.
struct Quasimode {
    Point center = Point::Zero();
    double h = 0.0;
    double radius = 0.0; // cutoff radius
    double mu = 0.0;     // Tr+B at the center; target energy is h*mu
    Grid grid;
    DomainMask mask;
    Eigen::VectorXcd u;  // over active nodes, unit norm
};

/// C^2 polynomial bump: 1 on [0,1/2], 0 on [1,inf)
double bump(double s);

Quasimode build_quasimode(const FieldModel& model, const GaugeField& gauge, const Grid& grid,
                          const DomainMask& mask, const Point& y, double h, double r0 = 0.35);

/// || (H - h mu) u || / ||u|| by sparse matvec
double residual_ratio(const Quasimode& q, const MagneticOperator& op);

struct SpectralHit {
    double distance = 0.0; // min_j | lambda_j - h mu |
    double bound = 0.0;    // the residual ratio
    bool pass = false;     // distance <= bound
};

/// The residual ratio bounds the distance from h*mu to the spectrum; checks
/// it against the enumerated eigenvalues of the Dirichlet domain.
SpectralHit spectral_hit_check(const Quasimode& q, const EigenResult& eig, double residual);

} // namespace magwell
