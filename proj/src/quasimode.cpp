#include "magwell/quasimode.hpp"

#include <cmath>

namespace magwell {

double bump(double s) {
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    double t = (s - 0.5) / 0.5;
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

Quasimode build_quasimode(const FieldModel& model, const GaugeField& gauge, const Grid& grid,
                          const DomainMask& mask, const Point& y, double h, double r0) {
    double by = model.eval(y.x(), y.y());
    if (!(by > 0)) throw ValidationError("build_quasimode: field must be positive at the center");
    if (!(h > 0)) throw ValidationError("build_quasimode: h must be positive");

    if (grid.boundary == Boundary::Torus)
        throw ValidationError("build_quasimode: torus grids are not supported");

    Quasimode q;
    q.center = y;
    q.h = h;
    q.mu = model.intensity(y);
    q.radius = r0 * std::cbrt(h);
    q.grid = grid;
    q.mask = mask;

    // the cutoff ball must sit inside the active mask (and the grid)
    const int n = grid.nodes_per_dim();
    const double a = grid.spacing();
    double lo = grid.coord(0) - 0.5 * a, hi = grid.coord(n - 1) + 0.5 * a;
    if (y.x() - q.radius < lo || y.x() + q.radius > hi || y.y() - q.radius < lo ||
        y.y() + q.radius > hi)
        throw ValidationError("build_quasimode: cutoff ball leaves the grid");
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) {
            if ((grid.node_point(ix, iy) - y).norm() >= q.radius) continue;
            if (!mask.active[grid.node_id(ix, iy)])
                throw ValidationError("build_quasimode: cutoff ball leaves the mask");
        }

    Point Ay = gauge.potential(y);
    Eigen::Matrix2d J = gauge.potential_jacobian(y, a);
    Eigen::Matrix2d S = 0.5 * (J + J.transpose());

    std::vector<long> rows;
    rows.reserve(mask.count());
    for (long id = 0; id < grid.node_count(); ++id)
        if (mask.active[id]) rows.push_back(id);

    q.u.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Point d = grid.point_of(rows[i]) - y;
        double r = d.norm();
        double chi = bump(r / q.radius);
        if (chi == 0.0) {
            q.u(i) = Complex(0.0, 0.0);
            continue;
        }
        double psi = Ay.dot(d) + 0.5 * d.dot(S * d);
        double gaussian = std::exp(-by * r * r / (4.0 * h));
        q.u(i) = chi * gaussian * std::exp(Complex(0.0, psi / h));
    }
    double nrm = q.u.norm();
    if (nrm == 0.0) throw ValidationError("build_quasimode: cutoff ball contains no grid node");
    q.u /= nrm;
    return q;
}

double residual_ratio(const Quasimode& q, const MagneticOperator& op) {
    if (!q.grid.same_layout(op.grid) || q.u.size() != op.dim())
        throw ValidationError("residual_ratio: quasimode and operator grids differ");
    for (std::size_t i = 0; i < q.mask.active.size(); ++i)
        if (q.mask.active[i] != op.mask.active[i])
            throw ValidationError("residual_ratio: quasimode and operator masks differ");
    Eigen::VectorXcd w = op.matrix * q.u - (op.h * q.mu) * q.u;
    return w.norm() / q.u.norm();
}

SpectralHit spectral_hit_check(const Quasimode& q, const EigenResult& eig, double residual) {
    if (eig.eigenvalues.empty())
        throw WindowEmptyError("spectral_hit_check: no eigenvalues to compare against");
    SpectralHit hit;
    hit.bound = residual;
    double target = q.h * q.mu;
    hit.distance = std::numeric_limits<double>::infinity();
    for (double lam : eig.eigenvalues)
        hit.distance = std::min(hit.distance, std::abs(lam - target));
    hit.pass = hit.distance <= hit.bound;
    return hit;
}

} // namespace magwell
