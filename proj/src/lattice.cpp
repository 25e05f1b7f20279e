#include "magwell/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <vector>

#include "magwell/quadrature.hpp"

namespace magwell {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void verify_hermitian(const SparseHermitian& H) {
    SparseHermitian D = SparseHermitian(H.adjoint()) - H;
    for (int k = 0; k < D.outerSize(); ++k)
        for (SparseHermitian::InnerIterator it(D, k); it; ++it)
            if (it.value() != Complex(0.0, 0.0))
                throw NumericalError("assembled matrix is not exactly Hermitian");
}
} // namespace

double MagneticOperator::norm1() const {
    double best = 0.0;
    for (int k = 0; k < matrix.outerSize(); ++k) {
        double col = 0.0;
        for (SparseHermitian::InnerIterator it(matrix, k); it; ++it) col += std::abs(it.value());
        best = std::max(best, col);
    }
    return best;
}

DomainMask mask_wells(const Grid& grid, const FieldModel& model, double b0, double eps2) {
    DomainMask m;
    m.kind = MaskKind::Wells;
    m.threshold = eps2;
    m.active.assign(grid.node_count(), 0);
    int n = grid.nodes_per_dim();
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            m.active[grid.node_id(ix, iy)] = model.intensity(grid.node_point(ix, iy)) < b0 + eps2;
    return m;
}

DomainMask mask_away(const Grid& grid, const FieldModel& model, double b0, double eps1,
                     double eta) {
    DomainMask m;
    m.kind = MaskKind::Away;
    m.threshold = b0 + eps1 + eta;
    m.active.assign(grid.node_count(), 0);
    int n = grid.nodes_per_dim();
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            m.active[grid.node_id(ix, iy)] = model.intensity(grid.node_point(ix, iy)) >= m.threshold;
    return m;
}

MagneticOperator assemble(const FieldModel& model, const GaugeField& gauge, const Grid& grid,
                          const DomainMask& mask, double h) {
    if (!(h > 0)) throw ValidationError("assemble: h must be positive");
    if (static_cast<long>(mask.active.size()) != grid.node_count())
        throw ValidationError("assemble: mask does not match the grid");
    if (mask.count() == 0) throw ValidationError("assemble: empty mask");

    if (grid.boundary == Boundary::Torus) {
        double flux = total_flux(model, grid);
        double quanta = flux / (kTwoPi * h);
        if (std::abs(quanta - std::round(quanta)) > 1e-8)
            throw QuantizationError("assemble: torus flux " + std::to_string(flux) +
                                    " is not quantized at h=" + std::to_string(h) + " (" +
                                    std::to_string(quanta) + " quanta)");
    }

    MagneticOperator op;
    op.h = h;
    op.grid = grid;
    op.mask = mask;
    op.gauge = gauge.kind;
    op.quad_order = gauge.quad_order;

    const int n = grid.nodes_per_dim();
    const double a = grid.spacing();
    const double t = (h / a) * (h / a);

    std::vector<long> row_of(grid.node_count(), -1);
    for (long id = 0; id < grid.node_count(); ++id)
        if (mask.active[id]) {
            row_of[id] = static_cast<long>(op.active_nodes.size());
            op.active_nodes.push_back(id);
        }

    op.node_field.resize(op.active_nodes.size());
    double bmax = 0.0;
    op.field_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < op.active_nodes.size(); ++i) {
        double b = model.intensity(grid.point_of(op.active_nodes[i]));
        op.node_field[i] = b;
        op.field_min = std::min(op.field_min, b);
        bmax = std::max(bmax, b);
    }
    if (bmax > 0) {
        double nodes_per_ml = std::sqrt(h / bmax) / a;
        if (nodes_per_ml < 12.0) {
            op.resolution_warning = true;
            std::cerr << "magwell: warning: " << nodes_per_ml
                      << " nodes per magnetic length at h=" << h << " (want >= 12)\n";
        }
    }

    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(op.active_nodes.size() * 5);

    const long N = static_cast<long>(op.active_nodes.size());
    for (long r = 0; r < N; ++r) {
        long id = op.active_nodes[r];
        int ix = static_cast<int>(id / n), iy = static_cast<int>(id % n);
        Point p = grid.node_point(ix, iy);
        int in_domain = 0;
        // +x and +y edges only; the conjugate entry is inserted with them
        const int dx[4] = {1, 0, -1, 0};
        const int dy[4] = {0, 1, 0, -1};
        for (int dir = 0; dir < 4; ++dir) {
            int jx = ix + dx[dir], jy = iy + dy[dir];
            bool wrap = false;
            if (grid.boundary == Boundary::Torus) {
                wrap = jx < 0 || jx >= n || jy < 0 || jy >= n;
                jx = (jx + n) % n;
                jy = (jy + n) % n;
            }
            bool inside = grid.boundary == Boundary::Torus ||
                          (jx >= 0 && jx < n && jy >= 0 && jy < n);
            // Dirichlet neighbors (outside the grid or masked off) still
            // contribute to the diagonal: u = 0 there.
            ++in_domain;
            if (dir >= 2) continue; // store each edge once, from its low end
            if (!inside) continue;
            long nb = grid.node_id(jx, jy);
            long c = row_of[nb];
            if (c < 0) continue;
            Point q = wrap ? Point(p.x() + dx[dir] * a, p.y() + dy[dir] * a) : grid.node_point(jx, jy);
            double theta = -(1.0 / h) * gauge.line_integral(p, q);
            Complex v = -t * std::exp(Complex(0.0, theta));
            trip.emplace_back(r, c, v);
            trip.emplace_back(c, r, std::conj(v));
        }
        trip.emplace_back(r, r, Complex(t * in_domain, 0.0));
    }

    op.matrix.resize(N, N);
    op.matrix.setFromTriplets(trip.begin(), trip.end());
    op.matrix.makeCompressed();
    verify_hermitian(op.matrix);
    return op;
}

MagneticOperator restrict_operator(const MagneticOperator& op, const DomainMask& submask) {
    if (!submask.is_subset_of(op.mask))
        throw ValidationError("restrict_operator: submask is not contained in the operator mask");

    MagneticOperator out;
    out.h = op.h;
    out.grid = op.grid;
    out.mask = submask;
    out.gauge = op.gauge;
    out.quad_order = op.quad_order;

    std::vector<long> new_row(op.dim(), -1);
    out.field_min = std::numeric_limits<double>::infinity();
    for (long r = 0; r < op.dim(); ++r) {
        long id = op.active_nodes[r];
        if (!submask.active[id]) continue;
        new_row[r] = static_cast<long>(out.active_nodes.size());
        out.active_nodes.push_back(id);
        out.node_field.push_back(op.node_field[r]);
        out.field_min = std::min(out.field_min, op.node_field[r]);
    }
    if (out.active_nodes.empty()) throw ValidationError("restrict_operator: empty submask");

    std::vector<Eigen::Triplet<Complex>> trip;
    for (int k = 0; k < op.matrix.outerSize(); ++k)
        for (SparseHermitian::InnerIterator it(op.matrix, k); it; ++it) {
            long r = new_row[it.row()], c = new_row[it.col()];
            if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
        }
    out.matrix.resize(out.active_nodes.size(), out.active_nodes.size());
    out.matrix.setFromTriplets(trip.begin(), trip.end());
    out.matrix.makeCompressed();
    return out;
}

MagneticOperator gauge_transform(const MagneticOperator& op, const std::vector<double>& chi) {
    if (static_cast<long>(chi.size()) != op.dim())
        throw ValidationError("gauge_transform: phase vector size mismatch");
    MagneticOperator out = op;
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(op.matrix.nonZeros());
    for (int k = 0; k < op.matrix.outerSize(); ++k)
        for (SparseHermitian::InnerIterator it(op.matrix, k); it; ++it) {
            double phase = (chi[it.row()] - chi[it.col()]) / op.h;
            trip.emplace_back(it.row(), it.col(), it.value() * std::exp(Complex(0.0, phase)));
        }
    out.matrix.setZero();
    out.matrix.setFromTriplets(trip.begin(), trip.end());
    out.matrix.makeCompressed();
    return out;
}

double max_plaquette_defect(const MagneticOperator& op, const FieldModel& model) {
    const Grid& grid = op.grid;
    const int n = grid.nodes_per_dim();
    const double a = grid.spacing();
    const double t = (op.h / a) * (op.h / a);

    std::vector<long> row_of(grid.node_count(), -1);
    for (long r = 0; r < op.dim(); ++r) row_of[op.active_nodes[r]] = r;

    auto edge_phase = [&](long from, long to) {
        Complex v = op.matrix.coeff(row_of[from], row_of[to]);
        return std::arg(-v / t);
    };

    const GaussRule& rule = gauss_rule(8);
    double worst = 0.0;
    for (int ix = 0; ix + 1 < n; ++ix)
        for (int iy = 0; iy + 1 < n; ++iy) {
            long n00 = grid.node_id(ix, iy), n10 = grid.node_id(ix + 1, iy);
            long n11 = grid.node_id(ix + 1, iy + 1), n01 = grid.node_id(ix, iy + 1);
            if (row_of[n00] < 0 || row_of[n10] < 0 || row_of[n11] < 0 || row_of[n01] < 0) continue;
            double loop = edge_phase(n00, n10) + edge_phase(n10, n11) + edge_phase(n11, n01) +
                          edge_phase(n01, n00);
            Point p = grid.node_point(ix, iy);
            double flux = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                for (std::size_t j = 0; j < rule.nodes.size(); ++j)
                    flux += rule.weights[i] * rule.weights[j] *
                            model.eval(p.x() + a * rule.nodes[i], p.y() + a * rule.nodes[j]);
            flux *= a * a;
            double defect = std::remainder(loop + flux / op.h, kTwoPi);
            worst = std::max(worst, std::abs(defect));
        }
    return worst;
}

void write_coo(const std::string& path, const MagneticOperator& op) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out.precision(17);
    for (int k = 0; k < op.matrix.outerSize(); ++k)
        for (SparseHermitian::InnerIterator it(op.matrix, k); it; ++it)
            out << it.row() << " " << it.col() << " " << it.value().real() << " "
                << it.value().imag() << "\n";
}

} // namespace magwell
