#include "magwell/agmon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

namespace magwell {

namespace {

struct Move {
    int dx, dy;
    // nodes that must be active for the edge to exist (corner cutting guard)
    int px1, py1, px2, py2;
    bool has_guard;
};

std::vector<Move> moves_for(Stencil s) {
    std::vector<Move> m;
    for (int dx : {1, -1}) m.push_back({dx, 0, 0, 0, 0, 0, false});
    for (int dy : {1, -1}) m.push_back({0, dy, 0, 0, 0, 0, false});
    // diagonals pass one of the two adjacent axis nodes
    for (int dx : {1, -1})
        for (int dy : {1, -1}) m.push_back({dx, dy, dx, 0, 0, dy, true});
    if (s == Stencil::Sixteen) {
        // knight moves pass through both nodes of the crossed 2x1 block
        const int knight[8][2] = {{2, 1},  {1, 2},  {-2, 1},  {-1, 2},
                                  {2, -1}, {1, -2}, {-2, -1}, {-1, -2}};
        for (auto& k : knight) {
            int dx = k[0], dy = k[1];
            Move mv{dx, dy, 0, 0, 0, 0, true};
            if (std::abs(dx) == 2) {
                mv.px1 = dx / 2; mv.py1 = 0;
                mv.px2 = dx / 2; mv.py2 = dy;
            } else {
                mv.px1 = 0;  mv.py1 = dy / 2;
                mv.px2 = dx; mv.py2 = dy / 2;
            }
            m.push_back(mv);
        }
    }
    return m;
}

} // namespace

AgmonField agmon_distance(const FieldModel& model, const Grid& grid, const DomainMask& mask,
                          const std::vector<long>& source_nodes, double b0W, Stencil stencil) {
    if (source_nodes.empty()) throw ValidationError("agmon_distance: empty source set");
    if (grid.boundary == Boundary::Torus)
        throw ValidationError("agmon_distance: torus grids are not supported");
    AgmonField f;
    f.base_level = b0W;
    f.stencil = stencil;
    f.grid = grid;
    f.mask = mask;
    f.sources = source_nodes;

    const int n = grid.nodes_per_dim();
    std::vector<long> row_of(grid.node_count(), -1);
    for (long id = 0; id < grid.node_count(); ++id)
        if (mask.active[id]) {
            row_of[id] = static_cast<long>(f.active_nodes.size());
            f.active_nodes.push_back(id);
        }
    const long N = static_cast<long>(f.active_nodes.size());
    f.excess.resize(N);
    for (long i = 0; i < N; ++i)
        f.excess[i] = model.intensity(grid.point_of(f.active_nodes[i])) - b0W;

    f.distance.assign(N, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, long>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (long id : source_nodes) {
        if (id < 0 || id >= grid.node_count() || row_of[id] < 0)
            throw ValidationError("agmon_distance: source node outside the mask");
        f.distance[row_of[id]] = 0.0;
        pq.emplace(0.0, row_of[id]);
    }

    const auto moves = moves_for(stencil);
    const double a = grid.spacing();
    auto active_at = [&](int ix, int iy) {
        if (ix < 0 || ix >= n || iy < 0 || iy >= n) return false;
        return mask.active[grid.node_id(ix, iy)] != 0;
    };
    auto clamp0 = [](double x) { return x > 0.0 ? x : 0.0; };

    while (!pq.empty()) {
        auto [d, r] = pq.top();
        pq.pop();
        if (d > f.distance[r]) continue;
        long id = f.active_nodes[r];
        int ix = static_cast<int>(id / n), iy = static_cast<int>(id % n);
        for (const Move& mv : moves) {
            int jx = ix + mv.dx, jy = iy + mv.dy;
            if (!active_at(jx, jy)) continue;
            if (mv.has_guard) {
                bool g1 = active_at(ix + mv.px1, iy + mv.py1);
                bool g2 = active_at(ix + mv.px2, iy + mv.py2);
                bool diagonal = std::abs(mv.dx) == 1 && std::abs(mv.dy) == 1;
                if (diagonal ? !(g1 || g2) : !(g1 && g2)) continue;
            }
            long rr = row_of[grid.node_id(jx, jy)];
            double len = a * std::hypot(mv.dx, mv.dy);
            double w = len * std::sqrt(clamp0(0.5 * (f.excess[r] + f.excess[rr])));
            double nd = d + w;
            if (nd < f.distance[rr]) {
                f.distance[rr] = nd;
                pq.emplace(nd, rr);
            }
        }
    }
    return f;
}

WeightFunction make_weight(const AgmonField& dist, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("make_weight: need 0 < eps <= 1");
    WeightFunction w;
    w.eps = eps;
    const long N = static_cast<long>(dist.active_nodes.size());
    w.phi.resize(N);
    for (long i = 0; i < N; ++i) {
        double d = dist.distance[i];
        w.phi[i] = std::isfinite(d) ? (1.0 - eps) * d : 0.0;
    }

    const Grid& grid = dist.grid;
    const int n = grid.nodes_per_dim();
    const double a = grid.spacing();
    std::vector<long> row_of(grid.node_count(), -1);
    for (long i = 0; i < N; ++i) row_of[dist.active_nodes[i]] = i;

    w.grad_sq.resize(N);
    w.margin.resize(N);
    w.ess_inf = std::numeric_limits<double>::infinity();
    for (long i = 0; i < N; ++i) {
        long id = dist.active_nodes[i];
        int ix = static_cast<int>(id / n), iy = static_cast<int>(id % n);
        auto phi_at = [&](int jx, int jy, bool& ok) -> double {
            ok = jx >= 0 && jx < n && jy >= 0 && jy < n && row_of[grid.node_id(jx, jy)] >= 0;
            return ok ? w.phi[row_of[grid.node_id(jx, jy)]] : 0.0;
        };
        double g2 = 0.0;
        for (int axis = 0; axis < 2; ++axis) {
            int dx = axis == 0 ? 1 : 0, dy = axis == 0 ? 0 : 1;
            bool okm, okp;
            double pm = phi_at(ix - dx, iy - dy, okm);
            double pp = phi_at(ix + dx, iy + dy, okp);
            double up = 0.0;
            if (okm) up = std::max(up, (w.phi[i] - pm) / a);
            if (okp) up = std::max(up, (w.phi[i] - pp) / a);
            g2 += up * up;
        }
        w.grad_sq[i] = g2;
        w.margin[i] = dist.excess[i] - g2;
        if (w.margin[i] < w.ess_inf) {
            w.ess_inf = w.margin[i];
            w.worst_node = id;
        }
    }
    w.member = w.ess_inf > 0.0;
    return w;
}

void require_weight_class(const WeightFunction& w, const AgmonField& dist) {
    if (w.member) return;
    std::ostringstream msg;
    Point p = dist.grid.point_of(w.worst_node);
    msg << "weight not admissible: margin " << w.ess_inf << " <= 0 at node " << w.worst_node
        << " = (" << p.x() << ", " << p.y() << ")";
    throw WeightClassError(msg.str(), static_cast<int>(w.worst_node), w.ess_inf);
}

double energy_identity_residual(const MagneticOperator& op, const WeightFunction& w, Complex z,
                                const Eigen::VectorXcd& u) {
    const long N = op.dim();
    if (u.size() != N || static_cast<long>(w.phi.size()) != N)
        throw ValidationError("energy_identity_residual: size mismatch");
    if (u.norm() == 0.0) throw ValidationError("energy_identity_residual: u must be nonzero");

    const double sqrt_h = std::sqrt(op.h);
    Eigen::VectorXd e1(N), e2(N);
    for (long i = 0; i < N; ++i) {
        e1(i) = std::exp(w.phi[i] / sqrt_h);
        e2(i) = e1(i) * e1(i);
    }
    Eigen::VectorXcd weighted = e1.cast<Complex>().cwiseProduct(u);
    double wn2 = weighted.squaredNorm();

    Eigen::VectorXcd Hu = op.matrix * u;
    Complex lhs_c = u.adjoint() * (e2.cast<Complex>().cwiseProduct(Hu - z * u));
    double lhs = lhs_c.real();

    double form = (weighted.adjoint() * (op.matrix * weighted)).value().real();

    double grad_term = 0.0;
    for (long i = 0; i < N; ++i) grad_term += w.grad_sq[i] * std::norm(weighted(i));
    grad_term *= op.h;

    double z_term = z.real() * wn2;

    return std::abs(lhs - form + grad_term + z_term) / wn2;
}

double decay_profile(const EigenResult& eig, const AgmonField& dist, double h, double eps) {
    if (eig.eigenvalues.empty()) throw ValidationError("decay_profile: empty eigendata");
    if (eig.vectors.rows() != static_cast<long>(dist.active_nodes.size()))
        throw ValidationError("decay_profile: mismatched domains");
    Eigen::VectorXcd v = eig.vectors.col(0);
    double vmax = v.cwiseAbs().maxCoeff();
    if (vmax <= 0) throw ValidationError("decay_profile: zero eigenvector");
    double sup = -std::numeric_limits<double>::infinity();
    double srh = std::sqrt(h);
    for (long i = 0; i < v.size(); ++i) {
        double av = std::abs(v(i));
        if (av <= 0) continue;
        double d = dist.distance[i];
        if (!std::isfinite(d)) continue;
        sup = std::max(sup, std::log(av) + (1.0 - eps) * d / srh);
    }
    return sup - std::log(vmax);
}

void write_field_csv(const std::string& path, const Grid& grid, const DomainMask& mask,
                     const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out.precision(17);
    const int n = grid.nodes_per_dim();
    std::vector<long> row_of(grid.node_count(), -1);
    long r = 0;
    for (long id = 0; id < grid.node_count(); ++id)
        if (mask.active[id]) row_of[id] = r++;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            long rr = row_of[grid.node_id(ix, iy)];
            if (ix) out << ",";
            if (rr >= 0)
                out << values[rr];
            else
                out << "nan";
        }
        out << "\n";
    }
}

void write_field_pgm(const std::string& path, const Grid& grid, const DomainMask& mask,
                     const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    const int n = grid.nodes_per_dim();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : values)
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    double span = hi > lo ? hi - lo : 1.0;
    std::vector<long> row_of(grid.node_count(), -1);
    long r = 0;
    for (long id = 0; id < grid.node_count(); ++id)
        if (mask.active[id]) row_of[id] = r++;
    out << "P2\n" << n << " " << n << "\n255\n";
    for (int iy = n - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < n; ++ix) {
            long rr = row_of[grid.node_id(ix, iy)];
            int g = 0;
            if (rr >= 0 && std::isfinite(values[rr]))
                g = static_cast<int>(std::lround(255.0 * (values[rr] - lo) / span));
            out << g << (ix + 1 < n ? " " : "");
        }
        out << "\n";
    }
}

} // namespace magwell
