#include "magwell/field.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "magwell/quadrature.hpp"

namespace magwell {

namespace {
constexpr double kPi = std::numbers::pi;

double wrap_unit(double x) {
    // fold into [-1/2, 1/2)
    double y = x - std::floor(x + 0.5);
    if (y >= 0.5) y -= 1.0;
    return y;
}
} // namespace

const GaussRule& gauss_rule(int order) {
    static std::map<int, GaussRule> cache;
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    if (order < 1 || order > 64) throw ValidationError("gauss_rule: order out of range");
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    // roots of P_n on (-1,1) by Newton from Chebyshev initial guesses
    for (int i = 0; i < order; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double p0 = 0, p1 = 0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            p1 = x;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= order; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = order * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[order - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[order - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

// ---------------------------------------------------------------------------
// models
// ---------------------------------------------------------------------------

double TabulatedField::eval(double x, double y) const {
    double u = (wrap_unit(x) + 0.5) * nx;
    double v = (wrap_unit(y) + 0.5) * ny;
    int i0 = static_cast<int>(std::floor(u));
    int j0 = static_cast<int>(std::floor(v));
    double fu = u - i0, fv = v - j0;
    auto at = [&](int i, int j) {
        i = (i % nx + nx) % nx;
        j = (j % ny + ny) % ny;
        return values[static_cast<std::size_t>(i) * ny + j];
    };
    return (1 - fu) * (1 - fv) * at(i0, j0) + fu * (1 - fv) * at(i0 + 1, j0) +
           (1 - fu) * fv * at(i0, j0 + 1) + fu * fv * at(i0 + 1, j0 + 1);
}

FieldModel FieldModel::constant(double b) {
    FieldModel m;
    m.kind = FieldKind::Constant;
    m.params = {b};
    return m;
}

FieldModel FieldModel::trig_well(double base, double beta_x, double beta_y) {
    FieldModel m;
    m.kind = FieldKind::TrigWell;
    m.params = {base, beta_x, beta_y};
    return m;
}

FieldModel FieldModel::tabulated_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open field table: " + path);
    // rows of x,y,b; must form a regular grid over the unit cell
    std::map<double, std::map<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x, y, b;
        if (ss >> x >> y >> b) rows[x][y] = b;
    }
    if (rows.empty()) throw ValidationError("empty field table: " + path);
    FieldModel m;
    m.kind = FieldKind::Tabulated;
    TabulatedField t;
    t.nx = static_cast<int>(rows.size());
    t.ny = static_cast<int>(rows.begin()->second.size());
    for (auto& [x, col] : rows) {
        if (static_cast<int>(col.size()) != t.ny)
            throw ValidationError("field table is not a regular grid: " + path);
        for (auto& [y, b] : col) t.values.push_back(b);
    }
    m.table = std::move(t);
    return m;
}

double FieldModel::eval(double x, double y) const {
    switch (kind) {
        case FieldKind::Constant:
            return params.at(0);
        case FieldKind::TrigWell: {
            double sx = std::sin(kPi * x);
            double sy = std::sin(kPi * y);
            return params.at(0) + params.at(1) * sx * sx + params.at(2) * sy * sy;
        }
        case FieldKind::Tabulated:
            return table->eval(x, y);
    }
    throw ValidationError("invalid field kind");
}

Point FieldModel::gradient(double x, double y, double fd_step) const {
    switch (kind) {
        case FieldKind::Constant:
            return Point::Zero();
        case FieldKind::TrigWell:
            return Point(params.at(1) * kPi * std::sin(2 * kPi * x),
                         params.at(2) * kPi * std::sin(2 * kPi * y));
        case FieldKind::Tabulated: {
            double d = fd_step;
            return Point((eval(x + d, y) - eval(x - d, y)) / (2 * d),
                         (eval(x, y + d) - eval(x, y - d)) / (2 * d));
        }
    }
    throw ValidationError("invalid field kind");
}

// ---------------------------------------------------------------------------
// intensity of an antisymmetric matrix
// ---------------------------------------------------------------------------

double tr_plus(const Eigen::MatrixXd& B) {
    if (B.rows() != B.cols()) throw ValidationError("tr_plus: matrix is not square");
    for (Eigen::Index i = 0; i < B.rows(); ++i)
        for (Eigen::Index j = i; j < B.cols(); ++j) {
            double defect = std::abs(B(i, j) + B(j, i));
            if (defect > 1e-12) {
                std::ostringstream msg;
                msg << "tr_plus: input not antisymmetric at entry (" << i << "," << j
                    << "): |B(i,j)+B(j,i)| = " << defect;
                throw ValidationError(msg.str());
            }
        }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
    return 0.5 * svd.singularValues().sum();
}

// ---------------------------------------------------------------------------
// minimum and assumptions
// ---------------------------------------------------------------------------

B0Result find_b0(const FieldModel& model, int resolution) {
    if (resolution < 64) throw ValidationError("find_b0: resolution must be >= 64");
    double best = std::numeric_limits<double>::infinity();
    int bi = 0, bj = 0;
    double step = 1.0 / resolution;
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j) {
            double v = model.intensity(-0.5 + i * step, -0.5 + j * step);
            if (v < best) {
                best = v;
                bi = i;
                bj = j;
            }
        }
    double x = -0.5 + bi * step, y = -0.5 + bj * step;
    auto refine = [&](double c, bool horizontal) {
        double fm = model.intensity(horizontal ? c - step : x, horizontal ? y : c - step);
        double f0 = model.intensity(horizontal ? c : x, horizontal ? y : c);
        double fp = model.intensity(horizontal ? c + step : x, horizontal ? y : c + step);
        double denom = fm - 2 * f0 + fp;
        if (denom <= 0) return c;
        double shift = 0.5 * step * (fm - fp) / denom;
        return c + std::clamp(shift, -step, step);
    };
    double rx = refine(x, true);
    double ry = refine(y, false);
    B0Result r;
    r.argmin = Point(rx, ry);
    r.b0 = std::min(best, model.intensity(rx, ry));
    return r;
}

AssumptionReport check_assumptions(const FieldModel& model, double eps0, double eps1,
                                   int resolution) {
    if (!(eps1 > 0 && eps1 < eps0))
        throw ValidationError("check_assumptions: need 0 < eps1 < eps0");
    AssumptionReport rep;
    rep.eps0 = eps0;
    rep.eps1 = eps1;
    rep.b0 = find_b0(model, resolution).b0;

    rep.boundary_min = std::numeric_limits<double>::infinity();
    double step = 1.0 / resolution;
    for (int i = 0; i <= resolution; ++i) {
        double t = -0.5 + i * step;
        const Point candidates[4] = {{-0.5, t}, {0.5, t}, {t, -0.5}, {t, 0.5}};
        for (const Point& p : candidates) {
            double v = model.intensity(p);
            if (v < rep.boundary_min) {
                rep.boundary_min = v;
                rep.boundary_witness = p;
            }
        }
    }
    rep.boundary_ok = rep.boundary_min >= rep.b0 + eps0 - 1e-12;

    rep.sublevel_min = std::numeric_limits<double>::infinity();
    rep.sublevel_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j) {
            Point p(-0.5 + i * step, -0.5 + j * step);
            double v = model.intensity(p);
            if (v < rep.b0 + eps0) {
                rep.sublevel_min = std::min(rep.sublevel_min, v);
                if (v > rep.sublevel_max) {
                    rep.sublevel_max = v;
                    rep.constancy_witness = p;
                }
            }
        }
    rep.non_constant_ok =
        rep.sublevel_max - rep.sublevel_min > 1e-12 * std::max(1.0, std::abs(rep.sublevel_max));
    return rep;
}

// ---------------------------------------------------------------------------
// wells
// ---------------------------------------------------------------------------

WellSet detect_wells(const FieldModel& model, double eps1, const Grid& grid, double eps0_margin) {
    WellSet ws;
    ws.eps1 = eps1;
    ws.eps0_margin = eps0_margin;
    ws.b0 = find_b0(model).b0;
    ws.cells = grid.cells;
    const int n = grid.nodes_per_dim();
    const double level = ws.b0 + eps1;
    std::vector<std::uint8_t> sub(grid.node_count(), 0);
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            sub[grid.node_id(ix, iy)] = model.intensity(grid.node_point(ix, iy)) < level;

    std::vector<int> label(grid.node_count(), -1);
    auto neighbor = [&](long id, int dir, long& out) {
        int ix = static_cast<int>(id / n), iy = static_cast<int>(id % n);
        const int dx[4] = {1, -1, 0, 0};
        const int dy[4] = {0, 0, 1, -1};
        int jx = ix + dx[dir], jy = iy + dy[dir];
        if (grid.boundary == Boundary::Torus) {
            jx = (jx + n) % n;
            jy = (jy + n) % n;
        } else if (jx < 0 || jx >= n || jy < 0 || jy >= n) {
            return false;
        }
        out = grid.node_id(jx, jy);
        return true;
    };

    for (long seed = 0; seed < grid.node_count(); ++seed) {
        if (!sub[seed] || label[seed] >= 0) continue;
        int comp = static_cast<int>(ws.components.size());
        std::vector<int> nodes;
        std::deque<long> queue{seed};
        label[seed] = comp;
        while (!queue.empty()) {
            long id = queue.front();
            queue.pop_front();
            nodes.push_back(static_cast<int>(id));
            for (int dir = 0; dir < 4; ++dir) {
                long nb;
                if (neighbor(id, dir, nb) && sub[nb] && label[nb] < 0) {
                    label[nb] = comp;
                    queue.push_back(nb);
                }
            }
        }
        std::sort(nodes.begin(), nodes.end());
        double best = std::numeric_limits<double>::infinity();
        int best_id = nodes.front();
        for (int id : nodes) {
            double v = model.intensity(grid.point_of(id));
            if (v < best) {
                best = v;
                best_id = id;
            }
        }
        ws.components.push_back(std::move(nodes));
        ws.minima.push_back(grid.point_of(best_id));
        ws.minima_values.push_back(best);
    }
    if (ws.components.empty())
        throw ValidationError("detect_wells: empty well set (eps1 too small for this resolution)");
    return ws;
}

int WellSet::wells_per_cell() const {
    std::map<std::pair<long, long>, int> per_cell;
    for (const Point& p : minima) {
        long cx = std::lround(std::floor(p.x() + 0.5));
        long cy = std::lround(std::floor(p.y() + 0.5));
        per_cell[{cx, cy}]++;
    }
    int lo = std::numeric_limits<int>::max(), hi = 0;
    for (auto& [cell, count] : per_cell) {
        lo = std::min(lo, count);
        hi = std::max(hi, count);
    }
    return lo == hi ? lo : -1;
}

bool touches_cell_boundary(const Grid& grid, const std::vector<int>& component) {
    double a = grid.spacing();
    for (int id : component) {
        Point p = grid.point_of(id);
        double dx = std::abs(wrap_unit(p.x() + 0.5)); // distance to the nearest x = k+1/2 line
        double dy = std::abs(wrap_unit(p.y() + 0.5));
        if (dx <= a || dy <= a) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// gauges
// ---------------------------------------------------------------------------

namespace {

// int_0^x b(s,y) ds for the landau primitive
double landau_a2(const FieldModel& m, double x, double y) {
    switch (m.kind) {
        case FieldKind::Constant:
            return m.params[0] * x;
        case FieldKind::TrigWell: {
            double sy = std::sin(kPi * y);
            return x * (m.params[0] + m.params[2] * sy * sy) +
                   m.params[1] * (0.5 * x - std::sin(2 * kPi * x) / (4 * kPi));
        }
        case FieldKind::Tabulated:
            return gauss_integrate_composite([&](double s) { return m.eval(s, y); }, 0.0, x, 10,
                                             0.1);
    }
    throw ValidationError("invalid field kind");
}

// radial-gauge primitive I(p) = int_0^1 t b(t p) dt and its partials
double radial_primitive(const FieldModel& m, const Point& p) {
    if (m.kind == FieldKind::Constant) return 0.5 * m.params[0];
    double span = std::abs(p.x()) + std::abs(p.y());
    return gauss_integrate_composite([&](double t) { return t * m.eval(t * p.x(), t * p.y()); },
                                     0.0, 1.0, 10, 1.0 / (2.0 + 2.0 * span));
}

Point radial_primitive_grad(const FieldModel& m, const Point& p, double fd_step) {
    if (m.kind == FieldKind::Constant) return Point::Zero();
    double span = std::abs(p.x()) + std::abs(p.y());
    double panel = 1.0 / (2.0 + 2.0 * span);
    double gx = gauss_integrate_composite(
        [&](double t) { return t * t * m.gradient(t * p.x(), t * p.y(), fd_step).x(); }, 0.0, 1.0,
        10, panel);
    double gy = gauss_integrate_composite(
        [&](double t) { return t * t * m.gradient(t * p.x(), t * p.y(), fd_step).y(); }, 0.0, 1.0,
        10, panel);
    return Point(gx, gy);
}

} // namespace

Point GaugeField::potential(const Point& p) const {
    switch (kind) {
        case GaugeKind::Landau:
            return Point(0.0, landau_a2(model, p.x(), p.y()));
        case GaugeKind::SymmetricLocal: {
            double I = radial_primitive(model, p);
            return Point(-p.y() * I, p.x() * I);
        }
    }
    throw ValidationError("invalid gauge kind");
}

Eigen::Matrix2d GaugeField::potential_jacobian(const Point& p, double fd_step) const {
    Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
    switch (kind) {
        case GaugeKind::Landau: {
            J(1, 0) = model.eval(p.x(), p.y()); // dA2/dx
            switch (model.kind) {
                case FieldKind::Constant:
                    J(1, 1) = 0.0;
                    break;
                case FieldKind::TrigWell:
                    J(1, 1) = p.x() * model.params[2] * kPi * std::sin(2 * kPi * p.y());
                    break;
                case FieldKind::Tabulated:
                    J(1, 1) = (landau_a2(model, p.x(), p.y() + fd_step) -
                               landau_a2(model, p.x(), p.y() - fd_step)) /
                              (2 * fd_step);
                    break;
            }
            return J;
        }
        case GaugeKind::SymmetricLocal: {
            double I = radial_primitive(model, p);
            Point g = radial_primitive_grad(model, p, fd_step);
            J(0, 0) = -p.y() * g.x();
            J(0, 1) = -I - p.y() * g.y();
            J(1, 0) = I + p.x() * g.x();
            J(1, 1) = p.x() * g.y();
            return J;
        }
    }
    throw ValidationError("invalid gauge kind");
}

double GaugeField::line_integral(const Point& p, const Point& q) const {
    Point d = q - p;
    double len = d.norm();
    if (len == 0.0) return 0.0;
    auto f = [&](double t) {
        Point x = p + t * d;
        return potential(x).dot(d);
    };
    int panels = std::max(1, static_cast<int>(std::ceil(len / 0.05)));
    double s = 0.0;
    for (int k = 0; k < panels; ++k)
        s += gauss_integrate(f, static_cast<double>(k) / panels,
                             static_cast<double>(k + 1) / panels, quad_order);
    return s;
}

double total_flux(const FieldModel& model, const Grid& grid) {
    double cells = grid.extent();
    switch (model.kind) {
        case FieldKind::Constant:
            return model.params[0] * cells * cells;
        case FieldKind::TrigWell:
            return cells * cells * (model.params[0] + 0.5 * model.params[1] + 0.5 * model.params[2]);
        case FieldKind::Tabulated: {
            double s = 0.0;
            int panels = 4 * grid.cells;
            const GaussRule& rule = gauss_rule(8);
            double half = 0.5 * cells;
            for (int px = 0; px < panels; ++px)
                for (int py = 0; py < panels; ++py) {
                    double x0 = -half + cells * px / panels;
                    double y0 = -half + cells * py / panels;
                    double w = cells / panels;
                    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                        for (std::size_t j = 0; j < rule.nodes.size(); ++j)
                            s += w * w * rule.weights[i] * rule.weights[j] *
                                 model.eval(x0 + w * rule.nodes[i], y0 + w * rule.nodes[j]);
                }
            return s;
        }
    }
    throw ValidationError("invalid field kind");
}

} // namespace magwell
