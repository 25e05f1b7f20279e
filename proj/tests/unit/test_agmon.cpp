#include <doctest.h>

#include <cmath>
#include <random>

#include "magwell/agmon.hpp"

using namespace magwell;

namespace {

Grid cell_grid(int nodes) {
    Grid g;
    g.cells = 1;
    g.nodes_per_cell = nodes;
    return g;
}

// weight from an explicit function, margins by the same upwind rule
WeightFunction weight_from_function(const AgmonField& dist,
                                    const std::function<double(Point)>& f) {
    WeightFunction w;
    w.eps = 0.0;
    const Grid& grid = dist.grid;
    const int n = grid.nodes_per_dim();
    const double a = grid.spacing();
    std::vector<long> row_of(grid.node_count(), -1);
    for (std::size_t i = 0; i < dist.active_nodes.size(); ++i) row_of[dist.active_nodes[i]] = i;
    for (long id : dist.active_nodes) w.phi.push_back(f(grid.point_of(id)));
    w.grad_sq.resize(w.phi.size());
    w.margin.resize(w.phi.size());
    for (std::size_t i = 0; i < dist.active_nodes.size(); ++i) {
        long id = dist.active_nodes[i];
        int ix = static_cast<int>(id / n), iy = static_cast<int>(id % n);
        double g2 = 0.0;
        for (int axis = 0; axis < 2; ++axis) {
            int dx = axis == 0 ? 1 : 0, dy = axis == 0 ? 0 : 1;
            double up = 0.0;
            auto probe = [&](int jx, int jy) {
                if (jx < 0 || jx >= n || jy < 0 || jy >= n) return;
                long r = row_of[grid.node_id(jx, jy)];
                if (r < 0) return;
                up = std::max(up, (w.phi[i] - w.phi[r]) / a);
            };
            probe(ix - dx, iy - dy);
            probe(ix + dx, iy + dy);
            g2 += up * up;
        }
        w.grad_sq[i] = g2;
        w.margin[i] = dist.excess[i] - g2;
    }
    w.ess_inf = *std::min_element(w.margin.begin(), w.margin.end());
    w.member = w.ess_inf > 0;
    return w;
}

} // namespace

TEST_CASE("distance along a constant-excess corridor is exact") {
    FieldModel m = FieldModel::constant(2.0); // excess 1 against base level 1
    Grid grid = cell_grid(32);
    const int n = grid.nodes_per_dim();
    std::vector<std::uint8_t> strip(grid.node_count(), 0);
    int iy = n / 2;
    for (int ix = 0; ix < n; ++ix) strip[grid.node_id(ix, iy)] = 1;
    DomainMask corridor = mask_custom(grid, std::move(strip));
    long src = grid.node_id(0, iy);
    AgmonField d = agmon_distance(m, grid, corridor, {src}, 1.0, Stencil::Sixteen);
    for (std::size_t i = 0; i < d.active_nodes.size(); ++i) {
        double expect = (grid.point_of(d.active_nodes[i]) - grid.point_of(src)).norm();
        CHECK(d.distance[i] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("sources are at distance zero and must lie in the mask") {
    FieldModel m = FieldModel::default_model();
    Grid grid = cell_grid(48);
    double b0 = find_b0(m).b0;
    DomainMask wells = mask_wells(grid, m, b0, 0.7);
    long center = grid.node_id(grid.nodes_per_dim() / 2, grid.nodes_per_dim() / 2);
    AgmonField d = agmon_distance(m, grid, wells, {center}, b0, Stencil::Sixteen);
    for (std::size_t i = 0; i < d.active_nodes.size(); ++i)
        if (d.active_nodes[i] == center) CHECK(d.distance[i] == 0.0);
    CHECK_THROWS_AS(agmon_distance(m, grid, wells, {0}, b0, Stencil::Sixteen), ValidationError);
    CHECK_THROWS_AS(agmon_distance(m, grid, wells, {}, b0, Stencil::Sixteen), ValidationError);
}

TEST_CASE("distance matches a refined-grid oracle within two percent") {
    FieldModel m = FieldModel::default_model();
    double b0 = find_b0(m).b0;
    auto dist_to_edge = [&](int nodes) {
        Grid grid = cell_grid(nodes);
        const int n = grid.nodes_per_dim();
        DomainMask full = mask_full(grid);
        long src = grid.node_id(n / 2, n / 2); // node at the origin
        AgmonField d = agmon_distance(m, grid, full, {src}, b0, Stencil::Sixteen);
        // target: the node nearest (0.47, 0)
        long best = -1;
        double bd = 1e9;
        for (std::size_t i = 0; i < d.active_nodes.size(); ++i) {
            double dd = (grid.point_of(d.active_nodes[i]) - Point(0.47, 0.0)).norm();
            if (dd < bd) {
                bd = dd;
                best = static_cast<long>(i);
            }
        }
        return d.distance[best];
    };
    double coarse = dist_to_edge(64);
    double oracle = dist_to_edge(256);
    CHECK(std::abs(coarse - oracle) / oracle < 0.02);
}

TEST_CASE("distance is monotone in the base level") {
    FieldModel m = FieldModel::default_model();
    Grid grid = cell_grid(40);
    DomainMask full = mask_full(grid);
    const int n = grid.nodes_per_dim();
    long src = grid.node_id(n / 2, n / 2);
    AgmonField lo = agmon_distance(m, grid, full, {src}, 1.0, Stencil::Sixteen);
    AgmonField hi = agmon_distance(m, grid, full, {src}, 1.3, Stencil::Sixteen);
    for (std::size_t i = 0; i < lo.distance.size(); ++i)
        CHECK(hi.distance[i] <= lo.distance[i] + 1e-13);
}

TEST_CASE("a richer stencil only shortens paths, within the metrication bound") {
    FieldModel m = FieldModel::default_model();
    Grid grid = cell_grid(48);
    DomainMask full = mask_full(grid);
    const int n = grid.nodes_per_dim();
    long src = grid.node_id(n / 2, n / 2);
    AgmonField d8 = agmon_distance(m, grid, full, {src}, 1.0, Stencil::Eight);
    AgmonField d16 = agmon_distance(m, grid, full, {src}, 1.0, Stencil::Sixteen);
    double worst = 0.0;
    for (std::size_t i = 0; i < d8.distance.size(); ++i) {
        CHECK(d16.distance[i] <= d8.distance[i] + 1e-13);
        if (d8.distance[i] > 1e-6)
            worst = std::max(worst, (d8.distance[i] - d16.distance[i]) / d8.distance[i]);
    }
    CHECK(worst <= 0.08);
}

TEST_CASE("lipschitz bound along edges") {
    FieldModel m = FieldModel::default_model();
    Grid grid = cell_grid(40);
    DomainMask full = mask_full(grid);
    const int n = grid.nodes_per_dim();
    long src = grid.node_id(n / 2, n / 2);
    AgmonField d = agmon_distance(m, grid, full, {src}, 1.0, Stencil::Sixteen);
    std::vector<long> row_of(grid.node_count(), -1);
    for (std::size_t i = 0; i < d.active_nodes.size(); ++i) row_of[d.active_nodes[i]] = i;
    double a = grid.spacing();
    for (int ix = 0; ix + 1 < n; ++ix)
        for (int iy = 0; iy < n; ++iy) {
            long r1 = row_of[grid.node_id(ix, iy)], r2 = row_of[grid.node_id(ix + 1, iy)];
            double w = a * std::sqrt(std::max(0.5 * (d.excess[r1] + d.excess[r2]), 0.0));
            CHECK(std::abs(d.distance[r1] - d.distance[r2]) <= w + 1e-12);
        }
}

TEST_CASE("weights: slack one gives the zero weight with nonnegative margin") {
    FieldModel m = FieldModel::default_model();
    Grid grid = cell_grid(48);
    double b0 = find_b0(m).b0;
    DomainMask away = mask_away(grid, m, b0, 0.5, 0.25);
    // source: the inner rim of the away region (its field minimizers)
    MagneticOperator probe = assemble(m, GaugeField(GaugeKind::Landau, m), grid, away, 0.3);
    std::vector<long> rim;
    for (std::size_t i = 0; i < probe.active_nodes.size(); ++i)
        if (probe.node_field[i] < probe.field_min + 1e-6) rim.push_back(probe.active_nodes[i]);
    AgmonField d = agmon_distance(m, grid, away, rim, b0, Stencil::Sixteen);
    WeightFunction w = make_weight(d, 1.0);
    for (double p : w.phi) CHECK(p == 0.0);
    for (std::size_t i = 0; i < w.margin.size(); ++i)
        CHECK(w.margin[i] == doctest::Approx(d.excess[i]));
    CHECK(w.ess_inf > 0);
    CHECK(w.member);

    WeightFunction w3 = make_weight(d, 0.3);
    CHECK(w3.member); // the away-region weight is admissible at eps = 0.3
    CHECK_THROWS_AS(make_weight(d, 0.0), ValidationError);
    CHECK_THROWS_AS(make_weight(d, 1.5), ValidationError);
}

TEST_CASE("weights fail where the excess vanishes") {
    FieldModel m = FieldModel::default_model();
    Grid grid = cell_grid(48);
    double b0 = find_b0(m).b0;
    DomainMask wells = mask_wells(grid, m, b0, 0.7);
    const int n = grid.nodes_per_dim();
    long src = grid.node_id(n / 2, n / 2);
    AgmonField d = agmon_distance(m, grid, wells, {src}, b0, Stencil::Sixteen);
    WeightFunction w = make_weight(d, 0.01);
    CHECK_FALSE(w.member); // margin hits zero at the well bottom
    CHECK_THROWS_AS(require_weight_class(w, d), WeightClassError);
}

TEST_CASE("energy identity is exact for the zero weight") {
    FieldModel m = FieldModel::default_model();
    GaugeField g(GaugeKind::Landau, m);
    Grid grid = cell_grid(32);
    DomainMask full = mask_full(grid);
    MagneticOperator op = assemble(m, g, grid, full, 0.3);
    AgmonField d = agmon_distance(m, grid, full, {grid.node_id(15, 15)}, 1.0, Stencil::Eight);
    WeightFunction zero = make_weight(d, 1.0);

    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd u(op.dim());
    for (long i = 0; i < op.dim(); ++i) {
        double re = gauss(rng);
        double im = gauss(rng);
        u(i) = Complex(re, im);
    }
    for (Complex z : {Complex(0.2, 0.0), Complex(0.1, 0.4), Complex(-0.3, -0.2)})
        CHECK(energy_identity_residual(op, zero, z, u) < 1e-12);

    // a real shift of z cancels exactly
    WeightFunction w = weight_from_function(d, [](Point p) { return 0.2 * p.squaredNorm(); });
    double r1 = energy_identity_residual(op, w, Complex(0.1, 0.2), u);
    double r2 = energy_identity_residual(op, w, Complex(0.1 + 0.37, 0.2), u);
    CHECK(std::abs(r1 - r2) < 1e-12);
}

TEST_CASE("energy identity residual halves under grid refinement") {
    FieldModel m = FieldModel::default_model();
    GaugeField g(GaugeKind::Landau, m);
    double h = 0.3;
    Complex z(0.05, 0.1);
    auto residual_at = [&](int nodes) {
        Grid grid = cell_grid(nodes);
        DomainMask full = mask_full(grid);
        MagneticOperator op = assemble(m, g, grid, full, h);
        AgmonField d =
            agmon_distance(m, grid, full, {grid.node_id(0, 0)}, 1.0, Stencil::Eight);
        WeightFunction w =
            weight_from_function(d, [](Point p) { return 0.3 * std::cos(p.x() + 0.7 * p.y()); });
        Eigen::VectorXcd u(op.dim());
        for (long i = 0; i < op.dim(); ++i) {
            Point p = op.grid.point_of(op.active_nodes[i]);
            u(i) = std::exp(Complex(0.0, 2.0 * p.x())) *
                   std::cos(1.3 * p.x()) * std::cos(0.9 * p.y());
        }
        return energy_identity_residual(op, w, z, u);
    };
    double r1 = residual_at(24), r2 = residual_at(48);
    CHECK(r1 / r2 > 1.5);
    CHECK(r1 / r2 < 3.0);
}

TEST_CASE("decay profile trivia") {
    FieldModel m = FieldModel::default_model();
    GaugeField g(GaugeKind::Landau, m);
    Grid grid = cell_grid(48);
    double b0 = find_b0(m).b0;
    DomainMask wells = mask_wells(grid, m, b0, 0.7);
    MagneticOperator op = assemble(m, g, grid, wells, 0.2);
    EigenResult eig = lowest_eigenpairs(op, 1, 1e-10);
    const int n = grid.nodes_per_dim();
    AgmonField d =
        agmon_distance(m, grid, wells, {grid.node_id(n / 2, n / 2)}, b0, Stencil::Sixteen);

    CHECK(decay_profile(eig, d, 0.2, 1.0) == doctest::Approx(0.0));

    double base = decay_profile(eig, d, 0.2, 0.3);
    EigenResult scaled = eig;
    scaled.vectors.col(0) *= std::exp(Complex(0.0, 1.1));
    CHECK(decay_profile(scaled, d, 0.2, 0.3) == doctest::Approx(base).epsilon(1e-12));
}
