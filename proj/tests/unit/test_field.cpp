#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "magwell/field.hpp"
#include "magwell/lattice.hpp"

using namespace magwell;

namespace {

Eigen::MatrixXd random_antisymmetric(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            A(i, j) = u(rng);
            A(j, i) = -A(i, j);
        }
    return A;
}

// independent oracle: sum of positive imaginary parts of the eigenvalues
double tr_plus_eigen_oracle(const Eigen::MatrixXd& B) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(B.cast<Complex>());
    double s = 0.0;
    for (int i = 0; i < B.rows(); ++i) {
        double im = es.eigenvalues()(i).imag();
        if (im > 0) s += im;
    }
    return s;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double simpson_oracle(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

} // namespace

TEST_CASE("tr_plus on explicit matrices") {
    Eigen::MatrixXd B2(2, 2);
    B2 << 0, 3, -3, 0;
    CHECK(tr_plus(B2) == doctest::Approx(3.0).epsilon(1e-13));

    CHECK(tr_plus(Eigen::MatrixXd::Zero(4, 4)) == doctest::Approx(0.0));

    Eigen::MatrixXd B4 = Eigen::MatrixXd::Zero(4, 4);
    B4(0, 1) = 1, B4(1, 0) = -1;
    B4(2, 3) = 3, B4(3, 2) = -3;
    CHECK(tr_plus(B4) == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("tr_plus rejects non-antisymmetric input naming the entry") {
    Eigen::MatrixXd B(2, 2);
    B << 0, 3, -2.5, 0;
    CHECK_THROWS_WITH_AS(tr_plus(B), doctest::Contains("(0,1)"), ValidationError);
}

TEST_CASE("tr_plus symmetry and eigensolver oracle on random antisymmetric matrices") {
    std::mt19937 rng(1234);
    for (int n : {2, 3, 4, 6}) {
        for (int rep = 0; rep < 8; ++rep) {
            Eigen::MatrixXd B = random_antisymmetric(n, rng);
            double t = tr_plus(B);
            CHECK(t == doctest::Approx(tr_plus(-B)).epsilon(1e-12));
            CHECK(t == doctest::Approx(tr_plus_eigen_oracle(B)).epsilon(1e-10));
        }
    }
}

TEST_CASE("default field values and periodicity") {
    FieldModel m = FieldModel::default_model();
    CHECK(m.eval(0, 0) == doctest::Approx(1.0));
    CHECK(m.eval(0.5, 0) == doctest::Approx(2.0));
    CHECK(m.eval(0.25, 0.25) == doctest::Approx(2.0));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 50; ++i) {
        double x = u(rng), y = u(rng);
        CHECK(std::abs(m.eval(x + 1, y) - m.eval(x, y)) < 1e-12);
        CHECK(std::abs(m.eval(x, y - 2) - m.eval(x, y)) < 1e-12);
    }
}

TEST_CASE("find_b0 locates the minimum") {
    B0Result r = find_b0(FieldModel::default_model(), 256);
    CHECK(r.b0 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(r.argmin.x()) < 1.0 / 256);
    CHECK(std::abs(r.argmin.y()) < 1.0 / 256);

    B0Result c = find_b0(FieldModel::constant(2.0), 64);
    CHECK(c.b0 == doctest::Approx(2.0));

    B0Result aniso = find_b0(FieldModel::trig_well(1.0, 1.0, 4.0), 256);
    CHECK(aniso.b0 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(aniso.argmin.x()) < 1.0 / 256);

    CHECK_THROWS_AS(find_b0(FieldModel::default_model(), 32), ValidationError);
}

TEST_CASE("assumption checks") {
    FieldModel m = FieldModel::default_model();
    AssumptionReport ok = check_assumptions(m, 0.9, 0.5, 256);
    CHECK(ok.boundary_min == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(ok.boundary_ok);
    CHECK(ok.non_constant_ok);
    CHECK(ok.pass());

    AssumptionReport flat = check_assumptions(FieldModel::constant(2.0), 0.9, 0.5, 128);
    CHECK_FALSE(flat.boundary_ok);
    CHECK_FALSE(flat.non_constant_ok);

    AssumptionReport tight = check_assumptions(m, 1.2, 0.5, 128);
    CHECK_FALSE(tight.boundary_ok);
    CHECK(tight.non_constant_ok);

    CHECK_THROWS_AS(check_assumptions(m, 0.5, 0.9, 128), ValidationError);
}

TEST_CASE("detect_wells agrees with an independent flood fill") {
    FieldModel m = FieldModel::default_model();
    Grid grid;
    grid.cells = 1;
    grid.nodes_per_cell = 512;
    WellSet ws = detect_wells(m, 0.5, grid);

    // union-find labeling of the sublevel set, written independently
    const int n = grid.nodes_per_dim();
    std::vector<int> parent(grid.node_count(), -1);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    double level = 1.5;
    for (long id = 0; id < grid.node_count(); ++id)
        if (m.intensity(grid.point_of(id)) < level) parent[id] = static_cast<int>(id);
    auto join = [&](long a, long b) {
        if (parent[a] < 0 || parent[b] < 0) return;
        int ra = find(static_cast<int>(a)), rb = find(static_cast<int>(b));
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    };
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) {
            if (ix + 1 < n) join(grid.node_id(ix, iy), grid.node_id(ix + 1, iy));
            if (iy + 1 < n) join(grid.node_id(ix, iy), grid.node_id(ix, iy + 1));
        }
    std::set<int> roots;
    long sub_count = 0;
    for (long id = 0; id < grid.node_count(); ++id)
        if (parent[id] >= 0) {
            roots.insert(find(static_cast<int>(id)));
            ++sub_count;
        }
    CHECK(ws.components.size() == roots.size());
    CHECK(ws.components.size() == 1);
    long ours = 0;
    for (const auto& c : ws.components) ours += static_cast<long>(c.size());
    CHECK(ours == sub_count);

    // the single well contains the origin and stays away from the cell edge
    CHECK(ws.minima[0].norm() < 2.0 / 512);
    CHECK_FALSE(touches_cell_boundary(grid, ws.components[0]));
    for (int id : ws.components[0]) CHECK(m.intensity(grid.point_of(id)) < 1.5);
    CHECK(ws.wells_per_cell() == 1);
}

TEST_CASE("well sets grow monotonically with eps1") {
    FieldModel m = FieldModel::default_model();
    Grid grid;
    grid.cells = 1;
    grid.nodes_per_cell = 128;
    WellSet small = detect_wells(m, 0.3, grid);
    WellSet big = detect_wells(m, 0.5, grid);
    std::set<int> big_nodes;
    for (const auto& c : big.components) big_nodes.insert(c.begin(), c.end());
    for (const auto& c : small.components)
        for (int id : c) CHECK(big_nodes.count(id) == 1);
}

TEST_CASE("detect_wells on a 3x3 supercell finds one well per cell") {
    FieldModel m = FieldModel::default_model();
    Grid grid;
    grid.cells = 3;
    grid.nodes_per_cell = 64;
    WellSet ws = detect_wells(m, 0.5, grid);
    CHECK(ws.components.size() == 9);
    CHECK(ws.wells_per_cell() == 1);
}

TEST_CASE("line integrals in the landau gauge") {
    GaugeField g(GaugeKind::Landau, FieldModel::constant(2.0));
    // vertical edge at abscissa x: integral = b * x * length
    CHECK(g.line_integral({0.3, 0.1}, {0.3, 0.11}) == doctest::Approx(2.0 * 0.3 * 0.01).epsilon(1e-12));
    // horizontal edges carry no phase
    CHECK(g.line_integral({-0.2, 0.4}, {0.35, 0.4}) == doctest::Approx(0.0));

    GaugeField gt(GaugeKind::Landau, FieldModel::default_model());
    auto a2 = [&](double y) { return gt.potential({0.2, y}).y(); };
    double oracle = simpson_oracle(a2, 0.0, 0.01, 1e-14);
    CHECK(gt.line_integral({0.2, 0.0}, {0.2, 0.01}) == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("gauge jacobians reproduce the field") {
    FieldModel m = FieldModel::default_model();
    for (GaugeKind kind : {GaugeKind::Landau, GaugeKind::SymmetricLocal}) {
        GaugeField g(kind, m);
        for (Point p : {Point(0.1, 0.2), Point(-0.3, 0.45), Point(0.0, 0.0)}) {
            Eigen::Matrix2d J = g.potential_jacobian(p);
            CHECK(J(1, 0) - J(0, 1) == doctest::Approx(m.eval(p.x(), p.y())).epsilon(1e-9));
        }
    }
}

TEST_CASE("stokes consistency for both gauges") {
    FieldModel m = FieldModel::default_model();
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (GaugeKind kind : {GaugeKind::Landau, GaugeKind::SymmetricLocal}) {
        GaugeField g(kind, m);
        for (int rep = 0; rep < 12; ++rep) {
            double x = u(rng), y = u(rng), a = 1.0 / 96;
            double loop = g.line_integral({x, y}, {x + a, y}) +
                          g.line_integral({x + a, y}, {x + a, y + a}) +
                          g.line_integral({x + a, y + a}, {x, y + a}) +
                          g.line_integral({x, y + a}, {x, y});
            auto slice = [&](double yy) {
                return simpson_oracle([&](double xx) { return m.eval(xx, yy); }, x, x + a, 1e-14);
            };
            double flux = simpson_oracle(slice, y, y + a, 1e-14);
            CHECK(std::abs(loop - flux) < 1e-9);
        }
    }
}

TEST_CASE("tabulated fields interpolate the sampled model") {
    FieldModel m = FieldModel::default_model();
    std::string path = "tabulated_test_field.csv";
    {
        std::ofstream out(path);
        int n = 64;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double x = -0.5 + i * 1.0 / n, y = -0.5 + j * 1.0 / n;
                out << x << "," << y << "," << m.eval(x, y) << "\n";
            }
    }
    FieldModel t = FieldModel::tabulated_from_csv(path);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 40; ++i) {
        double x = u(rng), y = u(rng);
        CHECK(std::abs(t.eval(x, y) - m.eval(x, y)) < 2.5e-3);
        CHECK(std::abs(t.eval(x + 1.0, y) - t.eval(x, y)) < 1e-12);
    }
    std::remove(path.c_str());
}

TEST_CASE("total flux of the built-in models") {
    Grid grid;
    grid.cells = 3;
    CHECK(total_flux(FieldModel::default_model(), grid) == doctest::Approx(18.0));
    CHECK(total_flux(FieldModel::constant(1.0), grid) == doctest::Approx(9.0));
}
