// Acceptance suite: runs the full default experiment sweep once and grades
// every shipped claim at its pinned tolerance, one verdict line per check.
// Exit code = number of failed checks.
//
// Checks 4 and 5 encode h -> 0 asymptotics; at the default desk-scale h
// values the measured constants sit far outside their pinned tolerances, so
// they are expected to read FAIL with their measured values printed. See the
// README for the operating notes.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "magwell/driver.hpp"
#include "magwell/quasimode.hpp"

using namespace magwell;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void verdict(int num, const std::string& name, bool ok, const std::string& detail) {
    std::cout << "[" << std::right << std::setw(2) << num << "] " << std::left << std::setw(26)
              << name << (ok ? "PASS" : "FAIL") << "  " << detail << "\n"
              << std::flush;
    if (!ok) ++failures;
}

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(4) << std::scientific << v;
    return s.str();
}

// ---------------------------------------------------------------------------
// 1: sparse solver vs dense oracle on every small assembled operator
// ---------------------------------------------------------------------------
void check_oracle_equivalence() {
    struct Case {
        FieldModel model;
        GaugeKind gauge;
        int nodes;
        double h;
        MaskKind mask;
        Boundary bc;
    };
    std::vector<Case> cases = {
        {FieldModel::default_model(), GaugeKind::Landau, 24, 0.3, MaskKind::Full, Boundary::Dirichlet},
        {FieldModel::default_model(), GaugeKind::SymmetricLocal, 24, 0.2, MaskKind::Full, Boundary::Dirichlet},
        {FieldModel::default_model(), GaugeKind::Landau, 40, 0.25, MaskKind::Wells, Boundary::Dirichlet},
        {FieldModel::default_model(), GaugeKind::Landau, 32, 0.2, MaskKind::Away, Boundary::Dirichlet},
        {FieldModel::constant(1.0), GaugeKind::Landau, 24, 1.0 / (8.0 * M_PI), MaskKind::Full, Boundary::Torus},
        {FieldModel::trig_well(1.0, 1.0, 4.0), GaugeKind::Landau, 32, 0.3, MaskKind::Full, Boundary::Dirichlet},
    };
    double worst = 0.0;
    long max_dim = 0;
    for (const Case& c : cases) {
        GaugeField g(c.gauge, c.model);
        Grid grid;
        grid.cells = 1;
        grid.nodes_per_cell = c.nodes;
        grid.boundary = c.bc;
        double b0 = find_b0(c.model).b0;
        DomainMask mask;
        if (c.mask == MaskKind::Full)
            mask = mask_full(grid);
        else if (c.mask == MaskKind::Wells)
            mask = mask_wells(grid, c.model, b0, 0.7);
        else
            mask = mask_away(grid, c.model, b0, 0.5, 0.25);
        MagneticOperator op = assemble(c.model, g, grid, mask, c.h);
        if (op.dim() > 2000) throw ValidationError("oracle case exceeds the dimension cap");
        max_dim = std::max(max_dim, op.dim());
        std::vector<double> dense = dense_eigenvalues(op.matrix);
        int count = std::min<long>(10, op.dim());
        EigenResult lz = lowest_eigenpairs(op, count, 1e-11);
        for (int i = 0; i < count; ++i) {
            double scale = std::max(std::abs(dense[i]), 1e-8 * op.norm1());
            worst = std::max(worst, std::abs(lz.eigenvalues[i] - dense[i]) / scale);
        }
    }
    verdict(1, "oracle equivalence", worst <= 1e-10,
            "max rel err " + fmt(worst) + " over " + std::to_string(cases.size()) +
                " operators (max dim " + std::to_string(max_dim) + ")");
}

// ---------------------------------------------------------------------------
// 2: gauge invariance
// ---------------------------------------------------------------------------
void check_gauge_invariance() {
    FieldModel m = FieldModel::default_model();
    Grid grid;
    grid.cells = 1;
    grid.nodes_per_cell = 16;
    double h = 0.35;
    MagneticOperator a = assemble(m, GaugeField(GaugeKind::Landau, m), grid, mask_full(grid), h);
    MagneticOperator b =
        assemble(m, GaugeField(GaugeKind::SymmetricLocal, m), grid, mask_full(grid), h);
    std::vector<double> la = dense_eigenvalues(a.matrix), lb = dense_eigenvalues(b.matrix);
    double gauge_err = 0.0;
    for (std::size_t i = 0; i < la.size(); ++i)
        gauge_err = std::max(gauge_err, std::abs(la[i] - lb[i]));

    Grid grid2;
    grid2.cells = 1;
    grid2.nodes_per_cell = 20;
    MagneticOperator c = assemble(m, GaugeField(GaugeKind::Landau, m), grid2, mask_full(grid2), h);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> chi(c.dim());
    for (double& x : chi) x = u(rng);
    MagneticOperator moved = gauge_transform(c, chi);
    std::vector<double> lc = dense_eigenvalues(c.matrix), lm = dense_eigenvalues(moved.matrix);
    double conj_err = 0.0;
    for (std::size_t i = 0; i < lc.size(); ++i)
        conj_err = std::max(conj_err, std::abs(lc[i] - lm[i]));

    verdict(2, "gauge invariance", gauge_err <= 1e-8 && conj_err <= 1e-10,
            "landau vs symmetric-local " + fmt(gauge_err) + ", conjugation " + fmt(conj_err));
}

// ---------------------------------------------------------------------------
// 9: weighted energy identity
// ---------------------------------------------------------------------------
void check_energy_identity() {
    FieldModel m = FieldModel::default_model();
    GaugeField g(GaugeKind::Landau, m);

    Grid grid;
    grid.cells = 1;
    grid.nodes_per_cell = 32;
    MagneticOperator op = assemble(m, g, grid, mask_full(grid), 0.3);
    AgmonField d = agmon_distance(m, grid, op.mask, {grid.node_id(15, 15)}, 1.0, Stencil::Eight);
    WeightFunction zero = make_weight(d, 1.0);
    std::mt19937_64 rng(29);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd u(op.dim());
    for (long i = 0; i < op.dim(); ++i) {
        double re = gauss(rng);
        double im = gauss(rng);
        u(i) = Complex(re, im);
    }
    double exact = 0.0;
    for (Complex z : {Complex(0.2, 0.0), Complex(0.05, 0.3)})
        exact = std::max(exact, energy_identity_residual(op, zero, z, u));

    auto smooth_residual = [&](int nodes) {
        Grid gg;
        gg.cells = 1;
        gg.nodes_per_cell = nodes;
        MagneticOperator oo = assemble(m, g, gg, mask_full(gg), 0.3);
        AgmonField dd = agmon_distance(m, gg, oo.mask, {gg.node_id(0, 0)}, 1.0, Stencil::Eight);
        // smooth explicit weight, margins recomputed by the library rule
        WeightFunction w = make_weight(dd, 1.0);
        for (std::size_t i = 0; i < w.phi.size(); ++i) {
            Point p = gg.point_of(dd.active_nodes[i]);
            w.phi[i] = 0.3 * std::cos(p.x() + 0.7 * p.y());
        }
        WeightFunction wg = w;
        // rebuild upwind gradients for the explicit weight
        const int n = gg.nodes_per_dim();
        std::vector<long> row_of(gg.node_count(), -1);
        for (std::size_t i = 0; i < dd.active_nodes.size(); ++i) row_of[dd.active_nodes[i]] = i;
        for (std::size_t i = 0; i < w.phi.size(); ++i) {
            long id = dd.active_nodes[i];
            int ix = static_cast<int>(id / n), iy = static_cast<int>(id % n);
            double g2 = 0.0;
            for (int axis = 0; axis < 2; ++axis) {
                int dx = axis == 0 ? 1 : 0, dy = axis == 0 ? 0 : 1;
                double up = 0.0;
                auto probe = [&](int jx, int jy) {
                    if (jx < 0 || jx >= n || jy < 0 || jy >= n) return;
                    long r = row_of[gg.node_id(jx, jy)];
                    if (r >= 0) up = std::max(up, (w.phi[i] - w.phi[r]) / gg.spacing());
                };
                probe(ix - dx, iy - dy);
                probe(ix + dx, iy + dy);
                g2 += up * up;
            }
            wg.grad_sq[i] = g2;
        }
        Eigen::VectorXcd uu(oo.dim());
        for (long i = 0; i < oo.dim(); ++i) {
            Point p = gg.point_of(oo.active_nodes[i]);
            uu(i) = std::exp(Complex(0.0, 2.0 * p.x())) * std::cos(1.3 * p.x()) *
                    std::cos(0.9 * p.y());
        }
        return energy_identity_residual(oo, wg, Complex(0.05, 0.1), uu);
    };
    double r1 = smooth_residual(24), r2 = smooth_residual(48);
    double ratio = r1 / r2;
    verdict(9, "energy identity", exact <= 1e-12 && ratio >= 1.5 && ratio <= 3.0,
            "zero-weight " + fmt(exact) + ", refinement ratio " + fmt(ratio));
}

// ---------------------------------------------------------------------------
// 12: determinism of a full sweep bundle
// ---------------------------------------------------------------------------
RunConfig small_config() {
    RunConfig cfg;
    cfg.cells = 1;
    cfg.nodes_per_cell = 24;
    cfg.h_list = {0.4};
    cfg.quasimode_h = {0.4, 0.3};
    cfg.spacing_h = {0.03, 0.02};
    cfg.spacing_nodes_per_ml = 8;
    cfg.decay_h = {0.4, 0.3};
    cfg.resolution = 128;
    cfg.jobs = 2;
    return cfg;
}

bool dirs_identical(const fs::path& a, const fs::path& b, std::string& why) {
    std::vector<fs::path> ra, rb;
    for (auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) ra.push_back(fs::relative(e.path(), a));
    for (auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) rb.push_back(fs::relative(e.path(), b));
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    if (ra != rb) {
        why = "file lists differ";
        return false;
    }
    for (const fs::path& rel : ra) {
        std::ifstream fa(a / rel, std::ios::binary), fb(b / rel, std::ios::binary);
        std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
        if (sa != sb) {
            why = "content differs: " + rel.string();
            return false;
        }
    }
    return true;
}

void check_determinism() {
    RunConfig cfg = small_config();
    fs::path base = fs::temp_directory_path() / "magwell_acceptance";
    fs::remove_all(base);
    SweepOutcome o1 = run_sweep(cfg);
    write_bundle(o1, (base / "run1").string());
    SweepOutcome o2 = run_sweep(cfg);
    write_bundle(o2, (base / "run2").string());
    std::string why;
    bool same = dirs_identical(base / "run1", base / "run2", why);
    verdict(12, "determinism", same, same ? "two sweep bundles byte-identical" : why);
}

} // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    std::cout << "acceptance suite: default configuration sweep\n";

    check_oracle_equivalence();
    check_gauge_invariance();

    RunConfig cfg; // the standard run
    SweepOutcome out = run_sweep(cfg);
    const SweepVerdicts& v = out.verdicts;

    {
        std::ostringstream d;
        d << "slope " << std::setprecision(3) << v.quasimode_slope << " in [1.15, 1.55], hits "
          << (v.quasimode_hits ? "all pass" : "FAIL");
        verdict(3, "quasimode scaling", v.quasimode_ok, d.str());
    }
    {
        std::ostringstream d;
        d << "lambda1/(h b0) - 1 at h=0.1: " << std::setprecision(3) << v.lambda1_ratio_at_check
          << " (tol 0.15), decreasing " << (v.lambda1_decreasing ? "yes" : "no");
        verdict(4, "ground-state energy", v.lambda1_ok, d.str());
    }
    {
        std::ostringstream d;
        int errored = 0;
        for (const SweepRow& row : out.rows) errored += row.cluster.ok ? 0 : 1;
        if (errored) d << errored << "/" << out.rows.size() << " windows empty, ";
        if (!out.rows.empty() && out.rows.back().cluster.ok)
            d << "delta(" << out.rows.back().h << ") " << fmt(out.rows.back().cluster.rep.delta)
              << " vs bound " << fmt(1e-6 * out.rows.back().h);
        verdict(5, "clustering", v.cluster_ok, d.str());
    }
    {
        std::ostringstream d;
        d << "counts";
        for (const SweepRow& row : out.rows) d << " " << row.gaps.count_ge_hM;
        d << (v.gaps_nondecreasing ? ", nondecreasing" : ", NOT nondecreasing") << ", final "
          << v.gaps_final << " >= 5";
        bool guards_ok = true;
        for (const SweepRow& row : out.rows)
            for (const Interval& gap : row.gaps.gaps)
                guards_ok = guards_ok && gap.width() > row.gaps.guard;
        verdict(6, "gap proliferation", v.gaps_ok && guards_ok, d.str());
    }
    {
        std::ostringstream d;
        d << "max-spacing slope " << std::setprecision(3) << v.spacing_slope << " >= 1.1 over h {";
        for (double h : cfg.spacing_h) d << " " << h;
        d << " }";
        verdict(7, "spacing bound", v.spacing_ok, d.str());
    }
    {
        std::ostringstream d;
        d << "N(h) h^2 finest-pair ratio " << std::setprecision(3) << v.weyl.finest_ratio
          << " <= 2";
        verdict(8, "counting bound", v.weyl_ok, d.str());
    }

    check_energy_identity();

    {
        std::ostringstream d;
        d << "max deficit " << std::setprecision(3) << v.away_max_deficit
          << " <= 5, window clear " << (v.away_window_clear ? "yes" : "no");
        verdict(10, "away-region coercivity", v.away_ok, d.str());
    }
    {
        std::ostringstream d;
        d << "sup_log_excess trend " << std::setprecision(3) << v.decay_trend
          << " <= 0.05 over h {";
        for (double h : cfg.decay_h) d << " " << h;
        d << " }";
        verdict(11, "agmon decay", v.decay_ok, d.str());
    }

    check_determinism();

    auto t1 = std::chrono::steady_clock::now();
    double mins = std::chrono::duration<double>(t1 - t0).count() / 60.0;
    std::cout << failures << " of 12 checks failed (" << std::setprecision(3) << mins
              << " min)\n";
    return failures;
}
