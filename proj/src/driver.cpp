#include "magwell/driver.hpp"

#include <atomic>
#include <functional>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace magwell {

namespace fs = std::filesystem;

namespace {

int cell_nodes_for(double h, double b_ref, int nodes_per_ml) {
    // grid resolving sqrt(h/b_ref) with nodes_per_ml nodes
    double ml = std::sqrt(h / b_ref);
    return std::max(16, static_cast<int>(std::ceil(nodes_per_ml / ml)));
}

double field_max(const FieldModel& model, int resolution = 128) {
    double best = 0.0;
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j)
            best = std::max(best, model.intensity(-0.5 + i * 1.0 / resolution,
                                                  -0.5 + j * 1.0 / resolution));
    return best;
}

long nearest_active_node(const Grid& grid, const DomainMask& mask, const Point& p) {
    long best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (long id = 0; id < grid.node_count(); ++id) {
        if (!mask.active[id]) continue;
        double d = (grid.point_of(id) - p).norm();
        if (d < bd) {
            bd = d;
            best = id;
        }
    }
    if (best < 0) throw ValidationError("no active node near the requested point");
    return best;
}

void run_pool(int jobs, int count, const std::function<void(int)>& work) {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                work(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    int n = std::max(1, std::min(jobs, count));
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

bool SweepVerdicts::all_ok() const {
    return cluster_ok && gaps_ok && weyl_ok && lambda1_ok && away_ok && spacing_ok &&
           quasimode_ok && decay_ok;
}

SweepRow compute_sweep_row(const RunConfig& cfg, double b0, double h) {
    FieldModel model = cfg.make_model();
    GaugeField gauge = cfg.make_gauge();
    Grid grid = cfg.make_grid();

    SweepRow row;
    row.h = h;
    double window_top = h * (b0 + cfg.eps0);

    DomainMask full = mask_full(grid);
    DomainMask wells = mask_wells(grid, model, b0, cfg.eps2);

    MagneticOperator sc = assemble(model, gauge, grid, full, h);
    MagneticOperator wl = restrict_operator(sc, wells);
    row.supercell_dim = sc.dim();
    row.wells_dim = wl.dim();

    row.supercell = enumerate_below(sc, window_top, cfg.tol, {}, cfg.seed);
    row.wells = enumerate_below(wl, window_top, cfg.tol, {}, cfg.seed);

    EigenResult wells_for_cluster = row.wells;
    if (row.wells.eigenvalues.empty()) {
        // the well spectrum starts above the window at this h; the distance
        // comparison still needs its lowest levels
        wells_for_cluster = lowest_eigenpairs(wl, 3, cfg.tol, {}, cfg.seed);
        row.lambda1_wells = wells_for_cluster.eigenvalues.front();
    } else {
        row.lambda1_wells = row.wells.eigenvalues.front();
    }

    row.gaps = gap_census(row.supercell, h, {0.0, window_top}, cfg.gap_exponent,
                          static_cast<int>(row.supercell.eigenvalues.size()));

    try {
        row.cluster.rep = cluster_check(row.supercell, wells_for_cluster, h, cfg.eps1, b0);
        row.cluster.ok = true;
    } catch (const WindowEmptyError& e) {
        row.cluster.ok = false;
        row.cluster.error = e.what();
    }

    row.away = away_region_check(model, gauge, grid, h, cfg.eta, cfg.eps1, b0, cfg.tol,
                                 cfg.seed);
    return row;
}

std::vector<SpacingRow> compute_spacing_rows(const RunConfig& cfg, double b0) {
    FieldModel model = cfg.make_model();
    GaugeField gauge = cfg.make_gauge();
    double bmax = field_max(model);
    std::vector<SpacingRow> rows(cfg.spacing_h.size());
    run_pool(cfg.jobs, static_cast<int>(rows.size()), [&](int i) {
        double h = cfg.spacing_h[i];
        SpacingRow& row = rows[i];
        row.h = h;
        row.nodes = cell_nodes_for(h, bmax, cfg.spacing_nodes_per_ml);
        Grid grid = cfg.make_cell_grid(row.nodes);
        DomainMask wells = mask_wells(grid, model, b0, cfg.eps2);
        MagneticOperator op = assemble(model, gauge, grid, wells, h);
        EigenResult eig = enumerate_below(op, h * (cfg.beta + 0.05), cfg.tol, {}, cfg.seed);
        try {
            row.rep = spacing_bound_check(eig, h, cfg.alpha, cfg.beta);
            row.ok = true;
        } catch (const WindowEmptyError& e) {
            row.ok = false;
            row.error = e.what();
        }
    });
    return rows;
}

std::vector<QuasimodeRow> compute_quasimode_rows(const RunConfig& cfg, double b0,
                                                 const Point& center) {
    FieldModel model = cfg.make_model();
    GaugeField gauge = cfg.make_gauge();
    std::vector<QuasimodeRow> rows(cfg.quasimode_h.size());
    run_pool(cfg.jobs, static_cast<int>(rows.size()), [&](int i) {
        double h = cfg.quasimode_h[i];
        QuasimodeRow& row = rows[i];
        row.h = h;
        row.nodes = cell_nodes_for(h, std::max(b0, 1e-12), cfg.quasimode_nodes_per_ml);
        Grid grid = cfg.make_cell_grid(row.nodes);
        DomainMask full = mask_full(grid);
        MagneticOperator op = assemble(model, gauge, grid, full, h);
        Quasimode q = build_quasimode(model, gauge, grid, full, center, h, cfg.quasimode_r0);
        row.radius = q.radius;
        row.mu = q.mu;
        row.residual = residual_ratio(q, op);
        // nearest spectral point: everything below h*mu plus one above
        int below = eigen_count_below(op, h * q.mu);
        EigenResult eig = lowest_eigenpairs(op, below + 1, cfg.tol, {}, cfg.seed);
        SpectralHit hit = spectral_hit_check(q, eig, row.residual);
        row.spectral_distance = hit.distance;
        row.hit_pass = hit.pass;
    });
    return rows;
}

std::vector<DecayRow> compute_decay_rows(const RunConfig& cfg, double b0) {
    FieldModel model = cfg.make_model();
    GaugeField gauge = cfg.make_gauge();
    Point minimum = find_b0(model, cfg.resolution).argmin;
    std::vector<DecayRow> rows(cfg.decay_h.size());
    run_pool(cfg.jobs, static_cast<int>(rows.size()), [&](int i) {
        double h = cfg.decay_h[i];
        DecayRow& row = rows[i];
        row.h = h;
        Grid grid = cfg.make_cell_grid(cfg.nodes_per_cell);
        DomainMask wells = mask_wells(grid, model, b0, cfg.eps2);
        MagneticOperator op = assemble(model, gauge, grid, wells, h);
        EigenResult eig = lowest_eigenpairs(op, 1, cfg.tol, {}, cfg.seed);
        long src = nearest_active_node(grid, wells, minimum);
        AgmonField dist = agmon_distance(model, grid, wells, {src}, b0, Stencil::Sixteen);
        row.sup_log_excess = decay_profile(eig, dist, h, cfg.decay_eps);
    });
    return rows;
}

void run_sweep_into(const RunConfig& cfg, SweepOutcome& out) {
    out.config = cfg;
    B0Result b0r = find_b0(cfg.make_model(), cfg.resolution);
    out.b0 = b0r.b0;

    out.rows.resize(cfg.h_list.size());
    run_pool(cfg.jobs, static_cast<int>(cfg.h_list.size()),
             [&](int i) { out.rows[i] = compute_sweep_row(cfg, out.b0, cfg.h_list[i]); });

    out.spacing = compute_spacing_rows(cfg, out.b0);
    out.quasimodes = compute_quasimode_rows(cfg, out.b0, b0r.argmin);
    out.decay = compute_decay_rows(cfg, out.b0);
    evaluate_verdicts(out);
}

SweepOutcome run_sweep(const RunConfig& cfg) {
    SweepOutcome out;
    run_sweep_into(cfg, out);
    return out;
}

void evaluate_verdicts(SweepOutcome& out, const VerdictThresholds& thr) {
    SweepVerdicts& v = out.verdicts;

    // clustering
    v.cluster_rows_ok = !out.rows.empty();
    std::vector<double> hs, deltas;
    for (const SweepRow& row : out.rows) {
        if (!row.cluster.ok) {
            v.cluster_rows_ok = false;
            continue;
        }
        hs.push_back(row.h);
        deltas.push_back(row.cluster.rep.delta);
    }
    v.cluster_decreasing = v.cluster_rows_ok && deltas.size() == out.rows.size();
    for (std::size_t i = 0; i + 1 < deltas.size(); ++i)
        if (!(deltas[i] > deltas[i + 1])) v.cluster_decreasing = false;
    bool fit_ok = false;
    if (deltas.size() >= 2) {
        bool positive = true;
        for (double d : deltas) positive = positive && d > 0;
        if (positive) {
            v.cluster_fit_slope = exp_fit_slope(hs, deltas);
            fit_ok = v.cluster_fit_slope < 0;
        }
    }
    if (!deltas.empty() && out.rows.back().cluster.ok) {
        v.cluster_final_delta = out.rows.back().cluster.rep.delta;
        v.cluster_final_ok =
            v.cluster_final_delta <= thr.cluster_final_rel * out.rows.back().h;
    }
    v.cluster_ok = v.cluster_rows_ok && v.cluster_decreasing && fit_ok && v.cluster_final_ok;

    // gap census
    v.gaps_nondecreasing = true;
    int prev = -1;
    for (const SweepRow& row : out.rows) {
        if (prev >= 0 && row.gaps.count_ge_hM < prev) v.gaps_nondecreasing = false;
        prev = row.gaps.count_ge_hM;
    }
    v.gaps_final = out.rows.empty() ? 0 : out.rows.back().gaps.count_ge_hM;
    v.gaps_ok = v.gaps_nondecreasing && v.gaps_final >= thr.gaps_min_final;

    // counting bound
    std::vector<std::pair<double, int>> counts;
    for (const SweepRow& row : out.rows)
        counts.push_back({row.h, static_cast<int>(row.supercell.eigenvalues.size())});
    if (!counts.empty()) {
        v.weyl = weyl_count_check(counts, 2);
        v.weyl_ok = v.weyl.finest_ratio <= thr.weyl_max_ratio;
    }

    // ground-state ratio
    v.lambda1_ratio.clear();
    for (const SweepRow& row : out.rows)
        v.lambda1_ratio.push_back(row.lambda1_wells / (row.h * out.b0) - 1.0);
    v.lambda1_decreasing = !v.lambda1_ratio.empty();
    for (std::size_t i = 0; i + 1 < v.lambda1_ratio.size(); ++i)
        if (!(std::abs(v.lambda1_ratio[i]) > std::abs(v.lambda1_ratio[i + 1])))
            v.lambda1_decreasing = false;
    v.lambda1_ratio_at_check = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < out.rows.size(); ++i)
        if (std::abs(out.rows[i].h - thr.lambda1_check_h) < 1e-12)
            v.lambda1_ratio_at_check = v.lambda1_ratio[i];
    v.lambda1_ok = v.lambda1_decreasing && std::isfinite(v.lambda1_ratio_at_check) &&
                   std::abs(v.lambda1_ratio_at_check) <= thr.lambda1_rel_tol;

    // away region
    v.away_window_clear = !out.rows.empty();
    v.away_max_deficit = -std::numeric_limits<double>::infinity();
    for (const SweepRow& row : out.rows) {
        v.away_window_clear = v.away_window_clear && row.away.window_clear;
        v.away_max_deficit = std::max(v.away_max_deficit, row.away.deficit);
    }
    v.away_ok = v.away_window_clear && v.away_max_deficit <= thr.away_deficit_max;

    // spacing
    std::vector<double> sh, ss;
    for (const SpacingRow& row : out.spacing)
        if (row.ok) {
            sh.push_back(row.h);
            ss.push_back(row.rep.max_spacing);
        }
    if (sh.size() == out.spacing.size() && sh.size() >= 2) {
        v.spacing_slope = loglog_slope(sh, ss);
        v.spacing_ok = v.spacing_slope >= thr.spacing_min_slope;
    }

    // quasimode scaling
    std::vector<double> qh, qr;
    v.quasimode_hits = !out.quasimodes.empty();
    for (const QuasimodeRow& row : out.quasimodes) {
        qh.push_back(row.h);
        qr.push_back(row.residual);
        v.quasimode_hits = v.quasimode_hits && row.hit_pass;
    }
    if (qh.size() >= 2) v.quasimode_slope = loglog_slope(qh, qr);
    v.quasimode_ok = v.quasimode_hits && v.quasimode_slope >= thr.quasimode_slope_lo &&
                     v.quasimode_slope <= thr.quasimode_slope_hi;

    // decay profile trend
    std::vector<double> dh, de;
    for (const DecayRow& row : out.decay) {
        dh.push_back(1.0 / std::sqrt(row.h));
        de.push_back(row.sup_log_excess);
    }
    if (dh.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < dh.size(); ++i) {
            sx += dh[i];
            sy += de[i];
            sxx += dh[i] * dh[i];
            sxy += dh[i] * de[i];
        }
        double n = static_cast<double>(dh.size());
        v.decay_trend = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        v.decay_ok = v.decay_trend <= thr.decay_trend_max;
    }
}

Json summary_json(const SweepOutcome& out) {
    Json j = report_header(out.config);
    j["b0"] = out.b0;
    Json rows = Json::array();
    for (const SweepRow& row : out.rows) {
        Json r;
        r["h"] = row.h;
        r["supercell_dim"] = row.supercell_dim;
        r["wells_dim"] = row.wells_dim;
        r["supercell_eigenvalues"] = row.supercell.eigenvalues;
        r["supercell_residuals"] = row.supercell.residuals;
        r["wells_eigenvalues"] = row.wells.eigenvalues;
        r["lambda1_wells"] = row.lambda1_wells;
        r["gaps"] = to_json(row.gaps);
        r["away"] = to_json(row.away);
        if (row.cluster.ok)
            r["cluster"] = to_json(row.cluster.rep);
        else
            r["cluster"] = {{"error", row.cluster.error}};
        rows.push_back(r);
    }
    j["rows"] = rows;

    Json spacing = Json::array();
    for (const SpacingRow& row : out.spacing) {
        Json r;
        r["h"] = row.h;
        r["nodes"] = row.nodes;
        if (row.ok)
            r["report"] = to_json(row.rep);
        else
            r["report"] = {{"error", row.error}};
        spacing.push_back(r);
    }
    j["spacing"] = spacing;

    Json quas = Json::array();
    for (const QuasimodeRow& row : out.quasimodes)
        quas.push_back({{"h", row.h},
                        {"nodes", row.nodes},
                        {"r", row.radius},
                        {"mu", row.mu},
                        {"residual", row.residual},
                        {"spectral_distance", row.spectral_distance},
                        {"hit_pass", row.hit_pass}});
    j["quasimodes"] = quas;

    Json decay = Json::array();
    for (const DecayRow& row : out.decay)
        decay.push_back({{"h", row.h}, {"sup_log_excess", row.sup_log_excess}});
    j["decay"] = decay;

    const SweepVerdicts& v = out.verdicts;
    j["verdicts"] = {
        {"cluster",
         {{"rows_ok", v.cluster_rows_ok},
          {"decreasing", v.cluster_decreasing},
          {"fit_slope", v.cluster_fit_slope},
          {"final_delta", v.cluster_final_delta},
          {"final_ok", v.cluster_final_ok},
          {"ok", v.cluster_ok}}},
        {"gaps",
         {{"nondecreasing", v.gaps_nondecreasing}, {"final", v.gaps_final}, {"ok", v.gaps_ok}}},
        {"weyl", {{"report", to_json(v.weyl)}, {"ok", v.weyl_ok}}},
        {"lambda1",
         {{"ratio", v.lambda1_ratio},
          {"decreasing", v.lambda1_decreasing},
          {"at_check", v.lambda1_ratio_at_check},
          {"ok", v.lambda1_ok}}},
        {"away",
         {{"window_clear", v.away_window_clear},
          {"max_deficit", v.away_max_deficit},
          {"ok", v.away_ok}}},
        {"spacing", {{"slope", v.spacing_slope}, {"ok", v.spacing_ok}}},
        {"quasimode",
         {{"slope", v.quasimode_slope}, {"hits", v.quasimode_hits}, {"ok", v.quasimode_ok}}},
        {"decay", {{"trend", v.decay_trend}, {"ok", v.decay_ok}}},
        {"all_ok", v.all_ok()},
    };
    return j;
}

void write_bundle(const SweepOutcome& out, const std::string& dir) {
    fs::create_directories(dir);
    std::ofstream cfg(fs::path(dir) / "config.canonical.txt", std::ios::binary);
    cfg << out.config.canonical();
    cfg.close();

    write_json((fs::path(dir) / "summary.json").string(), summary_json(out));

    {
        std::ofstream csv(fs::path(dir) / "summary.csv", std::ios::binary);
        csv.precision(17);
        csv << "h,supercell_count,wells_count,lambda1_wells,gap_count,away_lambda_min,delta\n";
        for (const SweepRow& row : out.rows) {
            csv << row.h << "," << row.supercell.eigenvalues.size() << ","
                << row.wells.eigenvalues.size() << "," << row.lambda1_wells << ","
                << row.gaps.count_ge_hM << "," << row.away.lambda_min << ",";
            if (row.cluster.ok)
                csv << row.cluster.rep.delta;
            else
                csv << "nan";
            csv << "\n";
        }
    }

    auto stamped = [&](Json j) {
        Json h = report_header(out.config);
        h.update(j);
        return h;
    };
    for (const SweepRow& row : out.rows) {
        std::ostringstream sub;
        sub << "h_" << std::fixed << std::setprecision(4) << row.h;
        fs::path d = fs::path(dir) / "sweep" / sub.str();
        write_json((d / "supercell_eig.json").string(),
                   stamped(to_json(row.supercell, row.h, "full")));
        write_json((d / "wells_eig.json").string(), stamped(to_json(row.wells, row.h, "wells")));
        write_json((d / "gaps.json").string(), stamped(to_json(row.gaps)));
        write_json((d / "away.json").string(), stamped(to_json(row.away)));
        if (row.cluster.ok)
            write_json((d / "cluster.json").string(), stamped(to_json(row.cluster.rep)));
        else
            write_json((d / "cluster.json").string(), stamped(Json{{"error", row.cluster.error}}));
    }

    if (out.config.plot_data) {
        std::vector<double> hs, gap_counts, deltas, inv_sqrt_h, qh, qr;
        for (const SweepRow& row : out.rows) {
            hs.push_back(row.h);
            gap_counts.push_back(row.gaps.count_ge_hM);
            if (row.cluster.ok) {
                deltas.push_back(row.cluster.rep.delta);
                inv_sqrt_h.push_back(1.0 / std::sqrt(row.h));
            }
        }
        for (const QuasimodeRow& row : out.quasimodes) {
            qh.push_back(row.h);
            qr.push_back(row.residual);
        }
        fs::path plots = fs::path(dir) / "plots";
        write_xy((plots / "gap_count_vs_h.dat").string(), hs, gap_counts);
        if (!deltas.empty())
            write_xy((plots / "log_delta_vs_inv_sqrt_h.dat").string(), inv_sqrt_h, deltas);
        write_xy((plots / "quasimode_residual_vs_h.dat").string(), qh, qr);
    }
}

bool verify_bundle(const std::string& dir, std::ostream& log) {
    Json s = read_json((fs::path(dir) / "summary.json").string());
    bool ok = true;
    for (const auto& row : s["rows"]) {
        double h = row["h"];
        std::vector<double> eigs = row["supercell_eigenvalues"].get<std::vector<double>>();
        // gap census recomputed from the raw list
        const auto& gj = row["gaps"];
        double M = gj["M"], guard = gj["guard"];
        Interval window{gj["window"][0], gj["window"][1]};
        int count = 0;
        std::vector<double> in;
        for (double lam : eigs)
            if (lam >= window.lo && lam < window.hi) in.push_back(lam);
        for (std::size_t i = 0; i + 1 < in.size(); ++i)
            if (in[i + 1] - in[i] > guard && in[i + 1] - in[i] >= std::pow(h, M)) ++count;
        if (in.empty() && window.width() >= std::pow(h, M)) count = 1;
        if (count != gj["count_ge_hM"].get<int>()) {
            log << "bundle mismatch: gap count at h=" << h << " recomputed " << count
                << " stored " << gj["count_ge_hM"] << "\n";
            ok = false;
        }
        // cluster distances recomputed
        if (row["cluster"].contains("delta")) {
            std::vector<double> sc = row["cluster"]["supercell"].get<std::vector<double>>();
            std::vector<double> di = row["cluster"]["dirichlet"].get<std::vector<double>>();
            double delta = 0.0;
            for (double lam : sc) {
                double d = std::numeric_limits<double>::infinity();
                for (double mu : di) d = std::min(d, std::abs(lam - mu));
                delta = std::max(delta, d);
            }
            if (std::abs(delta - row["cluster"]["delta"].get<double>()) >
                1e-12 * std::max(1.0, delta)) {
                log << "bundle mismatch: cluster delta at h=" << h << "\n";
                ok = false;
            }
        }
    }
    return ok;
}

// ---------------------------------------------------------------------------
// CLI entry points
// ---------------------------------------------------------------------------

int cmd_check_field(const RunConfig& cfg, std::ostream& log) {
    FieldModel model = cfg.make_model();
    AssumptionReport rep = check_assumptions(model, cfg.eps0, cfg.eps1, cfg.resolution);
    Grid cell = cfg.make_cell_grid(cfg.nodes_per_cell);
    Json j = report_header(cfg);
    j["assumptions"] = to_json(rep);
    if (rep.pass()) {
        WellSet ws = detect_wells(model, cfg.eps1, cell);
        j["wells"] = to_json(ws);
        bool boundary_clear = true;
        for (const auto& comp : ws.components)
            boundary_clear = boundary_clear && !touches_cell_boundary(cell, comp);
        j["wells"]["boundary_clear"] = boundary_clear;
    }
    write_json((fs::path(cfg.out_dir) / "check_field.json").string(), j);
    write_mask_pgm((fs::path(cfg.out_dir) / "wells_mask.pgm").string(), cell,
                   mask_wells(cell, model, rep.b0, cfg.eps2));
    write_mask_pgm((fs::path(cfg.out_dir) / "away_mask.pgm").string(), cell,
                   mask_away(cell, model, rep.b0, cfg.eps1, cfg.eta));
    log << "field check: b0=" << rep.b0 << " boundary_min=" << rep.boundary_min
        << " assumption_pass=" << (rep.pass() ? "yes" : "no") << "\n";
    if (!rep.pass()) {
        log << "violated at (" << rep.boundary_witness.x() << ", " << rep.boundary_witness.y()
            << ")\n";
        return 1;
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log, bool golden_update) {
    SweepOutcome out;
    try {
        run_sweep_into(cfg, out);
    } catch (const std::exception& e) {
        // keep every completed row before surfacing the job's diagnostics
        std::erase_if(out.rows, [](const SweepRow& r) { return r.h == 0.0; });
        evaluate_verdicts(out);
        write_bundle(out, cfg.out_dir);
        log << "sweep aborted: " << e.what() << "\n"
            << "partial bundle with " << out.rows.size() << " completed rows: " << cfg.out_dir
            << "\n";
        throw;
    }
    fs::path existing = fs::path(cfg.out_dir) / "summary.json";
    if (golden_update && fs::exists(existing)) {
        Json old = read_json(existing.string());
        Json fresh = summary_json(out);
        log << "golden update: replacing " << existing.string()
            << (old == fresh ? " (unchanged)" : " (content differs)") << "\n";
    }
    write_bundle(out, cfg.out_dir);
    const SweepVerdicts& v = out.verdicts;
    auto line = [&](const std::string& name, bool ok, const std::string& detail) {
        log << "  " << std::left << std::setw(22) << name << (ok ? "PASS" : "FAIL") << "  "
            << detail << "\n";
    };
    log << "sweep summary (bundle: " << cfg.out_dir << ")\n";
    {
        std::ostringstream d;
        d << "final=" << v.gaps_final << " nondecreasing=" << (v.gaps_nondecreasing ? "yes" : "no");
        line("gap census", v.gaps_ok, d.str());
    }
    {
        std::ostringstream d;
        d << "decreasing=" << (v.cluster_decreasing ? "yes" : "no")
          << " fit_slope=" << v.cluster_fit_slope << " final_delta=" << v.cluster_final_delta;
        line("clustering", v.cluster_ok, d.str());
    }
    {
        std::ostringstream d;
        d << "finest_ratio=" << v.weyl.finest_ratio;
        line("counting bound", v.weyl_ok, d.str());
    }
    {
        std::ostringstream d;
        d << "ratio_at_check=" << v.lambda1_ratio_at_check;
        line("ground state", v.lambda1_ok, d.str());
    }
    {
        std::ostringstream d;
        d << "max_deficit=" << v.away_max_deficit
          << " window_clear=" << (v.away_window_clear ? "yes" : "no");
        line("away region", v.away_ok, d.str());
    }
    {
        std::ostringstream d;
        d << "slope=" << v.spacing_slope;
        line("spacing bound", v.spacing_ok, d.str());
    }
    {
        std::ostringstream d;
        d << "slope=" << v.quasimode_slope << " hits=" << (v.quasimode_hits ? "yes" : "no");
        line("quasimode scaling", v.quasimode_ok, d.str());
    }
    {
        std::ostringstream d;
        d << "trend=" << v.decay_trend;
        line("decay profile", v.decay_ok, d.str());
    }
    return v.all_ok() ? 0 : 1;
}

int cmd_spectrum(const RunConfig& cfg, double h, const std::string& mask_kind,
                 bool dump_matrix, std::ostream& log) {
    FieldModel model = cfg.make_model();
    GaugeField gauge = cfg.make_gauge();
    Grid grid = cfg.make_grid();
    double b0 = find_b0(model, cfg.resolution).b0;
    DomainMask mask;
    if (mask_kind == "full")
        mask = mask_full(grid);
    else if (mask_kind == "wells")
        mask = mask_wells(grid, model, b0, cfg.eps2);
    else if (mask_kind == "away")
        mask = mask_away(grid, model, b0, cfg.eps1, cfg.eta);
    else
        throw ConfigError("unknown mask kind: " + mask_kind);
    MagneticOperator op = assemble(model, gauge, grid, mask, h);
    EigenResult eig = enumerate_below(op, h * (b0 + cfg.eps0), cfg.tol, {}, cfg.seed);
    if (eig.eigenvalues.empty()) {
        EigenResult lowest =
            lowest_eigenpairs(op, static_cast<int>(std::min<long>(3, op.dim())), cfg.tol, {},
                              cfg.seed);
        eig = lowest;
    }
    Json j = report_header(cfg);
    j["spectrum"] = to_json(eig, h, mask.describe());
    write_json((fs::path(cfg.out_dir) / "spectrum.json").string(), j);
    if (dump_matrix) write_coo((fs::path(cfg.out_dir) / "matrix.coo.txt").string(), op);
    log << "spectrum: " << eig.eigenvalues.size() << " eigenvalues written ("
        << mask.describe() << ", dim " << op.dim() << ")\n";
    return 0;
}

int cmd_quasimode(const RunConfig& cfg, const Point& y, double h, std::ostream& log) {
    FieldModel model = cfg.make_model();
    double b0 = find_b0(model, cfg.resolution).b0;
    double mu = model.intensity(y);
    if (mu >= b0 + cfg.eps1)
        throw ValidationError("quasimode center outside the wells: Tr+B(y) = " +
                              std::to_string(mu) + " >= b0 + eps1");
    GaugeField gauge = cfg.make_gauge();
    int nodes = cell_nodes_for(h, std::max(b0, 1e-12), cfg.quasimode_nodes_per_ml);
    Grid grid = cfg.make_cell_grid(nodes);
    DomainMask full = mask_full(grid);
    MagneticOperator op = assemble(model, gauge, grid, full, h);
    Quasimode q = build_quasimode(model, gauge, grid, full, y, h, cfg.quasimode_r0);
    double rho = residual_ratio(q, op);
    int below = eigen_count_below(op, h * q.mu);
    EigenResult eig = lowest_eigenpairs(op, below + 1, cfg.tol, {}, cfg.seed);
    SpectralHit hit = spectral_hit_check(q, eig, rho);
    Json j = report_header(cfg);
    j["quasimode"] = quasimode_json(q, rho, hit);
    write_json((fs::path(cfg.out_dir) / "quasimode.json").string(), j);
    if (cfg.plot_data)
        write_xy((fs::path(cfg.out_dir) / "plots" / "quasimode_point.dat").string(), {h}, {rho});
    log << "quasimode at (" << y.x() << ", " << y.y() << "), h=" << h << ": residual=" << rho
        << " distance=" << hit.distance << " pass=" << (hit.pass ? "yes" : "no") << "\n";
    return hit.pass ? 0 : 1;
}

int cmd_agmon(const RunConfig& cfg, double h, double eps, std::ostream& log) {
    FieldModel model = cfg.make_model();
    GaugeField gauge = cfg.make_gauge();
    double b0 = find_b0(model, cfg.resolution).b0;
    Grid grid = cfg.make_cell_grid(cfg.nodes_per_cell);
    DomainMask wells = mask_wells(grid, model, b0, cfg.eps2);
    MagneticOperator op = assemble(model, gauge, grid, wells, h);
    EigenResult eig = lowest_eigenpairs(op, 1, cfg.tol, {}, cfg.seed);
    long src = nearest_active_node(grid, wells, find_b0(model, cfg.resolution).argmin);
    AgmonField dist = agmon_distance(model, grid, wells, {src}, b0, Stencil::Sixteen);
    WeightFunction w = make_weight(dist, eps);
    double sup = decay_profile(eig, dist, h, eps);

    fs::create_directories(cfg.out_dir);
    write_field_csv((fs::path(cfg.out_dir) / "agmon_distance.csv").string(), grid, wells,
                    dist.distance);
    write_field_pgm((fs::path(cfg.out_dir) / "agmon_distance.pgm").string(), grid, wells,
                    dist.distance);
    write_field_csv((fs::path(cfg.out_dir) / "weight_phi.csv").string(), grid, wells, w.phi);
    write_field_csv((fs::path(cfg.out_dir) / "weight_margin.csv").string(), grid, wells,
                    w.margin);
    write_field_pgm((fs::path(cfg.out_dir) / "weight_phi.pgm").string(), grid, wells, w.phi);
    Json j = report_header(cfg);
    j["agmon"] = {{"h", h},
                  {"eps", eps},
                  {"member", w.member},
                  {"ess_inf_margin", w.ess_inf},
                  {"worst_node", w.worst_node},
                  {"sup_log_excess", sup},
                  {"lambda1", eig.eigenvalues.front()}};
    write_json((fs::path(cfg.out_dir) / "agmon.json").string(), j);
    log << "agmon: h=" << h << " eps=" << eps << " member=" << (w.member ? "yes" : "no")
        << " sup_log_excess=" << sup << "\n";
    return 0;
}

int cmd_report(const std::string& dir, std::ostream& log) {
    bool ok = verify_bundle(dir, log);
    log << "report verification: " << (ok ? "consistent" : "MISMATCH") << "\n";
    return ok ? 0 : 1;
}

} // namespace magwell
