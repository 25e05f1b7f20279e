#pragma once

#include <iosfwd>
#include <optional>

#include "magwell/reports.hpp"

namespace magwell {

struct QuasimodeRow {
    double h = 0.0;
    int nodes = 0;
    double radius = 0.0;
    double mu = 0.0;
    double residual = 0.0;
    double spectral_distance = 0.0;
    bool hit_pass = false;
};

struct DecayRow {
    double h = 0.0;
    double sup_log_excess = 0.0;
};

struct SpacingRow {
    double h = 0.0;
    int nodes = 0;
    bool ok = false;
    std::string error;
    SpacingReport rep;
};

struct ClusterRow {
    bool ok = false;
    std::string error;
    ClusterReport rep;
};

struct SweepRow {
    double h = 0.0;
    long supercell_dim = 0;
    long wells_dim = 0;
    EigenResult supercell; // enumerated below h (b0 + eps0)
    EigenResult wells;     // enumerated below h (b0 + eps0)
    double lambda1_wells = 0.0;
    GapCensus gaps;
    AwayReport away;
    ClusterRow cluster;
};

struct SweepVerdicts {
    bool cluster_rows_ok = false;
    bool cluster_decreasing = false;
    double cluster_fit_slope = 0.0;
    double cluster_final_delta = 0.0;
    bool cluster_final_ok = false;
    bool cluster_ok = false;

    bool gaps_nondecreasing = false;
    int gaps_final = 0;
    bool gaps_ok = false;

    WeylReport weyl;
    bool weyl_ok = false;

    std::vector<double> lambda1_ratio; // lambda1/(h b0) - 1 per sweep h
    bool lambda1_decreasing = false;
    double lambda1_ratio_at_check = 0.0;
    bool lambda1_ok = false;

    bool away_window_clear = false;
    double away_max_deficit = 0.0;
    bool away_ok = false;

    double spacing_slope = 0.0;
    bool spacing_ok = false;

    double quasimode_slope = 0.0;
    bool quasimode_hits = false;
    bool quasimode_ok = false;

    double decay_trend = 0.0;
    bool decay_ok = false;

    bool all_ok() const;
};

struct SweepOutcome {
    RunConfig config;
    double b0 = 0.0;
    std::vector<SweepRow> rows;
    std::vector<SpacingRow> spacing;
    std::vector<QuasimodeRow> quasimodes;
    std::vector<DecayRow> decay;
    SweepVerdicts verdicts;
};

/// fixed pass thresholds applied by evaluate_verdicts
struct VerdictThresholds {
    double cluster_final_rel = 1e-6;   // delta(h_min) <= rel * h_min
    int gaps_min_final = 5;
    double weyl_max_ratio = 2.0;
    double lambda1_check_h = 0.1;
    double lambda1_rel_tol = 0.15;
    double away_deficit_max = 5.0;
    double spacing_min_slope = 1.1;
    double quasimode_slope_lo = 1.15;
    double quasimode_slope_hi = 1.55;
    double decay_trend_max = 0.05;
};

// sweep phases; run_sweep executes all of them
SweepRow compute_sweep_row(const RunConfig& cfg, double b0, double h);
std::vector<SpacingRow> compute_spacing_rows(const RunConfig& cfg, double b0);
std::vector<QuasimodeRow> compute_quasimode_rows(const RunConfig& cfg, double b0,
                                                 const Point& center);
std::vector<DecayRow> compute_decay_rows(const RunConfig& cfg, double b0);

SweepOutcome run_sweep(const RunConfig& cfg);
/// progressive variant: `out` holds every completed row when a hard error
/// aborts the sweep
void run_sweep_into(const RunConfig& cfg, SweepOutcome& out);
void evaluate_verdicts(SweepOutcome& out, const VerdictThresholds& thr = {});
void write_bundle(const SweepOutcome& out, const std::string& dir);
Json summary_json(const SweepOutcome& out);

/// re-derives the summary verdict quantities from the raw eigenvalue lists
/// of a written bundle and compares them with the stored summary
bool verify_bundle(const std::string& dir, std::ostream& log);

// CLI entry points; return process exit codes (0 ok, 1 scientific failure,
// 2 config error, 3 numerical error)
int cmd_check_field(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log, bool golden_update = false);
int cmd_spectrum(const RunConfig& cfg, double h, const std::string& mask_kind,
                 bool dump_matrix, std::ostream& log);
int cmd_quasimode(const RunConfig& cfg, const Point& y, double h, std::ostream& log);
int cmd_agmon(const RunConfig& cfg, double h, double eps, std::ostream& log);
int cmd_report(const std::string& dir, std::ostream& log);

} // namespace magwell
