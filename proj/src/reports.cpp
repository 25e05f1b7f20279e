#include "magwell/reports.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "magwell/version.hpp"

namespace magwell {

Json to_json(const EigenResult& eig, double h, const std::string& mask) {
    Json j;
    j["h"] = h;
    j["mask"] = mask;
    j["eigenvalues"] = eig.eigenvalues;
    j["residuals"] = eig.residuals;
    j["meta"] = {{"iterations", eig.meta.iterations}, {"restarts", eig.meta.restarts},
                 {"shift", eig.meta.shift},           {"tol", eig.meta.tol},
                 {"dim", eig.meta.dim},               {"seed", eig.meta.seed}};
    return j;
}

Json to_json(const AssumptionReport& rep) {
    Json j;
    j["b0"] = rep.b0;
    j["eps0"] = rep.eps0;
    j["eps1"] = rep.eps1;
    j["boundary_min"] = rep.boundary_min;
    j["boundary_witness"] = {rep.boundary_witness.x(), rep.boundary_witness.y()};
    j["boundary_ok"] = rep.boundary_ok;
    j["sublevel_min"] = rep.sublevel_min;
    j["sublevel_max"] = rep.sublevel_max;
    j["non_constant_ok"] = rep.non_constant_ok;
    j["constancy_witness"] = {rep.constancy_witness.x(), rep.constancy_witness.y()};
    j["pass"] = rep.pass();
    return j;
}

Json to_json(const WellSet& ws) {
    Json j;
    j["eps1"] = ws.eps1;
    j["b0"] = ws.b0;
    j["component_count"] = ws.components.size();
    j["wells_per_cell"] = ws.wells_per_cell();
    Json minima = Json::array();
    for (std::size_t i = 0; i < ws.minima.size(); ++i)
        minima.push_back({{"point", {ws.minima[i].x(), ws.minima[i].y()}},
                          {"value", ws.minima_values[i]},
                          {"nodes", ws.components[i].size()}});
    j["wells"] = minima;
    return j;
}

Json to_json(const ClusterReport& rep) {
    Json j;
    j["h"] = rep.h;
    j["window"] = {rep.window.lo, rep.window.hi};
    j["supercell"] = rep.supercell;
    j["dirichlet"] = rep.dirichlet;
    j["distances"] = rep.distances;
    j["delta"] = rep.delta;
    j["solver_floor"] = rep.solver_floor;
    j["below_solver_floor"] = rep.below_solver_floor;
    return j;
}

Json to_json(const GapCensus& g) {
    Json j;
    j["h"] = g.h;
    j["window"] = {g.window.lo, g.window.hi};
    j["M"] = g.M;
    j["guard"] = g.guard;
    j["eigenvalues"] = g.eigenvalues;
    Json gaps = Json::array();
    for (const Interval& iv : g.gaps) gaps.push_back({iv.lo, iv.hi});
    j["gaps"] = gaps;
    j["count_ge_hM"] = g.count_ge_hM;
    return j;
}

Json to_json(const SpacingReport& r) {
    Json j;
    j["h"] = r.h;
    j["alpha"] = r.alpha;
    j["beta"] = r.beta;
    j["count"] = r.count;
    j["max_spacing"] = r.max_spacing;
    j["edge_lo"] = r.edge_lo;
    j["edge_hi"] = r.edge_hi;
    return j;
}

Json to_json(const WeylReport& r) {
    Json j;
    j["sup_scaled"] = r.sup_scaled;
    j["scaled"] = r.scaled;
    j["finest_ratio"] = r.finest_ratio;
    return j;
}

Json to_json(const AwayReport& r) {
    Json j;
    j["h"] = r.h;
    j["eta"] = r.eta;
    j["level"] = r.level;
    j["b0_region"] = r.b0_region;
    j["lambda_min"] = r.lambda_min;
    j["deficit"] = r.deficit;
    j["window_top"] = r.window_top;
    j["window_clear"] = r.window_clear;
    return j;
}

Json quasimode_json(const Quasimode& q, double residual, const SpectralHit& hit) {
    Json j;
    j["y"] = {q.center.x(), q.center.y()};
    j["h"] = q.h;
    j["mu"] = q.mu;
    j["r"] = q.radius;
    j["residual_ratio"] = residual;
    j["spectral_distance"] = hit.distance;
    j["pass"] = hit.pass;
    return j;
}

Json report_header(const RunConfig& cfg) {
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << cfg.hash();
    Json j;
    j["tool"] = "magwell";
    j["version"] = kVersion;
    j["config_hash"] = hex.str();
    return j;
}

void write_json(const std::string& path, const Json& j) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << j.dump(2) << "\n";
}

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path);
    return Json::parse(in);
}

void write_xy(const std::string& path, const std::vector<double>& x,
              const std::vector<double>& y) {
    if (x.size() != y.size()) throw ValidationError("write_xy: length mismatch");
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out.precision(17);
    for (std::size_t i = 0; i < x.size(); ++i) out << x[i] << " " << y[i] << "\n";
}

} // namespace magwell
