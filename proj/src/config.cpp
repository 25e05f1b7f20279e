#include "magwell/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace magwell {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_doubles(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::istringstream ss(v);
    std::string tok;
    while (ss >> tok) {
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            throw ConfigError("config: bad number '" + tok + "' for key " + key);
        }
    }
    if (out.empty()) throw ConfigError("config: empty value for key " + key);
    return out;
}

double parse_double(const std::string& v, const std::string& key) {
    auto d = parse_doubles(v, key);
    if (d.size() != 1) throw ConfigError("config: expected one number for key " + key);
    return d[0];
}

int parse_int(const std::string& v, const std::string& key) {
    double d = parse_double(v, key);
    return static_cast<int>(d);
}

} // namespace

FieldModel RunConfig::make_model() const {
    if (field_kind == "constant") {
        if (field_params.empty()) throw ConfigError("constant field needs one parameter");
        return FieldModel::constant(field_params[0]);
    }
    if (field_kind == "trig-well") {
        double base = field_params.size() > 0 ? field_params[0] : 1.0;
        double bx = field_params.size() > 1 ? field_params[1] : 1.0;
        double by = field_params.size() > 2 ? field_params[2] : bx;
        return FieldModel::trig_well(base, bx, by);
    }
    if (field_kind == "user-tabulated") {
        if (field_table.empty()) throw ConfigError("user-tabulated field needs table = <csv path>");
        return FieldModel::tabulated_from_csv(field_table);
    }
    throw ConfigError("unknown field kind: " + field_kind);
}

GaugeField RunConfig::make_gauge() const {
    GaugeKind k;
    if (gauge_kind == "landau")
        k = GaugeKind::Landau;
    else if (gauge_kind == "symmetric-local")
        k = GaugeKind::SymmetricLocal;
    else
        throw ConfigError("unknown gauge kind: " + gauge_kind);
    return GaugeField(k, make_model(), quad_order);
}

Grid RunConfig::make_grid() const {
    Grid g;
    g.cells = cells;
    g.nodes_per_cell = nodes_per_cell;
    if (boundary == "dirichlet")
        g.boundary = Boundary::Dirichlet;
    else if (boundary == "torus")
        g.boundary = Boundary::Torus;
    else
        throw ConfigError("unknown boundary: " + boundary);
    return g;
}

Grid RunConfig::make_cell_grid(int nodes) const {
    Grid g;
    g.cells = 1;
    g.nodes_per_cell = nodes;
    g.boundary = Boundary::Dirichlet;
    return g;
}

void RunConfig::validate() const {
    if (!(eps1 > 0 && eps1 < eps2 && eps2 < eps0))
        throw ConfigError("config: thresholds must satisfy 0 < eps1 < eps2 < eps0");
    if (!(eta > 0)) throw ConfigError("config: eta must be positive");
    auto strictly_decreasing = [](const std::vector<double>& v) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i)
            if (!(v[i] > v[i + 1])) return false;
        return true;
    };
    for (const auto* list : {&h_list, &spacing_h, &quasimode_h, &decay_h}) {
        if (list->empty()) throw ConfigError("config: empty h list");
        for (double h : *list)
            if (!(h > 0)) throw ConfigError("config: h values must be positive");
        if (!strictly_decreasing(*list))
            throw ConfigError("config: h lists must be strictly decreasing");
    }
    if (!(tol > 0)) throw ConfigError("config: tol must be positive");
    if (quad_order < 1 || quad_order > 64) throw ConfigError("config: quad_order out of range");
    if (cells < 1 || nodes_per_cell < 4) throw ConfigError("config: grid too small");
    if (!(alpha > 0 && beta > alpha)) throw ConfigError("config: need 0 < alpha < beta");
    if (!(gap_exponent > 0)) throw ConfigError("config: gap_exponent must be positive");
    if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
    make_model();
    make_gauge();
    make_grid();
}

std::string RunConfig::canonical() const {
    std::ostringstream s;
    s.precision(17);
    auto list = [&](const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
    };
    s << "field.kind=" << field_kind << "\nfield.params=";
    list(field_params);
    s << "\nfield.table=" << field_table << "\ngauge.kind=" << gauge_kind
      << "\ngauge.quad_order=" << quad_order << "\ngrid.cells=" << cells
      << "\ngrid.nodes_per_cell=" << nodes_per_cell << "\ngrid.boundary=" << boundary
      << "\nthresholds.eps0=" << eps0 << "\nthresholds.eps1=" << eps1
      << "\nthresholds.eps2=" << eps2 << "\nthresholds.eta=" << eta << "\nsweep.h=";
    list(h_list);
    s << "\nsweep.alpha=" << alpha << "\nsweep.beta=" << beta
      << "\nsweep.gap_exponent=" << gap_exponent << "\nsweep.spacing_h=";
    list(spacing_h);
    s << "\nsweep.spacing_nodes_per_ml=" << spacing_nodes_per_ml
      << "\nquasimode.r0=" << quasimode_r0 << "\nquasimode.h=";
    list(quasimode_h);
    s << "\nquasimode.nodes_per_ml=" << quasimode_nodes_per_ml
      << "\nagmon.decay_eps=" << decay_eps << "\nagmon.decay_h=";
    list(decay_h);
    s << "\nsolver.tol=" << tol << "\nsolver.seed=" << seed << "\noutput.resolution="
      << resolution << "\n";
    return s.str();
}

std::uint64_t RunConfig::hash() const {
    std::string c = canonical();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : c) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        std::string full = section + "." + key;

        if (full == "field.kind") cfg.field_kind = value;
        else if (full == "field.params") cfg.field_params = parse_doubles(value, full);
        else if (full == "field.table") cfg.field_table = value;
        else if (full == "gauge.kind") cfg.gauge_kind = value;
        else if (full == "gauge.quad_order") cfg.quad_order = parse_int(value, full);
        else if (full == "grid.cells") cfg.cells = parse_int(value, full);
        else if (full == "grid.nodes_per_cell") cfg.nodes_per_cell = parse_int(value, full);
        else if (full == "grid.boundary") cfg.boundary = value;
        else if (full == "thresholds.eps0") cfg.eps0 = parse_double(value, full);
        else if (full == "thresholds.eps1") cfg.eps1 = parse_double(value, full);
        else if (full == "thresholds.eps2") cfg.eps2 = parse_double(value, full);
        else if (full == "thresholds.eta") cfg.eta = parse_double(value, full);
        else if (full == "sweep.h") cfg.h_list = parse_doubles(value, full);
        else if (full == "sweep.alpha") cfg.alpha = parse_double(value, full);
        else if (full == "sweep.beta") cfg.beta = parse_double(value, full);
        else if (full == "sweep.gap_exponent") cfg.gap_exponent = parse_double(value, full);
        else if (full == "sweep.spacing_h") cfg.spacing_h = parse_doubles(value, full);
        else if (full == "sweep.spacing_nodes_per_ml") cfg.spacing_nodes_per_ml = parse_int(value, full);
        else if (full == "quasimode.r0") cfg.quasimode_r0 = parse_double(value, full);
        else if (full == "quasimode.h") cfg.quasimode_h = parse_doubles(value, full);
        else if (full == "quasimode.nodes_per_ml") cfg.quasimode_nodes_per_ml = parse_int(value, full);
        else if (full == "agmon.decay_eps") cfg.decay_eps = parse_double(value, full);
        else if (full == "agmon.decay_h") cfg.decay_h = parse_doubles(value, full);
        else if (full == "solver.tol") cfg.tol = parse_double(value, full);
        else if (full == "solver.seed") cfg.seed = static_cast<std::uint64_t>(parse_double(value, full));
        else if (full == "output.dir") cfg.out_dir = value;
        else if (full == "output.jobs") cfg.jobs = parse_int(value, full);
        else if (full == "output.resolution") cfg.resolution = parse_int(value, full);
        else
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key " + full);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace magwell
