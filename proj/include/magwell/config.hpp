#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "magwell/field.hpp"
#include "magwell/grid.hpp"

namespace magwell {

/// Full experiment configuration; defaults describe the standard run
/// (trig-well field, 3x3 supercell at 96 nodes per cell).
struct RunConfig {
    // [field]
    std::string field_kind = "trig-well";
    std::vector<double> field_params = {1.0, 1.0, 1.0};
    std::string field_table; // csv path when kind = user-tabulated

    // [gauge]
    std::string gauge_kind = "landau";
    int quad_order = 8;

    // [grid]
    int cells = 3;
    int nodes_per_cell = 96;
    std::string boundary = "dirichlet";

    // [thresholds]
    double eps0 = 0.9;
    double eps1 = 0.5;
    double eps2 = 0.7;
    double eta = 0.25;

    // [sweep]
    std::vector<double> h_list = {0.2, 0.14, 0.1, 0.07, 0.05};
    double alpha = 1.1;
    double beta = 1.4;
    double gap_exponent = 4.0;
    std::vector<double> spacing_h = {0.008, 0.0065, 0.005, 0.004};
    int spacing_nodes_per_ml = 14;

    // [quasimode]
    double quasimode_r0 = 0.35;
    std::vector<double> quasimode_h = {0.4, 0.283, 0.2, 0.141, 0.1};
    int quasimode_nodes_per_ml = 26;

    // [agmon]
    double decay_eps = 0.3;
    std::vector<double> decay_h = {0.2, 0.1, 0.05};

    // [solver]
    double tol = 1e-10;
    std::uint64_t seed = 0x5EED;

    // [output]
    std::string out_dir = "out";
    int jobs = 2;
    bool plot_data = false;
    int resolution = 256;

    FieldModel make_model() const;
    GaugeField make_gauge() const;
    Grid make_grid() const;
    Grid make_cell_grid(int nodes) const; // single-cell grid for local studies

    void validate() const; // throws ConfigError
    std::string canonical() const;
    std::uint64_t hash() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

} // namespace magwell
