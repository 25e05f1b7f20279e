#include <CLI11.hpp>
#include <iostream>

#include "magwell/driver.hpp"
#include "magwell/version.hpp"

using namespace magwell;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    int jobs = 0;
    bool plot_data = false;
    std::vector<double> h_override;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->set_help_flag("--help", "print usage");
    cmd->add_option("--config", o.config_path, "run configuration file (INI sections)");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--jobs", o.jobs, "worker pool size");
    cmd->add_flag("--plot-data", o.plot_data, "emit (x y) series for plots");
    cmd->add_option("--h", o.h_override, "override the sweep h list (repeatable)");
}

RunConfig make_config(const CommonOpts& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.jobs > 0) cfg.jobs = o.jobs;
    if (o.plot_data) cfg.plot_data = true;
    if (!o.h_override.empty()) cfg.h_list = o.h_override;
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic magnetic-well spectral laboratory"};
    app.set_help_flag("--help", "print usage");
    app.set_version_flag("--version", std::string("magwell ") + kVersion);
    app.require_subcommand(1);

    CommonOpts check_o, sweep_o, spec_o, quasi_o, agmon_o;
    double spec_h = 0.1;
    std::string spec_mask = "full";
    bool spec_dump = false;
    std::vector<double> quasi_y = {0.0, 0.0};
    double quasi_h = 0.2;
    double agmon_h = 0.1, agmon_eps = 0.3;
    std::string report_dir;
    bool golden_update = false;

    CLI::App* check = app.add_subcommand("check-field", "validate the field assumptions and wells");
    add_common(check, check_o);

    CLI::App* sweep = app.add_subcommand("sweep", "full experiment sweep with verdict table");
    add_common(sweep, sweep_o);
    sweep->add_flag("--golden-update", golden_update,
                    "rewrite golden reference files from this run (guarded)");

    CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues of one configuration");
    add_common(spectrum, spec_o);
    spectrum->add_option("--at", spec_h, "semiclassical parameter h")->required();
    spectrum->add_option("--mask", spec_mask, "full | wells | away");
    spectrum->add_flag("--dump-matrix", spec_dump, "write the assembled matrix as coordinate-list text");

    CLI::App* quasimode = app.add_subcommand("quasimode", "trial-state residual at one (y, h)");
    add_common(quasimode, quasi_o);
    quasimode->add_option("--y", quasi_y, "center coordinates")->expected(2);
    quasimode->add_option("--at", quasi_h, "semiclassical parameter h")->required();

    CLI::App* agmon = app.add_subcommand("agmon", "distance field, weights and decay at one h");
    add_common(agmon, agmon_o);
    agmon->add_option("--at", agmon_h, "semiclassical parameter h")->required();
    agmon->add_option("--eps", agmon_eps, "weight slack in (0, 1]");

    CLI::App* report = app.add_subcommand("report", "re-derive verdicts from a written bundle");
    report->add_option("--in", report_dir, "bundle directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*check) return cmd_check_field(make_config(check_o), std::cout);
        if (*sweep) return cmd_sweep(make_config(sweep_o), std::cout, golden_update);
        if (*spectrum)
            return cmd_spectrum(make_config(spec_o), spec_h, spec_mask, spec_dump, std::cout);
        if (*quasimode)
            return cmd_quasimode(make_config(quasi_o), Point(quasi_y[0], quasi_y[1]), quasi_h,
                                 std::cout);
        if (*agmon) return cmd_agmon(make_config(agmon_o), agmon_h, agmon_eps, std::cout);
        if (*report) return cmd_report(report_dir, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
