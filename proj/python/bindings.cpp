#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "magwell/driver.hpp"
#include "magwell/quasimode.hpp"
#include "magwell/version.hpp"

namespace py = pybind11;
using namespace magwell;

namespace {

Eigen::MatrixXcd to_dense(const MagneticOperator& op) {
    return Eigen::MatrixXcd(op.matrix);
}

py::tuple coo_arrays(const MagneticOperator& op) {
    std::vector<long> rows, cols;
    std::vector<Complex> vals;
    for (int k = 0; k < op.matrix.outerSize(); ++k)
        for (SparseHermitian::InnerIterator it(op.matrix, k); it; ++it) {
            rows.push_back(it.row());
            cols.push_back(it.col());
            vals.push_back(it.value());
        }
    return py::make_tuple(rows, cols, vals);
}

} // namespace

PYBIND11_MODULE(_magwell, m) {
    m.doc() = "periodic magnetic-well spectral laboratory";
    m.attr("__version__") = kVersion;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    py::enum_<FieldKind>(m, "FieldKind")
        .value("constant", FieldKind::Constant)
        .value("trig_well", FieldKind::TrigWell)
        .value("tabulated", FieldKind::Tabulated);
    py::enum_<GaugeKind>(m, "GaugeKind")
        .value("landau", GaugeKind::Landau)
        .value("symmetric_local", GaugeKind::SymmetricLocal);
    py::enum_<Boundary>(m, "Boundary")
        .value("dirichlet", Boundary::Dirichlet)
        .value("torus", Boundary::Torus);
    py::enum_<Stencil>(m, "Stencil")
        .value("eight", Stencil::Eight)
        .value("sixteen", Stencil::Sixteen);

    py::class_<FieldModel>(m, "FieldModel")
        .def_static("constant", &FieldModel::constant, py::arg("b"))
        .def_static("trig_well",
                    py::overload_cast<double, double, double>(&FieldModel::trig_well),
                    py::arg("base"), py::arg("beta_x"), py::arg("beta_y"))
        .def_static("default_model", &FieldModel::default_model)
        .def_static("tabulated_from_csv", &FieldModel::tabulated_from_csv, py::arg("path"))
        .def("eval", py::overload_cast<double, double>(&FieldModel::eval, py::const_))
        .def("intensity", py::overload_cast<double, double>(&FieldModel::intensity, py::const_));

    m.def("tr_plus", &tr_plus, py::arg("B"),
          "intensity of an antisymmetric matrix: half the nuclear norm");

    py::class_<B0Result>(m, "B0Result")
        .def_readonly("b0", &B0Result::b0)
        .def_readonly("argmin", &B0Result::argmin);
    m.def("find_b0", &find_b0, py::arg("model"), py::arg("resolution") = 256);

    py::class_<AssumptionReport>(m, "AssumptionReport")
        .def_readonly("b0", &AssumptionReport::b0)
        .def_readonly("boundary_min", &AssumptionReport::boundary_min)
        .def_readonly("boundary_ok", &AssumptionReport::boundary_ok)
        .def_readonly("non_constant_ok", &AssumptionReport::non_constant_ok)
        .def("passed", &AssumptionReport::pass);
    m.def("check_assumptions", &check_assumptions, py::arg("model"), py::arg("eps0"),
          py::arg("eps1"), py::arg("resolution") = 256);

    py::class_<GaugeField>(m, "GaugeField")
        .def(py::init<GaugeKind, FieldModel, int>(), py::arg("kind"), py::arg("model"),
             py::arg("quad_order") = 8)
        .def("potential", &GaugeField::potential)
        .def("line_integral", &GaugeField::line_integral);

    py::class_<Grid>(m, "Grid")
        .def(py::init([](int cells, int nodes_per_cell, Boundary bc) {
                 Grid g;
                 g.cells = cells;
                 g.nodes_per_cell = nodes_per_cell;
                 g.boundary = bc;
                 return g;
             }),
             py::arg("cells") = 1, py::arg("nodes_per_cell") = 96,
             py::arg("boundary") = Boundary::Dirichlet)
        .def_readonly("cells", &Grid::cells)
        .def_readonly("nodes_per_cell", &Grid::nodes_per_cell)
        .def("spacing", &Grid::spacing)
        .def("nodes_per_dim", &Grid::nodes_per_dim)
        .def("node_count", &Grid::node_count)
        .def("node_point", &Grid::node_point);

    py::class_<DomainMask>(m, "DomainMask")
        .def("count", &DomainMask::count)
        .def("describe", &DomainMask::describe)
        .def_readonly("active", &DomainMask::active);
    m.def("mask_full", &mask_full);
    m.def("mask_wells", &mask_wells, py::arg("grid"), py::arg("model"), py::arg("b0"),
          py::arg("eps2"));
    m.def("mask_away", &mask_away, py::arg("grid"), py::arg("model"), py::arg("b0"),
          py::arg("eps1"), py::arg("eta"));

    py::class_<WellSet>(m, "WellSet")
        .def_readonly("components", &WellSet::components)
        .def_readonly("minima_values", &WellSet::minima_values)
        .def("wells_per_cell", &WellSet::wells_per_cell);
    m.def("detect_wells", &detect_wells, py::arg("model"), py::arg("eps1"), py::arg("grid"),
          py::arg("eps0_margin") = 0.0);

    py::class_<MagneticOperator>(m, "MagneticOperator")
        .def_property_readonly("h", [](const MagneticOperator& op) { return op.h; })
        .def_property_readonly("dim", &MagneticOperator::dim)
        .def_property_readonly("field_min",
                               [](const MagneticOperator& op) { return op.field_min; })
        .def("norm1", &MagneticOperator::norm1)
        .def("apply", &MagneticOperator::apply, py::arg("v"))
        .def("to_dense", &to_dense)
        .def("to_coo", &coo_arrays);
    m.def("assemble", &assemble, py::arg("model"), py::arg("gauge"), py::arg("grid"),
          py::arg("mask"), py::arg("h"));
    m.def("restrict_operator", &restrict_operator, py::arg("op"), py::arg("submask"));
    m.def("gauge_transform", &gauge_transform, py::arg("op"), py::arg("chi"));

    py::class_<EigenResult>(m, "EigenResult")
        .def_readonly("eigenvalues", &EigenResult::eigenvalues)
        .def_readonly("residuals", &EigenResult::residuals)
        .def_property_readonly("vectors",
                               [](const EigenResult& e) { return e.vectors; });
    m.def(
        "lowest_eigenpairs",
        [](const MagneticOperator& op, int count, double tol, std::optional<double> shift,
           std::uint64_t seed) { return lowest_eigenpairs(op, count, tol, shift, seed); },
        py::arg("op"), py::arg("count"), py::arg("tol") = 1e-10,
        py::arg("shift") = std::nullopt, py::arg("seed") = 0x5EED);
    m.def("eigen_count_below",
          py::overload_cast<const MagneticOperator&, double>(&eigen_count_below), py::arg("op"),
          py::arg("threshold"));
    m.def(
        "enumerate_below",
        [](const MagneticOperator& op, double hi, double tol, std::optional<double> shift,
           std::uint64_t seed) { return enumerate_below(op, hi, tol, shift, seed); },
        py::arg("op"), py::arg("hi"), py::arg("tol") = 1e-10, py::arg("shift") = std::nullopt,
        py::arg("seed") = 0x5EED);

    py::class_<Quasimode>(m, "Quasimode")
        .def_readonly("center", &Quasimode::center)
        .def_readonly("h", &Quasimode::h)
        .def_readonly("radius", &Quasimode::radius)
        .def_readonly("mu", &Quasimode::mu)
        .def_readonly("u", &Quasimode::u);
    m.def("build_quasimode", &build_quasimode, py::arg("model"), py::arg("gauge"),
          py::arg("grid"), py::arg("mask"), py::arg("y"), py::arg("h"), py::arg("r0") = 0.35);
    m.def("residual_ratio", &residual_ratio, py::arg("quasimode"), py::arg("op"));

    py::class_<SpectralHit>(m, "SpectralHit")
        .def_readonly("distance", &SpectralHit::distance)
        .def_readonly("bound", &SpectralHit::bound)
        .def_readonly("passed", &SpectralHit::pass);
    m.def("spectral_hit_check", &spectral_hit_check, py::arg("quasimode"), py::arg("eig"),
          py::arg("residual"));

    py::class_<AgmonField>(m, "AgmonField")
        .def_readonly("distance", &AgmonField::distance)
        .def_readonly("excess", &AgmonField::excess)
        .def_readonly("active_nodes", &AgmonField::active_nodes);
    m.def("agmon_distance", &agmon_distance, py::arg("model"), py::arg("grid"), py::arg("mask"),
          py::arg("source_nodes"), py::arg("b0W"), py::arg("stencil") = Stencil::Sixteen);

    py::class_<WeightFunction>(m, "WeightFunction")
        .def_readonly("phi", &WeightFunction::phi)
        .def_readonly("margin", &WeightFunction::margin)
        .def_readonly("ess_inf", &WeightFunction::ess_inf)
        .def_readonly("member", &WeightFunction::member);
    m.def("make_weight", &make_weight, py::arg("dist"), py::arg("eps"));
    m.def("energy_identity_residual", &energy_identity_residual, py::arg("op"),
          py::arg("weight"), py::arg("z"), py::arg("u"));
    m.def("decay_profile", &decay_profile, py::arg("eig"), py::arg("dist"), py::arg("h"),
          py::arg("eps"));

    py::class_<ClusterReport>(m, "ClusterReport")
        .def_readonly("delta", &ClusterReport::delta)
        .def_readonly("distances", &ClusterReport::distances)
        .def_readonly("supercell", &ClusterReport::supercell)
        .def_readonly("dirichlet", &ClusterReport::dirichlet);
    m.def("cluster_check", &cluster_check, py::arg("supercell"), py::arg("wells"), py::arg("h"),
          py::arg("eps1"), py::arg("b0"));

    py::class_<GapCensus>(m, "GapCensus")
        .def_readonly("count_ge_hM", &GapCensus::count_ge_hM)
        .def_readonly("eigenvalues", &GapCensus::eigenvalues)
        .def_property_readonly("gaps", [](const GapCensus& g) {
            std::vector<std::pair<double, double>> out;
            for (const Interval& iv : g.gaps) out.emplace_back(iv.lo, iv.hi);
            return out;
        });
    m.def(
        "gap_census",
        [](const EigenResult& eig, double h, double lo, double hi, double M, int inertia) {
            return gap_census(eig, h, Interval{lo, hi}, M, inertia);
        },
        py::arg("eig"), py::arg("h"), py::arg("lo"), py::arg("hi"), py::arg("M"),
        py::arg("inertia_count"));

    py::class_<SpacingReport>(m, "SpacingReport")
        .def_readonly("max_spacing", &SpacingReport::max_spacing)
        .def_readonly("count", &SpacingReport::count)
        .def_readonly("edge_lo", &SpacingReport::edge_lo)
        .def_readonly("edge_hi", &SpacingReport::edge_hi);
    m.def("spacing_bound_check", &spacing_bound_check, py::arg("wells"), py::arg("h"),
          py::arg("alpha"), py::arg("beta"));

    py::class_<AwayReport>(m, "AwayReport")
        .def_readonly("lambda_min", &AwayReport::lambda_min)
        .def_readonly("deficit", &AwayReport::deficit)
        .def_readonly("window_clear", &AwayReport::window_clear);
    m.def(
        "away_region_check",
        [](const FieldModel& model, const GaugeField& gauge, const Grid& grid, double h,
           double eta, double eps1, double b0, double tol) {
            return away_region_check(model, gauge, grid, h, eta, eps1, b0, tol);
        },
        py::arg("model"), py::arg("gauge"), py::arg("grid"), py::arg("h"), py::arg("eta"),
        py::arg("eps1"), py::arg("b0"), py::arg("tol") = 1e-10);

    m.def("conjugated_resolvent_norm", &conjugated_resolvent_norm, py::arg("op"),
          py::arg("weight"), py::arg("dist"), py::arg("z"));
    m.def("loglog_slope", &loglog_slope, py::arg("x"), py::arg("y"));
}
