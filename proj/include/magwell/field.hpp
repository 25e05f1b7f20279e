#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "magwell/grid.hpp"
#include "magwell/types.hpp"

namespace magwell {

// ---------------------------------------------------------------------------
// field models
// ---------------------------------------------------------------------------

enum class FieldKind { Constant, TrigWell, Tabulated };

/// Values of a scalar field sampled on a regular grid over the unit cell,
/// extended periodically, evaluated by bilinear interpolation.
struct TabulatedField {
    int nx = 0;
    int ny = 0;
    std::vector<double> values; // row-major, values[ix*ny + iy], cell [-1/2,1/2)^2
    double eval(double x, double y) const;
};

/// A periodic scalar magnetic field b(x) on the plane (2-form b dx^dy),
/// one unit cell [-1/2,1/2]^2, lattice constant 1.
///
/// Built-in kinds:
///   constant:  b(x,y) = p0
///   trig-well: b(x,y) = p0 + p1 sin^2(pi x) + p2 sin^2(pi y)
struct FieldModel {
    FieldKind kind = FieldKind::TrigWell;
    std::vector<double> params;
    std::optional<TabulatedField> table;

    static FieldModel constant(double b);
    static FieldModel trig_well(double base, double beta_x, double beta_y);
    static FieldModel trig_well(double base, double beta) { return trig_well(base, beta, beta); }
    static FieldModel default_model() { return trig_well(1.0, 1.0, 1.0); }
    static FieldModel tabulated_from_csv(const std::string& path);

    double eval(double x, double y) const;
    double eval(const Point& p) const { return eval(p.x(), p.y()); }

    /// partial derivatives; analytic for built-ins, central differences with
    /// the given step for tabulated fields
    Point gradient(double x, double y, double fd_step = 1e-6) const;

    /// intensity Tr+B at a point; in 2D this is |b(x)|
    double intensity(double x, double y) const { return std::abs(eval(x, y)); }
    double intensity(const Point& p) const { return intensity(p.x(), p.y()); }
};

/// 0.5 * Tr([B^T B]^{1/2}) for an antisymmetric real matrix, computed from
/// singular values so each conjugate eigenvalue pair is counted once.
/// Throws ValidationError naming the offending entry if the input is not
/// antisymmetric within 1e-12.
double tr_plus(const Eigen::MatrixXd& B);

// ---------------------------------------------------------------------------
// field minimum and standing assumptions
// ---------------------------------------------------------------------------

struct B0Result {
    double b0 = 0.0;
    Point argmin = Point::Zero();
};

/// Grid scan of Tr+B over the unit cell at the given resolution, refined by a
/// local quadratic fit around the best node. resolution >= 64.
B0Result find_b0(const FieldModel& model, int resolution = 256);

struct AssumptionReport {
    double b0 = 0.0;
    double eps0 = 0.0;
    double eps1 = 0.0;
    double boundary_min = 0.0;      // min Tr+B over the sampled cell boundary
    Point boundary_witness = Point::Zero();
    bool boundary_ok = false;       // boundary_min >= b0 + eps0
    double sublevel_min = 0.0;      // range of Tr+B over {Tr+B < b0+eps0}
    double sublevel_max = 0.0;
    bool non_constant_ok = false;   // Tr+B attains two distinct values there
    Point constancy_witness = Point::Zero();
    bool pass() const { return boundary_ok && non_constant_ok; }
};

/// Checks that Tr+B exceeds b0+eps0 on the cell boundary and that Tr+B is
/// non-constant on the eps0 sublevel set. Requires 0 < eps1 < eps0.
AssumptionReport check_assumptions(const FieldModel& model, double eps0, double eps1,
                                   int resolution = 256);

// ---------------------------------------------------------------------------
// wells
// ---------------------------------------------------------------------------

struct WellSet {
    double eps1 = 0.0;
    double b0 = 0.0;
    double eps0_margin = 0.0;
    std::vector<std::vector<int>> components; // grid node ids, each sorted ascending
    std::vector<Point> minima;                // representative minimum per component
    std::vector<double> minima_values;
    int cells = 1;                            // cells per supercell edge
    int wells_per_cell() const;
};

/// Connected components (4-connectivity flood fill) of {Tr+B < b0 + eps1} on
/// the grid. Components are ordered by their smallest node index.
WellSet detect_wells(const FieldModel& model, double eps1, const Grid& grid,
                     double eps0_margin = 0.0);

/// true if any node of the component lies within one spacing of a cell edge
bool touches_cell_boundary(const Grid& grid, const std::vector<int>& component);

// ---------------------------------------------------------------------------
// gauge potentials
// ---------------------------------------------------------------------------

enum class GaugeKind { Landau, SymmetricLocal };

/// A vector potential A with dA = b for the referenced field model.
///
///   landau:          A = (0, int_0^x b(s,y) ds)
///   symmetric-local: A = I(x,y) * (-y, x) with I = int_0^1 t b(tx,ty) dt,
///                    the radial-gauge primitive centered at the origin
struct GaugeField {
    GaugeKind kind = GaugeKind::Landau;
    int quad_order = 8;
    FieldModel model;

    GaugeField() : model(FieldModel::default_model()) {}
    GaugeField(GaugeKind k, FieldModel m, int order = 8)
        : kind(k), quad_order(order), model(std::move(m)) {}

    Point potential(const Point& p) const;

    /// Jacobian d_j A_i; analytic closed forms where the model allows,
    /// otherwise quadrature of analytic partials / central differences
    Eigen::Matrix2d potential_jacobian(const Point& p, double fd_step = 1e-6) const;

    /// line integral of A along the straight segment from p to q,
    /// Gauss quadrature of the configured order
    double line_integral(const Point& p, const Point& q) const;
};

/// total magnetic flux through the supercell of the grid
double total_flux(const FieldModel& model, const Grid& grid);

} // namespace magwell
