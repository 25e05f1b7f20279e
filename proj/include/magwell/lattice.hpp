#pragma once

#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "magwell/field.hpp"
#include "magwell/grid.hpp"

namespace magwell {

using SparseHermitian = Eigen::SparseMatrix<Complex>;

/// Sparse gauge-covariant five-point discretization of (ih d + A)*(ih d + A)
/// on the active nodes of a masked grid.
///
/// For an active pair j -> k the off-diagonal is -(h/a)^2 exp(i theta_jk)
/// with theta_jk = -(1/h) * int_j^k A, so each plaquette carries the flux of
/// b through it and the matrix is Hermitian by construction. Diagonal entries
/// count every stencil direction, Dirichlet neighbors included.
struct MagneticOperator {
    SparseHermitian matrix;
    double h = 0.0;
    Grid grid;
    DomainMask mask;
    GaugeKind gauge = GaugeKind::Landau;
    int quad_order = 8;
    std::vector<long> active_nodes;  // grid node ids, ascending; row i <-> active_nodes[i]
    std::vector<double> node_field;  // Tr+B at each active node
    double field_min = 0.0;          // min of node_field
    bool resolution_warning = false; // fewer than 12 nodes per magnetic length

    long dim() const { return matrix.rows(); }
    double norm1() const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return matrix * v; }
};

MagneticOperator assemble(const FieldModel& model, const GaugeField& gauge,
                          const Grid& grid, const DomainMask& mask, double h);

/// Principal submatrix on the nodes of submask (discrete Dirichlet
/// realization). submask must be contained in op.mask.
MagneticOperator restrict_operator(const MagneticOperator& op, const DomainMask& submask);

/// Conjugation by diag(exp(i chi / h)); spectrum preserved exactly.
/// chi is indexed like the operator rows.
MagneticOperator gauge_transform(const MagneticOperator& op, const std::vector<double>& chi);

/// masks derived from the field
DomainMask mask_wells(const Grid& grid, const FieldModel& model, double b0, double eps2);
DomainMask mask_away(const Grid& grid, const FieldModel& model, double b0, double eps1, double eta);

/// Largest deviation (mod 2pi) between the oriented phase sum around a
/// plaquette and -(1/h) * flux of b through it; gauge-independent content of
/// the Peierls phases. Full-mask grids only.
double max_plaquette_defect(const MagneticOperator& op, const FieldModel& model);

/// coordinate-list text export: "row col re im" per stored entry
void write_coo(const std::string& path, const MagneticOperator& op);

} // namespace magwell
