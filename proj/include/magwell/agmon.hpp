#pragma once

#include "magwell/eigensolve.hpp"
#include "magwell/field.hpp"
#include "magwell/grid.hpp"

namespace magwell {

enum class Stencil { Eight = 8, Sixteen = 16 };

/// Distances from a source set in the degenerate metric
/// [Tr+B - b0(W)]_+ * (euclidean), computed by Dijkstra on a masked grid
/// graph with endpoint-averaged edge weights.
struct AgmonField {
    double base_level = 0.0;           // b0(W)
    Stencil stencil = Stencil::Sixteen;
    Grid grid;
    DomainMask mask;
    std::vector<long> active_nodes;    // ascending grid ids; row i <-> active_nodes[i]
    std::vector<double> excess;        // Tr+B - b0(W) per active node (unclamped)
    std::vector<double> distance;      // d(x, X) per active node
    std::vector<long> sources;         // grid node ids
};

AgmonField agmon_distance(const FieldModel& model, const Grid& grid, const DomainMask& mask,
                          const std::vector<long>& source_nodes, double b0W,
                          Stencil stencil = Stencil::Sixteen);

/// Weight Phi = (1-eps) d with the admissibility margin
/// m(x) = Tr+B(x) - b0(W) - |grad Phi(x)|^2, gradients upwind.
struct WeightFunction {
    double eps = 0.0;
    std::vector<double> phi;        // per active node
    std::vector<double> grad_sq;    // upwind |grad phi|^2
    std::vector<double> margin;
    double ess_inf = 0.0;
    long worst_node = -1;           // grid id of the margin minimizer
    bool member = false;            // ess_inf > 0
};

WeightFunction make_weight(const AgmonField& dist, double eps);

/// throws WeightClassError naming the violating node when the weight is not
/// admissible
void require_weight_class(const WeightFunction& w, const AgmonField& dist);

/// | Re<e^{2Phi/sqrt h}(H-z)u, u> - q(e^{Phi/sqrt h}u)
///   + h || |grad Phi| e^{Phi/sqrt h} u ||^2 + Re z ||e^{Phi/sqrt h}u||^2 |
/// normalized by ||e^{Phi/sqrt h}u||^2. Exact (machine precision) for
/// Phi == 0; O(spacing) otherwise.
double energy_identity_residual(const MagneticOperator& op, const WeightFunction& w, Complex z,
                                const Eigen::VectorXcd& u);

/// sup over nodes of [log|v(x)| + (1-eps) d(x)/sqrt h] - log ||v||_inf for
/// the ground state of a well Dirichlet domain; bounded in h means decay at
/// the metric rate.
double decay_profile(const EigenResult& eig, const AgmonField& dist, double h, double eps);

/// CSV matrix export of a per-node scalar field (inactive nodes as nan)
void write_field_csv(const std::string& path, const Grid& grid, const DomainMask& mask,
                     const std::vector<double>& values);
/// PGM heatmap export (values min-max scaled over active nodes)
void write_field_pgm(const std::string& path, const Grid& grid, const DomainMask& mask,
                     const std::vector<double>& values);

} // namespace magwell
