#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "magwell/types.hpp"

namespace magwell {

enum class Boundary { Dirichlet, Torus };

/// Uniform grid over a square supercell of `cells` x `cells` unit cells
/// centered at the origin, spacing 1/nodes_per_cell.
///
/// Dirichlet grids hold interior nodes only (u = 0 on and outside the
/// supercell boundary); torus grids hold cells*m nodes per axis with
/// wrap-around neighbors.
struct Grid {
    int cells = 1;
    int nodes_per_cell = 96;
    Boundary boundary = Boundary::Dirichlet;

    double spacing() const { return 1.0 / nodes_per_cell; }
    double extent() const { return static_cast<double>(cells); }
    int nodes_per_dim() const {
        int n = cells * nodes_per_cell;
        return boundary == Boundary::Dirichlet ? n - 1 : n;
    }
    long node_count() const {
        long n = nodes_per_dim();
        return n * n;
    }
    double coord(int i) const {
        int off = boundary == Boundary::Dirichlet ? 1 : 0;
        return -0.5 * cells + (i + off) * spacing();
    }
    Point node_point(int ix, int iy) const { return Point(coord(ix), coord(iy)); }
    long node_id(int ix, int iy) const { return static_cast<long>(ix) * nodes_per_dim() + iy; }
    Point point_of(long id) const {
        int n = nodes_per_dim();
        return node_point(static_cast<int>(id / n), static_cast<int>(id % n));
    }
    bool same_layout(const Grid& o) const {
        return cells == o.cells && nodes_per_cell == o.nodes_per_cell && boundary == o.boundary;
    }
};

enum class MaskKind { Full, Wells, Away, Custom };

/// Activity bitmap over grid nodes; inactive nodes carry u = 0.
struct DomainMask {
    MaskKind kind = MaskKind::Full;
    double threshold = 0.0; // eps2 for wells, b0+eps1+eta level for away
    std::vector<std::uint8_t> active;

    long count() const;
    bool is_subset_of(const DomainMask& other) const;
    std::string describe() const;
};

DomainMask mask_full(const Grid& grid);
DomainMask mask_custom(const Grid& grid, std::vector<std::uint8_t> active);

/// writes the mask as an ASCII PGM bitmap (P2)
void write_mask_pgm(const std::string& path, const Grid& grid, const DomainMask& mask);

} // namespace magwell
