#include "magwell/grid.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

namespace magwell {

long DomainMask::count() const {
    return std::accumulate(active.begin(), active.end(), 0L,
                           [](long s, std::uint8_t a) { return s + (a != 0); });
}

bool DomainMask::is_subset_of(const DomainMask& other) const {
    if (active.size() != other.active.size()) return false;
    for (std::size_t i = 0; i < active.size(); ++i)
        if (active[i] && !other.active[i]) return false;
    return true;
}

std::string DomainMask::describe() const {
    std::ostringstream s;
    switch (kind) {
        case MaskKind::Full: s << "full"; break;
        case MaskKind::Wells: s << "wells(" << threshold << ")"; break;
        case MaskKind::Away: s << "away(" << threshold << ")"; break;
        case MaskKind::Custom: s << "custom"; break;
    }
    return s.str();
}

DomainMask mask_full(const Grid& grid) {
    DomainMask m;
    m.kind = MaskKind::Full;
    m.active.assign(grid.node_count(), 1);
    return m;
}

DomainMask mask_custom(const Grid& grid, std::vector<std::uint8_t> active) {
    if (static_cast<long>(active.size()) != grid.node_count())
        throw ValidationError("mask_custom: bitmap size does not match the grid");
    DomainMask m;
    m.kind = MaskKind::Custom;
    m.active = std::move(active);
    return m;
}

void write_mask_pgm(const std::string& path, const Grid& grid, const DomainMask& mask) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    int n = grid.nodes_per_dim();
    out << "P2\n" << n << " " << n << "\n255\n";
    for (int iy = n - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < n; ++ix) out << (mask.active[grid.node_id(ix, iy)] ? 255 : 0) << (ix + 1 < n ? " " : "");
        out << "\n";
    }
}

} // namespace magwell
