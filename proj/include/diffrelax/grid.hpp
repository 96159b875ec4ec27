#ifndef DIFFRELAX_GRID_HPP
#define DIFFRELAX_GRID_HPP

// ===========================================================================
//  grid.hpp -- 1-D cell-centered meshes, uniform or piecewise uniform.
//
//  A Grid1D is an ordered list of contiguous segments, each uniformly
//  spaced; cell centers sit at segment start + (i + 1/2) * dx.  Most
//  solvers use single-segment (uniform) grids; the two-material transport
//  problem uses two segments with different spacing.  The boundary
//  descriptor tells reconstruction/stencil code how to fill ghost values.
// ===========================================================================

#include <cmath>
#include <string>
#include <vector>

#include "diffrelax/errors.hpp"

namespace diffrelax {

/// Nodal data bound to a grid: one value per cell center.
using FieldArray = std::vector<double>;

/// How ghost cells outside the domain are defined.
enum class BoundaryKind {
    Periodic,         ///< wrap-around
    Reflecting,       ///< mirror across the wall (caller chooses parity)
    TransportInflow,  ///< kinetic inflow data; handled by the transport module
    Extrapolate       ///< zero-order copy of the boundary cell
};

inline const char* to_string(BoundaryKind b) {
    switch (b) {
        case BoundaryKind::Periodic: return "periodic";
        case BoundaryKind::Reflecting: return "reflecting";
        case BoundaryKind::TransportInflow: return "transport-inflow";
        case BoundaryKind::Extrapolate: return "extrapolate";
    }
    return "?";
}

/// One uniformly spaced run of cells.
struct GridSegment {
    double x_start = 0.0;
    double x_end = 1.0;
    int n_cells = 0;

    double dx() const { return (x_end - x_start) / n_cells; }
};

/// Piecewise-uniform 1-D mesh with a boundary descriptor.
struct Grid1D {
    std::vector<GridSegment> segments;
    BoundaryKind bc = BoundaryKind::Periodic;

    /// Single uniform segment covering [a, b] with n cells.
    static Grid1D uniform(double a, double b, int n, BoundaryKind bc) {
        Grid1D g;
        g.segments.push_back({a, b, n});
        g.bc = bc;
        g.validate();
        return g;
    }

    /// Sanity-check segment ordering and spacing.
    void validate() const {
        if (segments.empty())
            throw GridTooSmall("Grid1D: no segments");
        for (std::size_t k = 0; k < segments.size(); ++k) {
            const GridSegment& s = segments[k];
            if (s.n_cells < 1 || !(s.x_end > s.x_start))
                throw GridTooSmall("Grid1D: degenerate segment " +
                                   std::to_string(k));
            if (k > 0 &&
                std::abs(segments[k - 1].x_end - s.x_start) >
                    1e-12 * (std::abs(s.x_end) + 1.0))
                throw NonUniformStencil("Grid1D: segments not contiguous at " +
                                        std::to_string(k));
        }
    }

    int total_cells() const {
        int n = 0;
        for (const auto& s : segments) n += s.n_cells;
        return n;
    }

    bool is_uniform() const {
        if (segments.size() == 1) return true;
        const double d0 = segments[0].dx();
        for (const auto& s : segments)
            if (std::abs(s.dx() - d0) > 1e-13 * d0) return false;
        return true;
    }

    /// Uniform spacing; throws NonUniformStencil on mixed-spacing grids.
    double dx() const {
        if (!is_uniform())
            throw NonUniformStencil("Grid1D::dx: grid is not uniform");
        return segments[0].dx();
    }

    double x_min() const { return segments.front().x_start; }
    double x_max() const { return segments.back().x_end; }

    /// Which segment cell i belongs to.
    int segment_of(int i) const {
        int off = 0;
        for (std::size_t k = 0; k < segments.size(); ++k) {
            if (i < off + segments[k].n_cells) return static_cast<int>(k);
            off += segments[k].n_cells;
        }
        throw ShapeMismatch("Grid1D::segment_of: index out of range");
    }

    double cell_width(int i) const {
        return segments[segment_of(i)].dx();
    }

    double cell_center(int i) const {
        int off = 0;
        for (const auto& s : segments) {
            if (i < off + s.n_cells)
                return s.x_start + (i - off + 0.5) * s.dx();
            off += s.n_cells;
        }
        throw ShapeMismatch("Grid1D::cell_center: index out of range");
    }

    /// All cell centers, in order.
    std::vector<double> centers() const {
        std::vector<double> x;
        x.reserve(total_cells());
        for (const auto& s : segments)
            for (int i = 0; i < s.n_cells; ++i)
                x.push_back(s.x_start + (i + 0.5) * s.dx());
        return x;
    }

    /// All cell edges (total_cells() + 1 of them), in order.
    std::vector<double> edges() const {
        std::vector<double> x;
        x.reserve(total_cells() + 1);
        x.push_back(segments.front().x_start);
        for (const auto& s : segments)
            for (int i = 1; i <= s.n_cells; ++i)
                x.push_back(s.x_start + i * s.dx());
        return x;
    }
};

} // namespace diffrelax

#endif // DIFFRELAX_GRID_HPP
