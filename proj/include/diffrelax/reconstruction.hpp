#ifndef DIFFRELAX_RECONSTRUCTION_HPP
#define DIFFRELAX_RECONSTRUCTION_HPP

// ===========================================================================
//  reconstruction.hpp -- finite-difference space operators on Grid1D:
//
//    * mu_of_eps: the exp(-eps^2/dx) stiffness blending weight,
//    * local Lax-Friedrichs flux splitting,
//    * conservative WENO32 / WENO53 flux divergence (component-wise),
//    * pointwise first derivatives (central 2nd/4th order and the
//      cell-polynomial WENO realization used inside explicit fluxes),
//    * discrete Laplacians of 2nd and 4th order.
//
//  All stencil code works on ghost-extended copies; the ghost fill is
//  driven by the grid's boundary descriptor plus the field's parity under
//  wall reflection (density-like fields extend evenly, flux-like fields
//  oddly).
// ===========================================================================

#include <cmath>
#include <utility>
#include <vector>

#include "diffrelax/errors.hpp"
#include "diffrelax/grid.hpp"

namespace diffrelax {

/// Reconstruction family for flux divergences and pointwise derivatives.
enum class ReconstructionOrder { Cds2, WENO32, WENO53 };

inline const char* to_string(ReconstructionOrder r) {
    switch (r) {
        case ReconstructionOrder::Cds2: return "cds2";
        case ReconstructionOrder::WENO32: return "weno32";
        case ReconstructionOrder::WENO53: return "weno53";
    }
    return "?";
}

/// Regularizer in the nonlinear WENO weights (not stated by the scheme's
/// sources; standard practice).
constexpr double kWenoEps = 1e-6;

// ---------------------------------------------------------------------------
// Blending weight and flux splitting
// ---------------------------------------------------------------------------

/// Stiffness blending weight mu(eps) = exp(-eps^2/dx): 1 in the relaxed
/// limit (eps -> 0), 0 in the rarefied regime (eps^2 >> dx).
inline double mu_of_eps(double eps, double dx) {
    return std::exp(-eps * eps / dx);
}

/// Local Lax-Friedrichs splitting F+/- = (F +/- alpha U)/2.  The halves
/// reconstitute F to within one rounding of the recombination (exact
/// reconstitution for all inputs is impossible in floating point);
/// conservation of the flux divergence rests on edge-value telescoping,
/// not on this identity.
inline std::pair<FieldArray, FieldArray>
lax_friedrichs_split(const FieldArray& F, const FieldArray& U, double alpha) {
    if (F.size() != U.size())
        throw ShapeMismatch("lax_friedrichs_split: F and U lengths differ");
    FieldArray fp(F.size()), fm(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) {
        fp[i] = 0.5 * (F[i] + alpha * U[i]);
        fm[i] = 0.5 * (F[i] - alpha * U[i]);
    }
    return {std::move(fp), std::move(fm)};
}

// ---------------------------------------------------------------------------
// Ghost extension
// ---------------------------------------------------------------------------

/// Number of ghost cells materialized on each side (enough for WENO53).
constexpr int kGhost = 3;

/// Extend a field by kGhost cells per side according to the boundary
/// descriptor.  parity applies to Reflecting walls: +1 mirrors evenly
/// (zero odd derivatives at the wall), -1 oddly (zero value at the wall).
/// TransportInflow is treated as zero-order extrapolation here; the
/// transport module installs its own kinetic ghost data.
inline std::vector<double> extend_field(const FieldArray& u,
                                        const Grid1D& grid, int parity = +1) {
    const int n = static_cast<int>(u.size());
    if (n != grid.total_cells())
        throw ShapeMismatch("extend_field: field/grid size mismatch");
    if (n < kGhost)
        throw GridTooSmall("extend_field: need at least " +
                           std::to_string(kGhost) + " cells");
    std::vector<double> e(static_cast<std::size_t>(n) + 2 * kGhost);
    for (int i = 0; i < n; ++i) e[kGhost + i] = u[i];
    for (int k = 1; k <= kGhost; ++k) {
        double lo, hi;
        switch (grid.bc) {
            case BoundaryKind::Periodic:
                lo = u[n - k];
                hi = u[k - 1];
                break;
            case BoundaryKind::Reflecting:
                lo = parity * u[k - 1];
                hi = parity * u[n - k];
                break;
            default: // Extrapolate / TransportInflow
                lo = u[0];
                hi = u[n - 1];
                break;
        }
        e[kGhost - k] = lo;
        e[kGhost + n - 1 + k] = hi;
    }
    return e;
}

// ---------------------------------------------------------------------------
// WENO edge kernels (uniform spacing)
// ---------------------------------------------------------------------------

/// WENO32 reconstruction of the plus flux at the right edge of cell i from
/// (F_{i-1}, F_i, F_{i+1}).
inline double weno32_plus(double fm1, double f0, double fp1) {
    const double q0 = 0.5 * (3.0 * f0 - fm1);
    const double q1 = 0.5 * (f0 + fp1);
    const double b0 = (f0 - fm1) * (f0 - fm1);
    const double b1 = (fp1 - f0) * (fp1 - f0);
    const double a0 = (1.0 / 3.0) / ((kWenoEps + b0) * (kWenoEps + b0));
    const double a1 = (2.0 / 3.0) / ((kWenoEps + b1) * (kWenoEps + b1));
    return (a0 * q0 + a1 * q1) / (a0 + a1);
}

/// WENO53 (classic 5-point) reconstruction of the plus flux at the right
/// edge of cell i from (F_{i-2} .. F_{i+2}).
inline double weno53_plus(double fm2, double fm1, double f0, double fp1,
                          double fp2) {
    const double q0 = (2.0 * fm2 - 7.0 * fm1 + 11.0 * f0) / 6.0;
    const double q1 = (-fm1 + 5.0 * f0 + 2.0 * fp1) / 6.0;
    const double q2 = (2.0 * f0 + 5.0 * fp1 - fp2) / 6.0;
    const double c13 = 13.0 / 12.0;
    const double b0 = c13 * (fm2 - 2.0 * fm1 + f0) * (fm2 - 2.0 * fm1 + f0) +
                      0.25 * (fm2 - 4.0 * fm1 + 3.0 * f0) *
                          (fm2 - 4.0 * fm1 + 3.0 * f0);
    const double b1 = c13 * (fm1 - 2.0 * f0 + fp1) * (fm1 - 2.0 * f0 + fp1) +
                      0.25 * (fm1 - fp1) * (fm1 - fp1);
    const double b2 = c13 * (f0 - 2.0 * fp1 + fp2) * (f0 - 2.0 * fp1 + fp2) +
                      0.25 * (3.0 * f0 - 4.0 * fp1 + fp2) *
                          (3.0 * f0 - 4.0 * fp1 + fp2);
    const double a0 = 0.1 / ((kWenoEps + b0) * (kWenoEps + b0));
    const double a1 = 0.6 / ((kWenoEps + b1) * (kWenoEps + b1));
    const double a2 = 0.3 / ((kWenoEps + b2) * (kWenoEps + b2));
    return (a0 * q0 + a1 * q1 + a2 * q2) / (a0 + a1 + a2);
}

// ---------------------------------------------------------------------------
// Conservative flux divergence
// ---------------------------------------------------------------------------

/// Conservative approximation of dF/dx at every cell:
///   (Fhat_{j+1/2} - Fhat_{j-1/2}) / dx
/// with Fhat built from Lax-Friedrichs-split WENO reconstructions (the
/// minus half reconstructed on the mirrored stencil).  Cds2 bypasses the
/// splitting and returns the plain central difference of F.
/// parity_F / parity_U control reflecting-wall ghost extension.
inline FieldArray weno_flux_divergence(const FieldArray& F, const FieldArray& U,
                                       double alpha, ReconstructionOrder order,
                                       const Grid1D& grid, int parity_F = +1,
                                       int parity_U = +1) {
    const int n = static_cast<int>(F.size());
    if (U.size() != F.size())
        throw ShapeMismatch("weno_flux_divergence: F/U lengths differ");
    const double dx = grid.dx();
    const int need = (order == ReconstructionOrder::WENO53) ? 3 : 2;
    if (n < need)
        throw GridTooSmall("weno_flux_divergence: grid smaller than stencil");
    const std::vector<double> Fe = extend_field(F, grid, parity_F);
    FieldArray div(n);

    if (order == ReconstructionOrder::Cds2) {
        for (int j = 0; j < n; ++j)
            div[j] = (Fe[kGhost + j + 1] - Fe[kGhost + j - 1]) / (2.0 * dx);
        return div;
    }

    const std::vector<double> Ue = extend_field(U, grid, parity_U);
    const int ne = n + 2 * kGhost;
    std::vector<double> fp(ne), fm(ne);
    for (int i = 0; i < ne; ++i) {
        fp[i] = 0.5 * (Fe[i] + alpha * Ue[i]);
        fm[i] = 0.5 * (Fe[i] - alpha * Ue[i]);
    }
    // edge e = j + 1/2 for j = -1 .. n-1  ->  edges[0 .. n]
    std::vector<double> fhat(static_cast<std::size_t>(n) + 1);
    for (int e = 0; e <= n; ++e) {
        const int j = kGhost + e - 1; // cell left of the edge, in Fe indexing
        double plus, minus;
        if (order == ReconstructionOrder::WENO32) {
            plus = weno32_plus(fp[j - 1], fp[j], fp[j + 1]);
            minus = weno32_plus(fm[j + 2], fm[j + 1], fm[j]);
        } else {
            plus = weno53_plus(fp[j - 2], fp[j - 1], fp[j], fp[j + 1],
                               fp[j + 2]);
            minus = weno53_plus(fm[j + 3], fm[j + 2], fm[j + 1], fm[j],
                                fm[j - 1]);
        }
        fhat[e] = plus + minus;
    }
    for (int j = 0; j < n; ++j) div[j] = (fhat[j + 1] - fhat[j]) / dx;
    return div;
}

// ---------------------------------------------------------------------------
// Pointwise first derivatives
// ---------------------------------------------------------------------------

/// Central first derivative of 2nd or 4th order; the companion stencil of
/// the same-order Laplacian (the relaxation term's derivative must be
/// discretized like the diffusion operator for the stiff cancellation to
/// be exact).
inline FieldArray central_first_derivative(const FieldArray& u, int accuracy,
                                           const Grid1D& grid,
                                           int parity = +1) {
    const int n = static_cast<int>(u.size());
    const double dx = grid.dx();
    if (accuracy != 2 && accuracy != 4)
        throw ConfigError("central_first_derivative: accuracy must be 2 or 4");
    if (n < (accuracy == 2 ? 2 : 4))
        throw GridTooSmall("central_first_derivative: grid too small");
    const std::vector<double> e = extend_field(u, grid, parity);
    FieldArray d(n);
    if (accuracy == 2) {
        for (int j = 0; j < n; ++j)
            d[j] = (e[kGhost + j + 1] - e[kGhost + j - 1]) / (2.0 * dx);
    } else {
        for (int j = 0; j < n; ++j)
            d[j] = (-e[kGhost + j + 2] + 8.0 * e[kGhost + j + 1] -
                    8.0 * e[kGhost + j - 1] + e[kGhost + j - 2]) /
                   (12.0 * dx);
    }
    return d;
}

/// Pointwise derivative in the requested reconstruction family.
///   Cds2   -> 2nd-order central difference;
///   WENO32 -> cell j's 2-candidate WENO polynomial differenced at its
///             own two edges (2nd order, central-2 in the smooth limit);
///   WENO53 -> cell j's 3-candidate WENO polynomial differenced at its
///             own two edges (central-4 in the smooth limit).
inline FieldArray first_derivative(const FieldArray& u,
                                   ReconstructionOrder order,
                                   const Grid1D& grid, int parity = +1) {
    const int n = static_cast<int>(u.size());
    const double dx = grid.dx();
    if (n < ((order == ReconstructionOrder::WENO53) ? 5 : 3))
        throw GridTooSmall("first_derivative: grid smaller than stencil");
    if (order == ReconstructionOrder::Cds2)
        return central_first_derivative(u, 2, grid, parity);
    const std::vector<double> e = extend_field(u, grid, parity);
    FieldArray d(n);
    if (order == ReconstructionOrder::WENO32) {
        for (int j = 0; j < n; ++j) {
            const double a = e[kGhost + j - 1], b = e[kGhost + j],
                         c = e[kGhost + j + 1];
            const double b0 = (b - a) * (b - a), b1 = (c - b) * (c - b);
            const double qR0 = 0.5 * (3.0 * b - a), qR1 = 0.5 * (b + c);
            const double qL0 = 0.5 * (a + b), qL1 = 0.5 * (3.0 * b - c);
            const double wR0 =
                (1.0 / 3.0) / ((kWenoEps + b0) * (kWenoEps + b0));
            const double wR1 =
                (2.0 / 3.0) / ((kWenoEps + b1) * (kWenoEps + b1));
            const double wL0 =
                (2.0 / 3.0) / ((kWenoEps + b0) * (kWenoEps + b0));
            const double wL1 =
                (1.0 / 3.0) / ((kWenoEps + b1) * (kWenoEps + b1));
            const double R = (wR0 * qR0 + wR1 * qR1) / (wR0 + wR1);
            const double L = (wL0 * qL0 + wL1 * qL1) / (wL0 + wL1);
            d[j] = (R - L) / dx;
        }
        return d;
    }
    for (int j = 0; j < n; ++j) {
        const double a = e[kGhost + j - 2], b = e[kGhost + j - 1],
                     c = e[kGhost + j], dd = e[kGhost + j + 1],
                     f = e[kGhost + j + 2];
        const double c13 = 13.0 / 12.0;
        const double b0 = c13 * (a - 2 * b + c) * (a - 2 * b + c) +
                          0.25 * (a - 4 * b + 3 * c) * (a - 4 * b + 3 * c);
        const double b1 = c13 * (b - 2 * c + dd) * (b - 2 * c + dd) +
                          0.25 * (b - dd) * (b - dd);
        const double b2 = c13 * (c - 2 * dd + f) * (c - 2 * dd + f) +
                          0.25 * (3 * c - 4 * dd + f) * (3 * c - 4 * dd + f);
        const double qR0 = (2 * a - 7 * b + 11 * c) / 6.0;
        const double qR1 = (-b + 5 * c + 2 * dd) / 6.0;
        const double qR2 = (2 * c + 5 * dd - f) / 6.0;
        const double qL0 = (-a + 5 * b + 2 * c) / 6.0;
        const double qL1 = (2 * b + 5 * c - dd) / 6.0;
        const double qL2 = (11 * c - 7 * dd + 2 * f) / 6.0;
        const double wR0 = 0.1 / ((kWenoEps + b0) * (kWenoEps + b0));
        const double wR1 = 0.6 / ((kWenoEps + b1) * (kWenoEps + b1));
        const double wR2 = 0.3 / ((kWenoEps + b2) * (kWenoEps + b2));
        const double wL0 = 0.3 / ((kWenoEps + b0) * (kWenoEps + b0));
        const double wL1 = 0.6 / ((kWenoEps + b1) * (kWenoEps + b1));
        const double wL2 = 0.1 / ((kWenoEps + b2) * (kWenoEps + b2));
        const double R =
            (wR0 * qR0 + wR1 * qR1 + wR2 * qR2) / (wR0 + wR1 + wR2);
        const double L =
            (wL0 * qL0 + wL1 * qL1 + wL2 * qL2) / (wL0 + wL1 + wL2);
        d[j] = (R - L) / dx;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Discrete Laplacians
// ---------------------------------------------------------------------------

/// Discrete Laplacian of accuracy 2 (3-point) or 4 (5-point).  Requires a
/// uniform grid: stencils must not straddle a segment break (the transport
/// module handles material interfaces with dedicated one-sided formulas).
inline FieldArray laplacian(const FieldArray& u, int accuracy,
                            const Grid1D& grid, int parity = +1) {
    if (accuracy != 2 && accuracy != 4)
        throw ConfigError("laplacian: accuracy must be 2 or 4");
    if (grid.segments.size() > 1 && !grid.is_uniform())
        throw NonUniformStencil("laplacian: stencil would straddle a "
                                "segment break on a non-uniform grid");
    const int n = static_cast<int>(u.size());
    if (n < (accuracy == 2 ? 3 : 5))
        throw GridTooSmall("laplacian: grid smaller than stencil");
    const double dx = grid.dx();
    const std::vector<double> e = extend_field(u, grid, parity);
    FieldArray l(n);
    if (accuracy == 2) {
        for (int j = 0; j < n; ++j)
            l[j] = (e[kGhost + j - 1] - 2.0 * e[kGhost + j] +
                    e[kGhost + j + 1]) /
                   (dx * dx);
    } else {
        for (int j = 0; j < n; ++j)
            l[j] = (-e[kGhost + j - 2] + 16.0 * e[kGhost + j - 1] -
                    30.0 * e[kGhost + j] + 16.0 * e[kGhost + j + 1] -
                    e[kGhost + j + 2]) /
                   (12.0 * dx * dx);
    }
    return l;
}

} // namespace diffrelax

#endif // DIFFRELAX_RECONSTRUCTION_HPP
