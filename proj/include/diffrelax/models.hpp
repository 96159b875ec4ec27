#ifndef DIFFRELAX_MODELS_HPP
#define DIFFRELAX_MODELS_HPP
// ============================================================================
//  models.hpp -- hyperbolic relaxation systems with diffusive scaling
//
//  The scalar model solved by this library is the 2x2 relaxation system
//
//      u_t + v_x             = 0
//      v_t + p(u)_x / eps^2  = g(u, v) / eps^2
//
//  with either an affine relaxation source
//
//      g(u, v) = q(u) - v - p(u)_x * 0   (the p_x term is carried on the
//                                         left; the effective source seen by
//                                         the solver is G(u) - v with
//                                         G(u) = q(u) - d/dx p(u))
//
//  or the quadratic two-velocity kinetic source
//
//      g(u, v) = -2 k0 [ v - (C/2) (u^2 - eps^2 v^2) ] - d/dx p(u).
//
//  As eps -> 0 the system relaxes onto v = G(u) and u obeys the
//  advection--diffusion limit  u_t + q(u)_x = (d2 * p(u)_x)_x with d2 = 1
//  for the affine source and d2 = 1/(2 k0) for the quadratic one.
//
//  This header holds the problem descriptions (coefficients, initial data,
//  boundary type, domain) plus the grid-free reference solutions used by the
//  convergence studies: the exact single-mode solution of the full system,
//  a truncated Fourier-series solution for periodic affine problems, the
//  free-space heat profile, the traveling-wave limit profile, and the exact
//  viscous-Burgers step solution (log-derivative form).
// ============================================================================

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace diffrelax {

// ---------------------------------------------------------------------------
//  Problem description
// ---------------------------------------------------------------------------

/// Algebraic form of the relaxation source g(u, v).
enum class GFormKind {
    Affine,      ///< g = q(u) - v - d/dx p(u)  (folded: G(u) - v)
    RuijgrokWu,  ///< g = -2 k0 [v - (C/2)(u^2 - eps^2 v^2)] - d/dx p(u)
};

inline std::string to_string(GFormKind k)
{
    return k == GFormKind::Affine ? "affine" : "ruijgrok_wu";
}

/// Dynamic state of the 2x2 system on a grid: nodal u, v and the time.
struct RelaxState {
    FieldArray u;
    FieldArray v;
    double t = 0.0;
};

/// A scalar relaxation problem: flux/advection coefficients, relaxation
/// source, initial data and domain.  The initial v profile receives the
/// problem's current eps so that data stays consistent under eps sweeps.
struct RelaxProblem {
    std::string name;

    std::function<double(double)> p;   ///< diffusive flux p(u)
    std::function<double(double)> dp;  ///< p'(u)
    std::function<double(double)> q;   ///< advective flux q(u)
    std::function<double(double)> dq;  ///< q'(u)

    /// True when p(u) = c*u (c = dp(0)): stage solves are a single banded
    /// solve.  False routes the stage through the damped-Newton path.
    bool p_is_linear = false;

    double eps = 1e-3;                 ///< relaxation scale (eps^2 multiplies v_t)
    GFormKind g_form = GFormKind::Affine;
    double k0 = 1.0;                   ///< quadratic-source rate (RuijgrokWu)
    double C = 1.0;                    ///< quadratic-source coupling (RuijgrokWu)
    double d2 = 1.0;                   ///< diffusion prefactor of the limit equation

    std::function<double(double)> u0;          ///< initial u(x)
    std::function<double(double, double)> v0;  ///< initial v(x, eps)

    double x_min = 0.0;
    double x_max = 1.0;
    BoundaryKind bc = BoundaryKind::Periodic;

    /// True when v0 sits on the relaxation manifold of the smooth data
    /// (shock data starts off-manifold at the jump).
    bool well_prepared = false;
};

// ---------------------------------------------------------------------------
//  Grids and sampling
// ---------------------------------------------------------------------------

/// Uniform periodic grid whose cell CENTERS are the classic sample nodes
/// x_j = x0 + j * (L / n), j = 0..n-1.  (The cell faces are shifted half a
/// cell to the left so that the first center lands exactly on x0.)
inline Grid1D periodic_node_grid(double x0, double length, int n)
{
    if (n < 1) throw GridTooSmall("periodic_node_grid: need at least one cell");
    const double dx = length / n;
    return Grid1D::uniform(x0 - 0.5 * dx, x0 + length - 0.5 * dx, n,
                           BoundaryKind::Periodic);
}

/// Sample the problem's initial data at the grid cell centers.
inline RelaxState initial_state(const RelaxProblem& prob, const Grid1D& grid)
{
    const int n = grid.total_cells();
    RelaxState s;
    s.u.resize(n);
    s.v.resize(n);
    s.t = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = grid.cell_center(i);
        s.u[i] = prob.u0(x);
        s.v[i] = prob.v0(x, prob.eps);
    }
    return s;
}

/// Check |q'(u)|^2 eps^2 < p'(u) over [u_lo, u_hi] (sub-characteristic
/// condition of the affine relaxation source).  Sampled on a fine lattice;
/// violations throw ConfigError.
inline void assert_subcharacteristic(const RelaxProblem& prob,
                                     double u_lo, double u_hi)
{
    if (prob.g_form != GFormKind::Affine) return;  // recorded, not asserted
    const int samples = 257;
    for (int i = 0; i < samples; ++i) {
        const double u = u_lo + (u_hi - u_lo) * i / (samples - 1);
        const double a = prob.dq(u) * prob.eps;
        if (!(a * a < prob.dp(u)))
            throw ConfigError("sub-characteristic condition violated at u = " +
                              std::to_string(u) + " (eps = " +
                              std::to_string(prob.eps) + ")");
    }
}

// ---------------------------------------------------------------------------
//  Built-in problems
// ---------------------------------------------------------------------------

/// p(u) = u, q = 0 on [0, 2pi] periodic; u0 = cos x, v0 = sin x (= -u0_x,
/// exactly on the relaxation manifold).  Limit equation: u_t = u_xx.
inline RelaxProblem make_linear_diffusion()
{
    RelaxProblem prob;
    prob.name = "linear_diffusion";
    prob.p = [](double u) { return u; };
    prob.dp = [](double) { return 1.0; };
    prob.p_is_linear = true;
    prob.q = [](double) { return 0.0; };
    prob.dq = [](double) { return 0.0; };
    prob.eps = 1e-3;
    prob.g_form = GFormKind::Affine;
    prob.d2 = 1.0;
    prob.u0 = [](double x) { return std::cos(x); };
    prob.v0 = [](double x, double) { return std::sin(x); };
    prob.x_min = 0.0;
    prob.x_max = 2.0 * M_PI;
    prob.bc = BoundaryKind::Periodic;
    prob.well_prepared = true;
    assert_subcharacteristic(prob, -1.0, 1.0);
    return prob;
}

/// Width parameter of the advection--diffusion bump data.
inline constexpr double kBumpSigma = 0.05;

/// p(u) = q(u) = u on [0, 2pi] periodic with the sharp bump
///   u0 = exp(-(1 + cos(x - pi)) / sigma),  sigma = 0.05,
///   v0 = u0 * (1 - sin(x - pi) / sigma)  (manifold value q(u0) - u0_x).
/// Limit equation: u_t + u_x = u_xx.
inline RelaxProblem make_advection_diffusion()
{
    RelaxProblem prob;
    prob.name = "advection_diffusion";
    prob.p = [](double u) { return u; };
    prob.dp = [](double) { return 1.0; };
    prob.p_is_linear = true;
    prob.q = [](double u) { return u; };
    prob.dq = [](double) { return 1.0; };
    prob.eps = 1e-3;
    prob.g_form = GFormKind::Affine;
    prob.d2 = 1.0;
    prob.u0 = [](double x) {
        return std::exp(-(1.0 + std::cos(x - M_PI)) / kBumpSigma);
    };
    prob.v0 = [](double x, double) {
        const double u = std::exp(-(1.0 + std::cos(x - M_PI)) / kBumpSigma);
        return u * (1.0 - std::sin(x - M_PI) / kBumpSigma);
    };
    prob.x_min = 0.0;
    prob.x_max = 2.0 * M_PI;
    prob.bc = BoundaryKind::Periodic;
    prob.well_prepared = true;
    assert_subcharacteristic(prob, 0.0, 1.0);
    return prob;
}

/// Riemann data for the heat limit: p(u) = u, q = 0 on [-1, 1] with
/// reflecting walls, u0 = 2 (x < 0) / 1 (x > 0), v0 = 0.  The data jump
/// sits on a cell edge for every even cell count.
inline RelaxProblem make_riemann_heat()
{
    RelaxProblem prob;
    prob.name = "riemann_heat";
    prob.p = [](double u) { return u; };
    prob.dp = [](double) { return 1.0; };
    prob.p_is_linear = true;
    prob.q = [](double) { return 0.0; };
    prob.dq = [](double) { return 0.0; };
    prob.eps = 1e-3;
    prob.g_form = GFormKind::Affine;
    prob.d2 = 1.0;
    prob.u0 = [](double x) { return x < 0.0 ? 2.0 : 1.0; };
    prob.v0 = [](double, double) { return 0.0; };
    prob.x_min = -1.0;
    prob.x_max = 1.0;
    prob.bc = BoundaryKind::Reflecting;
    prob.well_prepared = false;
    assert_subcharacteristic(prob, 1.0, 2.0);
    return prob;
}

/// Two-velocity kinetic model with the quadratic source
///   g = -2 k0 [v - (C/2)(u^2 - eps^2 v^2)] - p(u)_x,  p(u) = u,
/// on [-10, 10] with outflow (extrapolation) boundaries and step data
/// u0 = 2 (x < 0) / 1 (x > 0).  v0 is the local root of the quadratic
/// source, written in the rationalized form
///   v0 = u^2 C / (1 + sqrt(1 + u^2 eps^2 C^2))
/// which is analytic at eps = 0 (limit C u^2 / 2) and equals the textbook
/// expression [sqrt(1 + u^2 eps^2 C^2) - 1] / (eps^2 C) for eps > 0.
/// Limit equation: u_t + (C u^2 / 2)_x = u_xx / (2 k0)  -- viscous Burgers.
inline RelaxProblem make_ruijgrok_wu(double k0 = 1.0, double C = 1.0)
{
    if (!(k0 > 0.0))
        throw ConfigError("make_ruijgrok_wu: k0 must be positive");
    RelaxProblem prob;
    prob.name = "ruijgrok_wu";
    prob.p = [](double u) { return u; };
    prob.dp = [](double) { return 1.0; };
    prob.p_is_linear = true;
    prob.q = [](double) { return 0.0; };
    prob.dq = [](double) { return 0.0; };
    prob.eps = 1e-3;
    prob.g_form = GFormKind::RuijgrokWu;
    prob.k0 = k0;
    prob.C = C;
    prob.d2 = 1.0 / (2.0 * k0);
    prob.u0 = [](double x) { return x < 0.0 ? 2.0 : 1.0; };
    prob.v0 = [C](double x, double eps) {
        const double u = (x < 0.0) ? 2.0 : 1.0;
        const double s = u * eps * C;
        return u * u * C / (1.0 + std::sqrt(1.0 + s * s));
    };
    prob.x_min = -10.0;
    prob.x_max = 10.0;
    prob.bc = BoundaryKind::Extrapolate;
    prob.well_prepared = false;
    return prob;
}

// ---------------------------------------------------------------------------
//  2x2 matrix exponential (complex, closed form)
// ---------------------------------------------------------------------------

namespace detail {

using cplx = std::complex<double>;

/// exp(t * M) for a complex 2x2 matrix M = [[a, b], [c, d]] via the
/// eigen-decomposition, with the quadratic roots computed cancellation-free
/// (larger-magnitude root first, companion root from the determinant) and a
/// first-order Jordan form when the eigenvalues coincide to roundoff.
struct Expm2 {
    cplx e00, e01, e10, e11;
};

inline Expm2 expm2(cplx a, cplx b, cplx c, cplx d, double t)
{
    const cplx tr = a + d;
    const cplx det = a * d - b * c;
    const cplx disc = tr * tr - 4.0 * det;
    const cplx s = std::sqrt(disc);
    // Root of larger magnitude: add s with the sign that avoids cancellation.
    const cplx big = (std::real(std::conj(tr) * s) >= 0.0) ? tr + s : tr - s;
    cplx l1, l2;
    if (std::abs(big) == 0.0) {
        l1 = l2 = 0.5 * tr;
    } else {
        l1 = 0.5 * big;
        l2 = det / l1;
    }
    Expm2 E;
    const double scale = std::abs(l1) + std::abs(l2);
    if (std::abs(l1 - l2) <= 1e-13 * scale || scale == 0.0) {
        // Degenerate pair: exp(tM) = e^{lt} (I + t (M - l I)), l = tr / 2.
        const cplx l = 0.5 * tr;
        const cplx elt = std::exp(l * t);
        E.e00 = elt * (1.0 + t * (a - l));
        E.e01 = elt * (t * b);
        E.e10 = elt * (t * c);
        E.e11 = elt * (1.0 + t * (d - l));
        return E;
    }
    const cplx e1 = std::exp(l1 * t);
    const cplx e2 = std::exp(l2 * t);
    const cplx den = l1 - l2;
    // exp(tM) = e1 (M - l2 I)/(l1 - l2) + e2 (l1 I - M)/(l1 - l2)
    E.e00 = (e1 * (a - l2) + e2 * (l1 - a)) / den;
    E.e01 = (e1 - e2) * b / den;
    E.e10 = (e1 - e2) * c / den;
    E.e11 = (e1 * (d - l2) + e2 * (l1 - d)) / den;
    return E;
}

}  // namespace detail

// ---------------------------------------------------------------------------
//  Reference solutions
// ---------------------------------------------------------------------------

/// Exact solution of the FULL relaxation system for the single-mode data
/// u0 = cos x, v0 = sin x (p(u) = u, q = 0): the mode amplitudes obey
/// (U, V)' = [[0, -1], [1/eps^2, -1/eps^2]] (U, V) with (U, V)(0) = (1, 1),
/// and u(x, t) = U(t) cos x, v(x, t) = V(t) sin x.  At eps = 0 this reduces
/// to the exact heat profile e^{-t} cos x.
inline RelaxState linear_diffusion_reference(const Grid1D& grid, double t,
                                             double eps)
{
    const int n = grid.total_cells();
    RelaxState out;
    out.u.resize(n);
    out.v.resize(n);
    out.t = t;
    double U, V;
    if (eps == 0.0) {
        U = std::exp(-t);
        V = U;
    } else {
        const double ie2 = 1.0 / (eps * eps);
        const detail::Expm2 E =
            detail::expm2(detail::cplx(0.0, 0.0), detail::cplx(-1.0, 0.0),
                          detail::cplx(ie2, 0.0), detail::cplx(-ie2, 0.0), t);
        U = std::real(E.e00 + E.e01);
        V = std::real(E.e10 + E.e11);
    }
    for (int i = 0; i < n; ++i) {
        const double x = grid.cell_center(i);
        out.u[i] = U * std::cos(x);
        out.v[i] = V * std::sin(x);
    }
    return out;
}

/// Quadrature resolution of the Fourier reference (trapezoid rule = exact
/// DFT for smooth periodic integrands).
inline constexpr int kFourierQuadrature = 4096;

/// Truncated Fourier-series solution of the full system for a periodic
/// problem with LINEAR fluxes p(u) = cp u, q(u) = cq u: every mode k obeys
///   U_k' = -i kh V_k,   eps^2 V_k' = (-i kh cp + cq) U_k - V_k,
/// kh = 2 pi k / L, solved exactly per mode and resummed at the grid cell
/// centers.  `modes` is the truncation half-width K (modes |k| <= K evolve;
/// the data coefficients above K are dropped, which for the built-in data
/// is far below double precision by K = 64).
inline RelaxState fourier_reference(const RelaxProblem& prob, const Grid1D& grid,
                                    int modes, double t, double eps)
{
    if (prob.g_form != GFormKind::Affine)
        throw ConfigError("fourier_reference: affine relaxation source required");
    if (prob.bc != BoundaryKind::Periodic)
        throw ConfigError("fourier_reference: periodic problem required");
    const int M = kFourierQuadrature;
    if (modes < 0 || 2 * modes >= M)
        throw ConfigError("fourier_reference: mode truncation out of range");
    const double L = prob.x_max - prob.x_min;
    const double cp = prob.dp(0.0);
    const double cq = prob.dq(0.0);

    // Data samples on the quadrature lattice.
    std::vector<double> us(M), vs(M);
    for (int m = 0; m < M; ++m) {
        const double x = prob.x_min + L * m / M;
        us[m] = prob.u0(x);
        vs[m] = prob.v0(x, eps);
    }

    const int n = grid.total_cells();
    std::vector<detail::cplx> acc_u(n, detail::cplx(0.0, 0.0));
    std::vector<detail::cplx> acc_v(n, detail::cplx(0.0, 0.0));
    const double two_pi = 2.0 * M_PI;

    for (int k = -modes; k <= modes; ++k) {
        // DFT coefficients c_k = (1/M) sum f(x_m) e^{-2 pi i k m / M}.
        detail::cplx cu(0.0, 0.0), cv(0.0, 0.0);
        for (int m = 0; m < M; ++m) {
            const double phase = -two_pi * k * m / M;
            const detail::cplx w(std::cos(phase), std::sin(phase));
            cu += us[m] * w;
            cv += vs[m] * w;
        }
        cu /= static_cast<double>(M);
        cv /= static_cast<double>(M);

        const double kh = two_pi * k / L;
        detail::cplx Ut, Vt;
        if (eps == 0.0) {
            // Limit branch: v slaved to (cq - i kh cp) u, u decays exactly.
            const detail::cplx lam(-kh * kh * cp, -kh * cq);
            Ut = cu * std::exp(lam * t);
            Vt = detail::cplx(cq, -kh * cp) * Ut;
        } else {
            const double ie2 = 1.0 / (eps * eps);
            const detail::Expm2 E = detail::expm2(
                detail::cplx(0.0, 0.0), detail::cplx(0.0, -kh),
                detail::cplx(cq * ie2, -kh * cp * ie2),
                detail::cplx(-ie2, 0.0), t);
            Ut = E.e00 * cu + E.e01 * cv;
            Vt = E.e10 * cu + E.e11 * cv;
        }

        for (int i = 0; i < n; ++i) {
            const double x = grid.cell_center(i) - prob.x_min;
            const detail::cplx w(std::cos(kh * x), std::sin(kh * x));
            acc_u[i] += Ut * w;
            acc_v[i] += Vt * w;
        }
    }

    RelaxState out;
    out.u.resize(n);
    out.v.resize(n);
    out.t = t;
    for (int i = 0; i < n; ++i) {
        out.u[i] = std::real(acc_u[i]);
        out.v[i] = std::real(acc_v[i]);
    }
    return out;
}

/// Free-space heat profile for the step 2 -> 1 released at x = 0:
/// u(x, t) = 1 + erfc(x / (2 sqrt t)) / 2 (valid while the walls are quiet).
inline double riemann_heat_freespace(double x, double t)
{
    if (!(t > 0.0)) return x < 0.0 ? 2.0 : 1.0;
    return 1.0 + 0.5 * std::erfc(x / (2.0 * std::sqrt(t)));
}

/// Traveling-wave profile of the quadratic-source limit equation
/// (viscous Burgers with viscosity 1/(2 k0)) joining 2 (left) to 1 (right):
/// u = 3/2 - tanh(k0 (x - 3 t / 2) / 2) / 2.
inline double ruijgrok_wu_tanh_wave(double x, double t, double k0)
{
    return 1.5 - 0.5 * std::tanh(0.5 * k0 * (x - 1.5 * t));
}

namespace detail {

/// Scaled complementary error function erfcx(a) = e^{a^2} erfc(a) for the
/// argument range of the step-data Burgers solution (|a| <~ 26).
inline double erfcx(double a)
{
    if (a >= 0.0) {
        if (a > 26.0) {
            // Asymptotic series; erfc underflows but the ratio is benign.
            const double ia2 = 1.0 / (a * a);
            return (1.0 - 0.5 * ia2 * (1.0 - 1.5 * ia2)) /
                   (a * std::sqrt(M_PI));
        }
        return std::erfc(a) * std::exp(a * a);
    }
    // Reflection erfcx(-a) = 2 e^{a^2} - erfcx(a); overflows past a ~ -26.6,
    // outside the supported domain.
    return 2.0 * std::exp(a * a) - erfcx(-a);
}

/// log(x + y) from log x and log y without overflow.
inline double logaddexp(double lx, double ly)
{
    const double m = std::max(lx, ly);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    return m + std::log1p(std::exp(std::min(lx, ly) - m));
}

/// log of the heat-kernel potential of the step data 2 -> 1 under the
/// Cole transformation with viscosity d: phi = e^{4dt - 2x} erfc((x-4dt)/s)/2
/// + e^{dt - x} erfc((-x+2dt)/s)/2, s = sqrt(4 d t), evaluated erfcx-stably.
inline double burgers_log_potential(double x, double t, double d)
{
    const double s = std::sqrt(4.0 * d * t);
    const double a1 = (x - 4.0 * d * t) / s;
    const double a2 = (-x + 2.0 * d * t) / s;
    const double L1 =
        4.0 * d * t - 2.0 * x + std::log(0.5) + std::log(erfcx(a1)) - a1 * a1;
    const double L2 =
        d * t - x + std::log(0.5) + std::log(erfcx(a2)) - a2 * a2;
    return logaddexp(L1, L2);
}

}  // namespace detail

/// Exact solution of u_t + (u^2/2)_x = d u_xx for the step data 2 -> 1 at
/// x = 0, via the log-derivative of the transformed heat solution
/// (u = -2 d dln(phi)/dx, centered difference with h = 1e-5).
inline double viscous_burgers_step_reference(double x, double t, double d)
{
    if (!(t > 0.0)) return x < 0.0 ? 2.0 : 1.0;
    const double h = 1e-5;
    return -2.0 * d *
           (detail::burgers_log_potential(x + h, t, d) -
            detail::burgers_log_potential(x - h, t, d)) /
           (2.0 * h);
}

}  // namespace diffrelax

#endif  // DIFFRELAX_MODELS_HPP
