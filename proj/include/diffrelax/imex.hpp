#ifndef DIFFRELAX_IMEX_HPP
#define DIFFRELAX_IMEX_HPP
// ============================================================================
//  imex.hpp -- IMEX Runge--Kutta steppers for the relaxation system
//
//  Two steppers are provided.
//
//  step_partitioned advances the system in its original variables,
//
//      u_t = -v_x                          (explicit tableau)
//      v_t = [G(u) - v] / eps^2            (implicit tableau)
//
//  with G(u) = q(u) - d/dx p(u).  The flux derivative is the backward
//  difference and the constraint derivative the forward difference; the
//  pair composes to the compact 3-point Laplacian, so at eps = 0 the
//  u-update is EXACTLY the explicit half of the tableau applied to the
//  limit equation (and inherits its parabolic time-step restriction).
//
//  step_bpr advances the reformulated system in which the stabilizing
//  diffusion mu * d2 * (p(u)_x)_x is added explicitly inside the u-flux and
//  subtracted implicitly,
//
//      u_t = -[v + mu d2 p(u)_x]_x  +  mu d2 (p(u)_x)_x
//             \___ explicit f1 ___/    \_ implicit f2 _/
//      v_t = g(u, v) / eps^2                 (implicit)
//
//  so the eps = 0 limit becomes a stiffly accurate DIRK on the limit
//  equation with no parabolic restriction.  mu = exp(-eps^2 / dx) is
//  frozen per step.
//
//  Stage algebra.  The implicit v-solves are closed-form: with
//  acch_k = v_n + dt sum_{j<k} a_kj gh_j (gh = g / eps^2) the affine source
//  gives gh_k = (G_k - acch_k) / (eps^2 + dt a_kk), which is regular at
//  eps = 0 whenever a_kk != 0.  Tableaux whose first implicit stage is
//  trivial (a_11 = 0, ARS and CK types) take V_1 = v_n; at eps = 0 the CK
//  type then propagates the TRUE first-stage source residual
//  g_1 = G(u_n) - v_n down the stages with the cascade coefficients
//  -Ahat^{-1} a (see tableau.hpp), which keeps every quantity finite
//  without dividing by eps^2.  The quadratic kinetic source is solved
//  per node by the cancellation-free quadratic formula; its root is
//  analytic in eps^2 and reduces to the affine solution at eps = 0.
//
//  The u-stage solve (I - dt a_kk mu d2 L p') U = acc is one banded solve
//  for linear p and a damped Newton iteration with banded Jacobian
//  otherwise.  Uniform grids only (the transport module owns the
//  multi-segment machinery).
// ============================================================================

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "linalg.hpp"
#include "models.hpp"
#include "reconstruction.hpp"
#include "tableau.hpp"

namespace diffrelax {

// ---------------------------------------------------------------------------
//  Scheme configuration
// ---------------------------------------------------------------------------

/// How the stabilizing diffusion enters the explicit u-flux of step_bpr.
enum class FluxForm {
    Split,     ///< f1 = -div(v) - mu d2 Lap p(u): matched split form
    Internal,  ///< f1 = -div(v + mu d2 p(u)_x): derivative inside the flux
};

/// Derivative kernel for p(u)_x inside the flux (Internal form only).
enum class DerivKind {
    Central,  ///< central difference matching the Laplacian accuracy
    Weno,     ///< the cell's own WENO polynomial differenced at its edges
};

/// Spatial-operator family of step_bpr.
enum class StencilPair {
    Standard,     ///< reconstruction-based flux + central constraint derivative
    AdjointPair,  ///< backward-difference flux, forward constraint derivative,
                  ///< compact Laplacian: the three symbols compose exactly,
                  ///< making the single-mode step equal the 2x2 mode matrix
};

/// Which stepper integrate() drives.
enum class StepMode { BPR, Partitioned };

inline std::string to_string(StepMode m)
{
    return m == StepMode::BPR ? "bpr" : "partitioned";
}

/// Discretization knobs of the reformulated stepper.  Defaults match the
/// second-order smooth-problem configuration; the convergence tables at
/// third order switch to laplacian_accuracy = 4, and the shock problems
/// additionally select the WENO in-flux derivative.
struct SchemeOptions {
    FluxForm flux_form = FluxForm::Internal;
    DerivKind flux_derivative = DerivKind::Central;
    int laplacian_accuracy = 2;  ///< 2 or 4; also the central-derivative order
    double lf_alpha = 1.0;       ///< Lax-Friedrichs split speed
    StencilPair stencils = StencilPair::Standard;
    /// mu is frozen per step at mu_of_eps(eps, dx); a value in [0, 1] here
    /// overrides it (mode-analysis laboratory only).
    double mu_override = -1.0;
};

/// Per-step diagnostics.
struct StepReport {
    double dt = 0.0;
    double manifold_residual = 0.0;  ///< ||g(u_{n+1}, v_{n+1})||_inf (true g)
    int newton_iterations = 0;       ///< max Newton count over stages (0: linear p)
    int implicit_solves = 0;         ///< banded stage solves performed
};

// ---------------------------------------------------------------------------
//  Derivative helpers
// ---------------------------------------------------------------------------

namespace detail {

/// Forward difference (e_{i+1} - e_i) / dx on the ghost-extended field.
inline FieldArray forward_difference(const FieldArray& u, const Grid1D& grid,
                                     int parity)
{
    const int n = static_cast<int>(u.size());
    const double dx = grid.dx();
    const std::vector<double> e = extend_field(u, grid, parity);
    FieldArray out(n);
    for (int i = 0; i < n; ++i)
        out[i] = (e[kGhost + i + 1] - e[kGhost + i]) / dx;
    return out;
}

/// Backward difference (e_i - e_{i-1}) / dx on the ghost-extended field.
inline FieldArray backward_difference(const FieldArray& u, const Grid1D& grid,
                                      int parity)
{
    const int n = static_cast<int>(u.size());
    const double dx = grid.dx();
    const std::vector<double> e = extend_field(u, grid, parity);
    FieldArray out(n);
    for (int i = 0; i < n; ++i)
        out[i] = (e[kGhost + i] - e[kGhost + i - 1]) / dx;
    return out;
}

/// Banded image of the boundary-folded Laplacian, probed column by column
/// through the ghost-extension machinery.  Periodic wraps that fall outside
/// the band are collected as corner entries.
struct BandOperator {
    int n = 0;
    int half = 0;                      ///< bandwidth (1: 3-point, 2: 5-point)
    std::vector<double> band;          ///< (2 half + 1) x n, diag offset major
    std::vector<CornerEntry> corners;  ///< periodic wrap entries

    double entry(int d, int j) const { return band[(d + half) * n + j]; }
};

inline BandOperator probe_laplacian(const Grid1D& grid, int accuracy,
                                    int parity)
{
    const int n = grid.total_cells();
    BandOperator op;
    op.n = n;
    op.half = (accuracy == 2) ? 1 : 2;
    op.band.assign(static_cast<std::size_t>(2 * op.half + 1) * n, 0.0);
    FieldArray e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        const FieldArray col = laplacian(e, accuracy, grid, parity);
        e[j] = 0.0;
        for (int i = 0; i < n; ++i) {
            if (col[i] == 0.0) continue;
            if (std::abs(i - j) <= op.half)
                op.band[static_cast<std::size_t>(i - j + op.half) * n + j] =
                    col[i];
            else
                op.corners.push_back({i, j, col[i]});
        }
    }
    return op;
}

/// Factored solver for (I - c * L * diag(w)), w a per-column weight
/// (p'(U) for the Newton Jacobian, all ones with c absorbing a linear p).
inline PeriodicBandedLU factor_shifted(const BandOperator& L, double c,
                                       const std::vector<double>* w = nullptr)
{
    BandedLU core(L.n, L.half, L.half);
    for (int j = 0; j < L.n; ++j) {
        const double wj = w ? (*w)[j] : 1.0;
        for (int d = -L.half; d <= L.half; ++d) {
            const int i = j + d;
            if (i < 0 || i >= L.n) continue;
            const double lij = L.entry(d, j);
            core.set(i, j, (i == j ? 1.0 : 0.0) - c * lij * wj);
        }
    }
    std::vector<CornerEntry> corners;
    corners.reserve(L.corners.size());
    for (const CornerEntry& ce : L.corners) {
        const double wj = w ? (*w)[ce.j] : 1.0;
        corners.push_back({ce.i, ce.j, -c * ce.value * wj});
    }
    return PeriodicBandedLU(std::move(core), corners);
}

inline double linf(const FieldArray& u)
{
    double m = 0.0;
    for (double x : u) m = std::max(m, std::abs(x));
    return m;
}

inline bool all_finite(const FieldArray& u)
{
    for (double x : u)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
//  Shared stage machinery
// ---------------------------------------------------------------------------

namespace detail {

/// Evaluate the g-side derivative of p(U): central of the configured order,
/// or the forward difference in the adjoint-pair configuration.  (Design
/// rule: the constraint-side derivative is never reconstruction-based.)
inline FieldArray constraint_derivative(const FieldArray& pU,
                                        const Grid1D& grid,
                                        const SchemeOptions& opts)
{
    if (opts.stencils == StencilPair::AdjointPair)
        return forward_difference(pU, grid, +1);
    return central_first_derivative(pU, opts.laplacian_accuracy, grid, +1);
}

/// True relaxation source g(u, v) at one node (DpU = d/dx p(u) there).
inline double true_source(const RelaxProblem& prob, double u, double v,
                          double DpU)
{
    if (prob.g_form == GFormKind::Affine) return prob.q(u) - DpU - v;
    const double e2 = prob.eps * prob.eps;
    return -2.0 * prob.k0 * (v - 0.5 * prob.C * (u * u - e2 * v * v)) - DpU;
}

/// Post-step manifold residual ||g||_inf.
inline double manifold_residual(const RelaxProblem& prob, const FieldArray& u,
                                const FieldArray& v, const Grid1D& grid,
                                const SchemeOptions& opts)
{
    const int n = static_cast<int>(u.size());
    FieldArray pU(n);
    for (int i = 0; i < n; ++i) pU[i] = prob.p(u[i]);
    const FieldArray Dp = constraint_derivative(pU, grid, opts);
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        m = std::max(m, std::abs(true_source(prob, u[i], v[i], Dp[i])));
    return m;
}

/// Closed-form implicit solve of the v-stage for one node.
/// Affine source:   gh = (G - acch) / (eps^2 + dt a_kk).
/// Quadratic source: stable root of A' h^2 + B' h + C' = 0 in h = gh.
struct VStageResult {
    double V;
    double gh;
};

inline VStageResult v_stage_affine(double G, double acch, double e2, double D)
{
    VStageResult r;
    r.gh = (G - acch) / (e2 + D);
    r.V = (e2 * acch + D * G) / (e2 + D);
    return r;
}

inline VStageResult v_stage_quadratic(const RelaxProblem& prob, double U,
                                      double DpU, double acch, double e2,
                                      double D)
{
    const double k0 = prob.k0, C = prob.C;
    // g(U, acch + D h) = 0 rearranged: A' h^2 + B' h + C' = 0 with
    const double A2 = k0 * C * e2 * D * D;
    const double B2 = e2 + 2.0 * k0 * D + 2.0 * k0 * C * e2 * D * acch;
    const double C2 =
        -(-2.0 * k0 * (acch - 0.5 * C * (U * U - e2 * acch * acch)) - DpU);
    const double disc = B2 * B2 - 4.0 * A2 * C2;
    if (!(disc >= 0.0))
        throw NewtonDivergence("quadratic relaxation stage: no real root");
    VStageResult r;
    r.gh = -2.0 * C2 / (B2 + std::sqrt(disc));
    r.V = acch + D * r.gh;
    return r;
}

/// Invert g(U, V) = g_target for V at eps = 0 (cascade stages of CK
/// tableaux).  Affine: V = G - g.  Quadratic at eps = 0 is linear in V.
inline double v_from_source_eps0(const RelaxProblem& prob, double U,
                                 double DpU, double g_target)
{
    if (prob.g_form == GFormKind::Affine)
        return (prob.q(U) - DpU) - g_target;
    return 0.5 * prob.C * U * U + (-DpU - g_target) / (2.0 * prob.k0);
}

}  // namespace detail

// ---------------------------------------------------------------------------
//  Reformulated stepper
// ---------------------------------------------------------------------------

/// One IMEX step of the reformulated system.  See the header banner for the
/// stage algebra; dt = 0 returns the state unchanged (bitwise).
inline std::pair<RelaxState, StepReport> step_bpr(const RelaxState& state,
                                                  const IMEXTableau& tab,
                                                  const RelaxProblem& prob,
                                                  double dt, const Grid1D& grid,
                                                  ReconstructionOrder recon,
                                                  const SchemeOptions& opts = {})
{
    StepReport report;
    report.dt = dt;
    if (dt < 0.0) throw ConfigError("step_bpr: negative dt");
    if (dt == 0.0) return {state, report};

    const int n = static_cast<int>(state.u.size());
    const int s = tab.s;
    const double e2 = prob.eps * prob.eps;
    const double dx = grid.dx();
    const double mu = (opts.mu_override >= 0.0) ? opts.mu_override
                                                : mu_of_eps(prob.eps, dx);
    const bool adjoint = (opts.stencils == StencilPair::AdjointPair);
    const int lacc = adjoint ? 2 : opts.laplacian_accuracy;
    const bool gsa = is_globally_stiffly_accurate(tab);

    // eps = 0 with a trivial first implicit stage: the CK type needs the
    // true-source cascade; the ARS type never consumes the first-stage
    // source (zero implicit first column), provided the final update does
    // not weight it either.
    const bool first_trivial = (tab.aim(0, 0) == 0.0);
    bool cascade = false;
    if (e2 == 0.0 && first_trivial) {
        const TableauClass cls = classify(tab);
        if (cls == TableauClass::TypeCK) {
            if (!gsa)
                throw ZeroDenominator(
                    "step_bpr: eps = 0 with a CK tableau requires a globally "
                    "stiffly accurate final stage");
            cascade = true;
        } else if (!gsa && tab.b_im[0] != 0.0) {
            throw ZeroDenominator(
                "step_bpr: eps = 0 update weights an undetermined first-stage "
                "source");
        }
    }
    const std::vector<double> gamma =
        cascade ? ck_cascade_coefficients(tab) : std::vector<double>();

    const detail::BandOperator L = detail::probe_laplacian(grid, lacc, +1);
    const double cp = prob.dp(0.0);

    // Stage solves with equal dt * a_kk share one factorization (linear p).
    std::vector<std::pair<double, PeriodicBandedLU>> lu_cache;
    lu_cache.reserve(static_cast<std::size_t>(s));

    std::vector<FieldArray> f1(s), f2(s), gh(s);
    FieldArray U_last, V_last;
    FieldArray g_first;  // true first-stage source (cascade mode)

    for (int k = 0; k < s; ++k) {
        // ---- u-stage ------------------------------------------------------
        FieldArray acc_u = state.u;
        for (int j = 0; j < k; ++j) {
            const double ce = dt * tab.aex(k, j);
            const double ci = dt * tab.aim(k, j);
            if (ce != 0.0)
                for (int i = 0; i < n; ++i) acc_u[i] += ce * f1[j][i];
            if (ci != 0.0)
                for (int i = 0; i < n; ++i) acc_u[i] += ci * f2[j][i];
        }
        const double akk = tab.aim(k, k);
        FieldArray U_k;
        if (akk == 0.0) {
            U_k = acc_u;
        } else {
            const double c = dt * akk * mu * prob.d2;
            if (prob.p_is_linear) {
                const PeriodicBandedLU* lu = nullptr;
                for (const auto& entry : lu_cache)
                    if (entry.first == c) lu = &entry.second;
                if (!lu) {
                    lu_cache.emplace_back(c,
                                          detail::factor_shifted(L, c * cp));
                    lu = &lu_cache.back().second;
                }
                U_k = acc_u;
                lu->solve(U_k);
                ++report.implicit_solves;
            } else {
                // Damped Newton on R(U) = U - c Lap(p(U)) - acc_u with the
                // Jacobian frozen at the initial guess U = acc_u.
                U_k = acc_u;
                const double tol = 1e-12 * (1.0 + detail::linf(acc_u));
                std::vector<double> w(n);
                for (int i = 0; i < n; ++i) w[i] = prob.dp(U_k[i]);
                const PeriodicBandedLU lu = detail::factor_shifted(L, c, &w);
                ++report.implicit_solves;
                int iter = 0;
                double rnorm = 0.0;
                FieldArray pU(n), R(n);
                auto residual = [&](const FieldArray& U, FieldArray& out) {
                    for (int i = 0; i < n; ++i) pU[i] = prob.p(U[i]);
                    const FieldArray lap = laplacian(pU, lacc, grid, +1);
                    double rn = 0.0;
                    for (int i = 0; i < n; ++i) {
                        out[i] = U[i] - c * lap[i] - acc_u[i];
                        rn = std::max(rn, std::abs(out[i]));
                    }
                    return rn;
                };
                rnorm = residual(U_k, R);
                while (rnorm > tol) {
                    if (++iter > 50)
                        throw NewtonDivergence(
                            "step_bpr: stage Newton did not converge");
                    FieldArray delta = R;
                    lu.solve(delta);
                    double lambda = 1.0;
                    FieldArray trial(n), Rt(n);
                    for (int cut = 0; cut < 9; ++cut) {
                        for (int i = 0; i < n; ++i)
                            trial[i] = U_k[i] - lambda * delta[i];
                        const double rt = residual(trial, Rt);
                        if (rt < rnorm || cut == 8) {
                            U_k = trial;
                            R = Rt;
                            rnorm = rt;
                            break;
                        }
                        lambda *= 0.5;
                    }
                }
                report.newton_iterations =
                    std::max(report.newton_iterations, iter);
            }
        }

        // ---- shared stage fields -----------------------------------------
        FieldArray pU(n);
        for (int i = 0; i < n; ++i) pU[i] = prob.p(U_k[i]);
        FieldArray f2_k = laplacian(pU, lacc, grid, +1);
        for (int i = 0; i < n; ++i) f2_k[i] *= mu * prob.d2;
        const FieldArray DpC = detail::constraint_derivative(pU, grid, opts);

        // ---- v-stage ------------------------------------------------------
        FieldArray V_k(n), gh_k(n, 0.0);
        if (cascade) {
            if (k == 0) {
                V_k = state.v;
                g_first.resize(n);
                for (int i = 0; i < n; ++i)
                    g_first[i] = detail::true_source(prob, U_k[i], state.v[i],
                                                     DpC[i]);
            } else {
                const double gk = gamma[k - 1];
                for (int i = 0; i < n; ++i)
                    V_k[i] = detail::v_from_source_eps0(prob, U_k[i], DpC[i],
                                                        gk * g_first[i]);
            }
        } else {
            FieldArray acch = state.v;
            for (int j = 0; j < k; ++j) {
                const double ci = dt * tab.aim(k, j);
                if (ci != 0.0)
                    for (int i = 0; i < n; ++i) acch[i] += ci * gh[j][i];
            }
            const double D = dt * akk;
            if (akk == 0.0) {
                V_k = acch;
                if (e2 == 0.0) {
                    // Undetermined first stage of an ARS tableau: the source
                    // is never consumed (zero implicit column and weight).
                } else if (prob.g_form == GFormKind::Affine) {
                    for (int i = 0; i < n; ++i)
                        gh_k[i] = (prob.q(U_k[i]) - DpC[i] - V_k[i]) / e2;
                } else {
                    for (int i = 0; i < n; ++i)
                        gh_k[i] = detail::true_source(prob, U_k[i], V_k[i],
                                                      DpC[i]) /
                                  e2;
                }
            } else if (prob.g_form == GFormKind::Affine) {
                for (int i = 0; i < n; ++i) {
                    const double G = prob.q(U_k[i]) - DpC[i];
                    const detail::VStageResult r =
                        detail::v_stage_affine(G, acch[i], e2, D);
                    V_k[i] = r.V;
                    gh_k[i] = r.gh;
                }
            } else {
                for (int i = 0; i < n; ++i) {
                    const detail::VStageResult r = detail::v_stage_quadratic(
                        prob, U_k[i], DpC[i], acch[i], e2, D);
                    V_k[i] = r.V;
                    gh_k[i] = r.gh;
                }
            }
        }

        // ---- explicit flux ------------------------------------------------
        FieldArray f1_k;
        if (adjoint) {
            f1_k = detail::backward_difference(V_k, grid, -1);
            for (int i = 0; i < n; ++i) f1_k[i] = -f1_k[i] - f2_k[i];
        } else if (opts.flux_form == FluxForm::Split) {
            f1_k = weno_flux_divergence(V_k, U_k, opts.lf_alpha, recon, grid,
                                        -1, +1);
            for (int i = 0; i < n; ++i) f1_k[i] = -f1_k[i] - f2_k[i];
        } else {
            const FieldArray Dpf =
                (opts.flux_derivative == DerivKind::Weno)
                    ? first_derivative(pU, recon, grid, +1)
                    : central_first_derivative(pU, lacc, grid, +1);
            FieldArray F(n);
            for (int i = 0; i < n; ++i)
                F[i] = V_k[i] + mu * prob.d2 * Dpf[i];
            f1_k = weno_flux_divergence(F, U_k, opts.lf_alpha, recon, grid, -1,
                                        +1);
            for (int i = 0; i < n; ++i) f1_k[i] = -f1_k[i];
        }

        f1[k] = std::move(f1_k);
        f2[k] = std::move(f2_k);
        gh[k] = std::move(gh_k);
        if (k == s - 1) {
            U_last = std::move(U_k);
            V_last = std::move(V_k);
        }
    }

    // ---- final update -------------------------------------------------
    RelaxState out;
    out.t = state.t + dt;
    if (gsa) {
        out.u = std::move(U_last);
        out.v = std::move(V_last);
    } else {
        out.u = state.u;
        out.v = state.v;
        for (int k = 0; k < s; ++k) {
            const double ce = dt * tab.b_ex[k];
            const double ci = dt * tab.b_im[k];
            if (ce != 0.0)
                for (int i = 0; i < n; ++i) out.u[i] += ce * f1[k][i];
            if (ci != 0.0)
                for (int i = 0; i < n; ++i) out.u[i] += ci * f2[k][i];
            if (ci != 0.0)
                for (int i = 0; i < n; ++i) out.v[i] += ci * gh[k][i];
        }
    }
    if (!detail::all_finite(out.u) || !detail::all_finite(out.v))
        throw NonFiniteState("step_bpr: non-finite state after step");
    report.manifold_residual =
        detail::manifold_residual(prob, out.u, out.v, grid, opts);
    return {std::move(out), report};
}

// ---------------------------------------------------------------------------
//  Partitioned stepper
// ---------------------------------------------------------------------------

/// One IMEX step of the system in original variables (no stabilizing
/// diffusion).  Flux derivative D-, constraint derivative D+; their
/// composition is the compact Laplacian, so the eps = 0 u-update IS the
/// explicit tableau applied to the limit equation.
inline std::pair<RelaxState, StepReport> step_partitioned(
    const RelaxState& state, const IMEXTableau& tab, const RelaxProblem& prob,
    double dt, const Grid1D& grid, ReconstructionOrder /*recon*/,
    const SchemeOptions& opts = {})
{
    StepReport report;
    report.dt = dt;
    if (dt < 0.0) throw ConfigError("step_partitioned: negative dt");
    if (dt == 0.0) return {state, report};

    const int n = static_cast<int>(state.u.size());
    const int s = tab.s;
    const double e2 = prob.eps * prob.eps;
    const bool gsa = is_globally_stiffly_accurate(tab);

    const bool first_trivial = (tab.aim(0, 0) == 0.0);
    bool cascade = false;
    if (e2 == 0.0 && first_trivial) {
        const TableauClass cls = classify(tab);
        if (cls == TableauClass::TypeCK) {
            if (!gsa)
                throw ZeroDenominator(
                    "step_partitioned: eps = 0 with a CK tableau requires a "
                    "globally stiffly accurate final stage");
            cascade = true;
        } else if (!gsa && tab.b_im[0] != 0.0) {
            throw ZeroDenominator(
                "step_partitioned: eps = 0 update weights an undetermined "
                "first-stage source");
        }
    }
    const std::vector<double> gamma =
        cascade ? ck_cascade_coefficients(tab) : std::vector<double>();

    std::vector<FieldArray> f1(s), gh(s);
    FieldArray U_last, V_last;
    FieldArray g_first;

    for (int k = 0; k < s; ++k) {
        FieldArray U_k = state.u;
        for (int j = 0; j < k; ++j) {
            const double ce = dt * tab.aex(k, j);
            if (ce != 0.0)
                for (int i = 0; i < n; ++i) U_k[i] += ce * f1[j][i];
        }

        FieldArray pU(n);
        for (int i = 0; i < n; ++i) pU[i] = prob.p(U_k[i]);
        const FieldArray DpP = detail::forward_difference(pU, grid, +1);

        const double akk = tab.aim(k, k);
        FieldArray V_k(n), gh_k(n, 0.0);
        if (cascade) {
            if (k == 0) {
                V_k = state.v;
                g_first.resize(n);
                for (int i = 0; i < n; ++i)
                    g_first[i] = detail::true_source(prob, U_k[i], state.v[i],
                                                     DpP[i]);
            } else {
                const double gk = gamma[k - 1];
                for (int i = 0; i < n; ++i)
                    V_k[i] = detail::v_from_source_eps0(prob, U_k[i], DpP[i],
                                                        gk * g_first[i]);
            }
        } else {
            FieldArray acch = state.v;
            for (int j = 0; j < k; ++j) {
                const double ci = dt * tab.aim(k, j);
                if (ci != 0.0)
                    for (int i = 0; i < n; ++i) acch[i] += ci * gh[j][i];
            }
            const double D = dt * akk;
            if (akk == 0.0) {
                V_k = acch;
                if (e2 == 0.0) {
                    // ARS first stage: source never consumed.
                } else {
                    for (int i = 0; i < n; ++i)
                        gh_k[i] = detail::true_source(prob, U_k[i], V_k[i],
                                                      DpP[i]) /
                                  e2;
                }
            } else if (prob.g_form == GFormKind::Affine) {
                for (int i = 0; i < n; ++i) {
                    const double G = prob.q(U_k[i]) - DpP[i];
                    const detail::VStageResult r =
                        detail::v_stage_affine(G, acch[i], e2, D);
                    V_k[i] = r.V;
                    gh_k[i] = r.gh;
                }
            } else {
                for (int i = 0; i < n; ++i) {
                    const detail::VStageResult r = detail::v_stage_quadratic(
                        prob, U_k[i], DpP[i], acch[i], e2, D);
                    V_k[i] = r.V;
                    gh_k[i] = r.gh;
                }
            }
        }

        FieldArray f1_k = detail::backward_difference(V_k, grid, -1);
        for (int i = 0; i < n; ++i) f1_k[i] = -f1_k[i];

        f1[k] = std::move(f1_k);
        gh[k] = std::move(gh_k);
        if (k == s - 1) {
            U_last = std::move(U_k);
            V_last = std::move(V_k);
        }
    }

    RelaxState out;
    out.t = state.t + dt;
    if (gsa) {
        out.u = std::move(U_last);
        out.v = std::move(V_last);
    } else {
        out.u = state.u;
        out.v = state.v;
        for (int k = 0; k < s; ++k) {
            const double ce = dt * tab.b_ex[k];
            const double ci = dt * tab.b_im[k];
            if (ce != 0.0)
                for (int i = 0; i < n; ++i) out.u[i] += ce * f1[k][i];
            if (ci != 0.0)
                for (int i = 0; i < n; ++i) out.v[i] += ci * gh[k][i];
        }
    }
    if (!detail::all_finite(out.u) || !detail::all_finite(out.v))
        throw NonFiniteState("step_partitioned: non-finite state after step");
    {
        SchemeOptions gopts = opts;
        gopts.stencils = StencilPair::AdjointPair;  // residual uses D+
        report.manifold_residual =
            detail::manifold_residual(prob, out.u, out.v, grid, gopts);
    }
    return {std::move(out), report};
}

// ---------------------------------------------------------------------------
//  Time loop
// ---------------------------------------------------------------------------

/// Trajectory of a fixed-CFL integration: requested snapshots, the final
/// state, and every per-step report.
struct IntegrateResult {
    RelaxState final_state;
    std::vector<StepReport> reports;
    std::vector<RelaxState> snapshots;  ///< one per requested snapshot time
};

/// March prob from its initial data to t_end with dt = cfl * dx (the last
/// step truncated to land on t_end exactly).  Raises NonFiniteState when a
/// step produces non-finite values or the solution magnitude exceeds the
/// divergence guard 1e8 * (1 + max|u0|) -- roundoff-seeded parabolic
/// blow-up grows geometrically and is detectable long before IEEE Inf.
inline IntegrateResult integrate(const RelaxProblem& prob,
                                 const IMEXTableau& tab, const Grid1D& grid,
                                 ReconstructionOrder recon, double t_end,
                                 double cfl, StepMode mode,
                                 const SchemeOptions& opts = {},
                                 std::vector<double> snapshot_times = {})
{
    if (!(cfl > 0.0)) throw ConfigError("integrate: cfl must be positive");
    if (t_end < 0.0) throw ConfigError("integrate: negative end time");
    std::sort(snapshot_times.begin(), snapshot_times.end());

    IntegrateResult result;
    RelaxState state = initial_state(prob, grid);
    const double dx = grid.dx();
    const double guard = 1e8 * (1.0 + detail::linf(state.u));
    std::size_t snap = 0;

    double t = 0.0;
    while (t < t_end - 1e-14) {
        const double dt = std::min(cfl * dx, t_end - t);
        std::pair<RelaxState, StepReport> step =
            (mode == StepMode::BPR)
                ? step_bpr(state, tab, prob, dt, grid, recon, opts)
                : step_partitioned(state, tab, prob, dt, grid, recon, opts);
        state = std::move(step.first);
        result.reports.push_back(step.second);
        t += dt;
        state.t = t;
        if (detail::linf(state.u) > guard)
            throw NonFiniteState("integrate: solution magnitude exceeds the "
                                 "divergence guard");
        while (snap < snapshot_times.size() &&
               t >= snapshot_times[snap] - 1e-12) {
            result.snapshots.push_back(state);
            ++snap;
        }
    }
    result.final_state = std::move(state);
    return result;
}

}  // namespace diffrelax

#endif  // DIFFRELAX_IMEX_HPP
