#ifndef DIFFRELAX_LINALG_HPP
#define DIFFRELAX_LINALG_HPP

// ===========================================================================
//  linalg.hpp -- small dense and banded linear algebra kernels.
//
//  Everything here is hand-rolled on std::vector<double>:
//    * Thomas algorithm for diagonally dominant tridiagonal systems,
//    * partial-pivoting LU for general banded systems (the implicit
//      diffusion operator I - c*L4 is SPD but not strictly diagonally
//      dominant for large c, so pivoting is kept),
//    * Sherman-Morrison-Woodbury corner correction for periodic
//      (circulant-banded) systems,
//    * partial-pivoting LU for tiny dense systems (Butcher-tableau sizes),
//    * smallest singular value of a tiny matrix via Jacobi iteration
//      on A^T A.
// ===========================================================================

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "diffrelax/errors.hpp"

namespace diffrelax {

// ---------------------------------------------------------------------------
// Tridiagonal (Thomas) solve
// ---------------------------------------------------------------------------

/// Solve a tridiagonal system in place with the Thomas algorithm.
///
/// \param lower  sub-diagonal, lower[i] multiplies x[i-1] in row i
///               (lower[0] ignored)
/// \param diag   main diagonal, length n
/// \param upper  super-diagonal, upper[i] multiplies x[i+1] in row i
///               (upper[n-1] ignored)
/// \param rhs    right-hand side, overwritten with the solution
///
/// No pivoting: intended for the diagonally dominant systems produced by
/// implicit diffusion/relaxation stages.  Throws SingularBandedMatrix on a
/// vanishing pivot.
inline void solve_tridiagonal(const std::vector<double>& lower,
                              std::vector<double> diag,
                              const std::vector<double>& upper,
                              std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n)
        throw ShapeMismatch("solve_tridiagonal: array lengths disagree");
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0)
            throw SingularBandedMatrix("solve_tridiagonal: zero pivot");
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0)
        throw SingularBandedMatrix("solve_tridiagonal: zero pivot");
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// ---------------------------------------------------------------------------
// General banded LU with partial pivoting
// ---------------------------------------------------------------------------

/// LU factorization of an n x n banded matrix with kl sub- and ku
/// super-diagonals, with partial (row) pivoting.  Storage follows the
/// usual band layout with kl extra rows for pivoting fill-in: entry
/// (i, j) lives at band(kl + ku + i - j, j) for
/// max(0, j-ku) <= i <= min(n-1, j+kl).
class BandedLU {
public:
    BandedLU(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1),
          ab_(static_cast<std::size_t>(ld_) * n, 0.0), piv_(n, 0) {}

    /// Set entry (i, j) of the matrix before factorization.
    void set(int i, int j, double v) {
        ab_[idx(i, j)] = v;
    }
    /// Add to entry (i, j) of the matrix before factorization.
    void add(int i, int j, double v) {
        ab_[idx(i, j)] += v;
    }

    /// Factor in place.  Throws SingularBandedMatrix on breakdown.
    void factor() {
        const int kv = kl_ + ku_; // rows above the diagonal in storage
        for (int j = 0; j < n_; ++j) {
            // pivot search in column j, rows j .. j+kl
            const int imax = std::min(n_ - 1, j + kl_);
            int p = j;
            double pmax = std::abs(ab_[at(kv, j)]);
            for (int i = j + 1; i <= imax; ++i) {
                const double v = std::abs(ab_[at(kv + i - j, j)]);
                if (v > pmax) { pmax = v; p = i; }
            }
            if (pmax == 0.0)
                throw SingularBandedMatrix("BandedLU: zero pivot column "
                                           + std::to_string(j));
            piv_[j] = p;
            if (p != j) {
                // swap rows j and p across the band of columns touching both
                const int jmax = std::min(n_ - 1, j + kv);
                for (int c = j; c <= jmax; ++c)
                    std::swap(ab_[at(kv + j - c, c)], ab_[at(kv + p - c, c)]);
            }
            const double pivot = ab_[at(kv, j)];
            for (int i = j + 1; i <= imax; ++i) {
                const double m = ab_[at(kv + i - j, j)] / pivot;
                ab_[at(kv + i - j, j)] = m; // store multiplier
                const int jmax = std::min(n_ - 1, j + kv);
                for (int c = j + 1; c <= jmax; ++c)
                    ab_[at(kv + i - c, c)] -= m * ab_[at(kv + j - c, c)];
            }
        }
        factored_ = true;
    }

    /// Solve A x = b using the stored factorization; b is overwritten.
    void solve(std::vector<double>& b) const {
        const int kv = kl_ + ku_;
        if (static_cast<int>(b.size()) != n_)
            throw ShapeMismatch("BandedLU::solve: rhs length");
        // forward substitution with row swaps
        for (int j = 0; j < n_; ++j) {
            if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
            const int imax = std::min(n_ - 1, j + kl_);
            for (int i = j + 1; i <= imax; ++i)
                b[i] -= ab_[at(kv + i - j, j)] * b[j];
        }
        // back substitution
        for (int j = n_ - 1; j >= 0; --j) {
            b[j] /= ab_[at(kv, j)];
            const int imin = std::max(0, j - kv);
            for (int i = imin; i < j; ++i)
                b[i] -= ab_[at(kv + i - j, j)] * b[j];
        }
    }

    int size() const { return n_; }
    bool factored() const { return factored_; }

private:
    std::size_t at(int r, int c) const {
        return static_cast<std::size_t>(r)
             + static_cast<std::size_t>(c) * static_cast<std::size_t>(ld_);
    }
    std::size_t idx(int i, int j) const {
        const int kv = kl_ + ku_;
        return at(kv + i - j, j);
    }

    int n_, kl_, ku_, ld_;
    std::vector<double> ab_;
    std::vector<int> piv_;
    bool factored_ = false;
};

// ---------------------------------------------------------------------------
// Periodic banded solve: banded core + low-rank corner correction
// ---------------------------------------------------------------------------

/// One off-band entry (i, j, value) of a periodic operator's wrap-around
/// corner.
struct CornerEntry {
    int i;
    int j;
    double value;
};

/// Solver for M = B + sum_k value_k * e_{i_k} e_{j_k}^T where B is banded.
/// Used for periodic discrete Laplacians, whose wrap-around entries sit in
/// the matrix corners.  Solves via the Woodbury identity with a dense
/// k x k capacitance system (k = number of corner entries, at most 6 here).
class PeriodicBandedLU {
public:
    PeriodicBandedLU(BandedLU core, const std::vector<CornerEntry>& corners)
        : core_(std::move(core)), corners_(corners) {
        if (!core_.factored()) core_.factor();
        const int k = static_cast<int>(corners_.size());
        const int n = core_.size();
        // columns of B^{-1} U, where U's columns are value * e_i
        binvu_.assign(corners_.size(), std::vector<double>(n, 0.0));
        for (int c = 0; c < k; ++c) {
            binvu_[c][corners_[c].i] = corners_[c].value;
            core_.solve(binvu_[c]);
        }
        // capacitance C = I + V^T B^{-1} U with V columns e_j
        cap_.assign(static_cast<std::size_t>(k) * k, 0.0);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c)
                cap_[static_cast<std::size_t>(r) * k + c] =
                    (r == c ? 1.0 : 0.0) + binvu_[c][corners_[r].j];
    }

    /// Solve M x = b; b is overwritten with x.
    void solve(std::vector<double>& b) const {
        const int k = static_cast<int>(corners_.size());
        core_.solve(b);
        if (k == 0) return;
        std::vector<double> w(k);
        for (int r = 0; r < k; ++r) w[r] = b[corners_[r].j];
        std::vector<double> cap = cap_;
        dense_solve_inplace(k, cap, w);
        for (int c = 0; c < k; ++c)
            for (std::size_t i = 0; i < b.size(); ++i)
                b[i] -= binvu_[c][i] * w[c];
    }

    /// Solve a tiny row-major dense system in place (partial pivoting).
    static void dense_solve_inplace(int n, std::vector<double>& a,
                                    std::vector<double>& b) {
        for (int j = 0; j < n; ++j) {
            int p = j;
            double pmax = std::abs(a[static_cast<std::size_t>(j) * n + j]);
            for (int i = j + 1; i < n; ++i) {
                const double v = std::abs(a[static_cast<std::size_t>(i) * n + j]);
                if (v > pmax) { pmax = v; p = i; }
            }
            if (pmax == 0.0)
                throw SingularMatrix("dense_solve: zero pivot");
            if (p != j) {
                for (int c = 0; c < n; ++c)
                    std::swap(a[static_cast<std::size_t>(j) * n + c],
                              a[static_cast<std::size_t>(p) * n + c]);
                std::swap(b[j], b[p]);
            }
            const double pivot = a[static_cast<std::size_t>(j) * n + j];
            for (int i = j + 1; i < n; ++i) {
                const double m = a[static_cast<std::size_t>(i) * n + j] / pivot;
                if (m == 0.0) continue;
                a[static_cast<std::size_t>(i) * n + j] = 0.0;
                for (int c = j + 1; c < n; ++c)
                    a[static_cast<std::size_t>(i) * n + c] -=
                        m * a[static_cast<std::size_t>(j) * n + c];
                b[i] -= m * b[j];
            }
        }
        for (int j = n - 1; j >= 0; --j) {
            double s = b[j];
            for (int c = j + 1; c < n; ++c)
                s -= a[static_cast<std::size_t>(j) * n + c] * b[c];
            b[j] = s / a[static_cast<std::size_t>(j) * n + j];
        }
    }

private:
    mutable BandedLU core_;         // solve() is logically const
    std::vector<CornerEntry> corners_;
    std::vector<std::vector<double>> binvu_;
    std::vector<double> cap_;
};

// ---------------------------------------------------------------------------
// Tiny dense helpers (Butcher-tableau sizes, n <= 6)
// ---------------------------------------------------------------------------

/// Solve A x = b for a small row-major dense matrix; returns x.
inline std::vector<double> dense_solve(int n, std::vector<double> a,
                                       std::vector<double> b) {
    PeriodicBandedLU::dense_solve_inplace(n, a, b);
    return b;
}

/// Matrix-vector product for a small row-major dense matrix.
inline std::vector<double> dense_matvec(int n, const std::vector<double>& a,
                                        const std::vector<double>& x) {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            y[i] += a[static_cast<std::size_t>(i) * n + j] * x[j];
    return y;
}

/// Smallest singular value of a small row-major n x n matrix via one-sided
/// (Hestenes) Jacobi: plane rotations orthogonalize the columns, after
/// which the singular values are the column norms.  Working on A directly
/// (never on A^T A) keeps singular values resolvable down to machine
/// precision times the matrix norm, which the 1e-12-relative
/// classification threshold requires.
inline double smallest_singular_value(int n, const std::vector<double>& a) {
    std::vector<double> w = a; // row-major working copy
    auto col_dots = [&](int p, int q, double& app, double& aqq, double& apq) {
        app = aqq = apq = 0.0;
        for (int k = 0; k < n; ++k) {
            const double xp = w[static_cast<std::size_t>(k) * n + p];
            const double xq = w[static_cast<std::size_t>(k) * n + q];
            app += xp * xp;
            aqq += xq * xq;
            apq += xp * xq;
        }
    };
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double app, aqq, apq;
                col_dots(p, q, app, aqq, apq);
                if (apq * apq <= 1e-60 * app * aqq || apq == 0.0) continue;
                rotated = true;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int k = 0; k < n; ++k) {
                    double& xp = w[static_cast<std::size_t>(k) * n + p];
                    double& xq = w[static_cast<std::size_t>(k) * n + q];
                    const double tp = xp, tq = xq;
                    xp = c * tp - s * tq;
                    xq = s * tp + c * tq;
                }
            }
        if (!rotated) break;
    }
    double mn = -1.0;
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            const double x = w[static_cast<std::size_t>(k) * n + j];
            s += x * x;
        }
        const double norm = std::sqrt(s);
        if (mn < 0.0 || norm < mn) mn = norm;
    }
    return mn;
}

/// Frobenius norm of a small row-major matrix.
inline double frobenius_norm(int n, const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    (void)n;
    return std::sqrt(s);
}

} // namespace diffrelax

#endif // DIFFRELAX_LINALG_HPP
