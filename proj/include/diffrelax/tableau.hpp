#ifndef DIFFRELAX_TABLEAU_HPP
#define DIFFRELAX_TABLEAU_HPP

// ===========================================================================
//  tableau.hpp -- IMEX Runge-Kutta double Butcher tableaux.
//
//  A pair of s-stage tableaux sharing stages: a strictly lower triangular
//  explicit matrix and a lower triangular (DIRK) implicit matrix.  The
//  module provides:
//    * construction of the builtin schemes from exact closed forms,
//    * structural validation and classification (type A / CK / ARS),
//    * order-condition checks through order 3, including the coupled
//      conditions that mix the two tableaux,
//    * the implicit stability function's limit R(infinity),
//    * a plain-text catalog format with bit-exact round-trip,
//    * the three-stage infeasibility sweep showing that a stiffly accurate
//      second-order candidate with invertible implicit matrix forces the
//      implicit diagonal to zero.
// ===========================================================================

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "diffrelax/errors.hpp"
#include "diffrelax/linalg.hpp"

namespace diffrelax {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Double Butcher tableau for an s-stage IMEX Runge-Kutta pair.
/// Matrices are stored row-major.
struct IMEXTableau {
    int s = 0;                  ///< stage count
    std::vector<double> A_ex;   ///< s*s explicit matrix (strictly lower)
    std::vector<double> b_ex;   ///< explicit weights
    std::vector<double> c_ex;   ///< explicit abscissae
    std::vector<double> A_im;   ///< s*s implicit matrix (lower, DIRK)
    std::vector<double> b_im;   ///< implicit weights
    std::vector<double> c_im;   ///< implicit abscissae
    std::string name;
    int declared_order = 0;

    double aex(int i, int j) const {
        return A_ex[static_cast<std::size_t>(i) * s + j];
    }
    double aim(int i, int j) const {
        return A_im[static_cast<std::size_t>(i) * s + j];
    }
    double& aex(int i, int j) {
        return A_ex[static_cast<std::size_t>(i) * s + j];
    }
    double& aim(int i, int j) {
        return A_im[static_cast<std::size_t>(i) * s + j];
    }
};

/// Structural class of the implicit matrix.
enum class TableauClass { TypeA, TypeCK, TypeARS };

inline const char* to_string(TableauClass c) {
    switch (c) {
        case TableauClass::TypeA: return "A";
        case TableauClass::TypeCK: return "CK";
        case TableauClass::TypeARS: return "ARS";
    }
    return "?";
}

/// One order/structure condition outcome.
struct ConditionResult {
    std::string id;
    double residual = 0.0;
    bool pass = false;
};

/// Collection of condition outcomes.
struct ValidationReport {
    std::vector<ConditionResult> entries;
    double tolerance = 1e-12;
    int order_checked = 0;
    bool pass = true;           ///< all entries within tolerance

    void push(const std::string& id, double residual) {
        ConditionResult r;
        r.id = id;
        r.residual = residual;
        r.pass = std::abs(residual) <= tolerance;
        pass = pass && r.pass;
        entries.push_back(std::move(r));
    }
    double max_residual() const {
        double m = 0.0;
        for (const auto& e : entries) m = std::max(m, std::abs(e.residual));
        return m;
    }
};

// ---------------------------------------------------------------------------
// Structural checks
// ---------------------------------------------------------------------------

/// Verify the structural invariants: triangularity and row-sum consistency
/// c_i = sum_j a_ij (explicit: j < i; implicit: j <= i) to 1e-13.
/// Throws DegenerateTableau on violation.
inline void check_structure(const IMEXTableau& t) {
    const double tol = 1e-13;
    if (t.s <= 0 ||
        t.A_ex.size() != static_cast<std::size_t>(t.s) * t.s ||
        t.A_im.size() != static_cast<std::size_t>(t.s) * t.s ||
        t.b_ex.size() != static_cast<std::size_t>(t.s) ||
        t.b_im.size() != static_cast<std::size_t>(t.s) ||
        t.c_ex.size() != static_cast<std::size_t>(t.s) ||
        t.c_im.size() != static_cast<std::size_t>(t.s))
        throw DegenerateTableau("tableau '" + t.name + "': bad array sizes");
    for (int i = 0; i < t.s; ++i) {
        for (int j = i; j < t.s; ++j)
            if (t.aex(i, j) != 0.0)
                throw DegenerateTableau("tableau '" + t.name +
                                        "': explicit matrix not strictly lower");
        for (int j = i + 1; j < t.s; ++j)
            if (t.aim(i, j) != 0.0)
                throw DegenerateTableau("tableau '" + t.name +
                                        "': implicit matrix not lower");
        double se = 0.0, si = 0.0;
        for (int j = 0; j < i; ++j) se += t.aex(i, j);
        for (int j = 0; j <= i; ++j) si += t.aim(i, j);
        if (std::abs(se - t.c_ex[i]) > tol || std::abs(si - t.c_im[i]) > tol)
            throw DegenerateTableau("tableau '" + t.name +
                                    "': row-sum/abscissa mismatch at stage " +
                                    std::to_string(i));
    }
}

/// Classify the implicit matrix as type A (invertible), CK (zero first row
/// with invertible trailing block), or ARS (CK with zero first column).
/// Invertibility is judged by smallest singular value > 1e-12 * ||A||_F.
inline TableauClass classify(const IMEXTableau& t) {
    const int s = t.s;
    const double normA = frobenius_norm(s, t.A_im);
    if (normA > 0.0 &&
        smallest_singular_value(s, t.A_im) > 1e-12 * normA)
        return TableauClass::TypeA;
    if (t.aim(0, 0) == 0.0 && s >= 2) {
        std::vector<double> ahat(static_cast<std::size_t>(s - 1) * (s - 1));
        for (int i = 1; i < s; ++i)
            for (int j = 1; j < s; ++j)
                ahat[static_cast<std::size_t>(i - 1) * (s - 1) + (j - 1)] =
                    t.aim(i, j);
        const double normH = frobenius_norm(s - 1, ahat);
        if (normH > 0.0 &&
            smallest_singular_value(s - 1, ahat) > 1e-12 * normH) {
            bool column_zero = true;
            for (int i = 1; i < s; ++i)
                if (t.aim(i, 0) != 0.0) column_zero = false;
            return column_zero ? TableauClass::TypeARS : TableauClass::TypeCK;
        }
    }
    throw DegenerateTableau("tableau '" + t.name +
                            "': implicit matrix neither invertible nor of "
                            "zero-first-row form");
}

/// True iff both weight vectors equal the corresponding last matrix rows
/// and both final abscissae are 1 (to 1e-13): the step equals the last
/// stage for both parts.
inline bool is_globally_stiffly_accurate(const IMEXTableau& t) {
    const double tol = 1e-13;
    const int s = t.s;
    for (int j = 0; j < s; ++j) {
        if (std::abs(t.b_im[j] - t.aim(s - 1, j)) > tol) return false;
        if (std::abs(t.b_ex[j] - t.aex(s - 1, j)) > tol) return false;
    }
    return std::abs(t.c_im[s - 1] - 1.0) <= tol &&
           std::abs(t.c_ex[s - 1] - 1.0) <= tol;
}

/// True iff the implicit weights equal the implicit matrix's last row.
inline bool has_stiffly_accurate_implicit(const IMEXTableau& t) {
    const double tol = 1e-13;
    for (int j = 0; j < t.s; ++j)
        if (std::abs(t.b_im[j] - t.aim(t.s - 1, j)) > tol) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Order conditions
// ---------------------------------------------------------------------------

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::vector<double> hadamard(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
    return r;
}

/// y = M x for a row-major s x s matrix.
inline std::vector<double> matvec(int s, const std::vector<double>& m,
                                  const std::vector<double>& x) {
    std::vector<double> y(x.size(), 0.0);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
            y[i] += m[static_cast<std::size_t>(i) * s + j] * x[j];
    return y;
}

} // namespace detail

/// Evaluate all order conditions through order p (1 <= p <= 3) for the
/// IMEX pair, including the coupled conditions mixing the two tableaux:
///   order 1: sum(b) = 1 for each part;
///   order 2: b_X . c_Y = 1/2 for all four (X, Y) combinations;
///   order 3: b_X . (c_Y c_Z) = 1/3 (six combinations) and
///            b_X . A_Y c_Z = 1/6 (eight combinations).
/// The report lists each residual separately; pass requires all residuals
/// <= 1e-12.  The coupled order-3 set is the standard additive
/// Runge-Kutta condition system.
inline ValidationReport validate_order(const IMEXTableau& t, int p) {
    using detail::dot;
    using detail::hadamard;
    using detail::matvec;
    ValidationReport rep;
    rep.order_checked = p;
    const std::vector<double>* bs[2] = {&t.b_ex, &t.b_im};
    const std::vector<double>* cs[2] = {&t.c_ex, &t.c_im};
    const std::vector<double>* As[2] = {&t.A_ex, &t.A_im};
    const char* tag[2] = {"ex", "im"};

    for (int X = 0; X < 2; ++X) {
        double s = 0.0;
        for (double v : *bs[X]) s += v;
        rep.push(std::string("sum(b_") + tag[X] + ")-1", s - 1.0);
    }
    if (p >= 2)
        for (int X = 0; X < 2; ++X)
            for (int Y = 0; Y < 2; ++Y)
                rep.push(std::string("b_") + tag[X] + ".c_" + tag[Y] + "-1/2",
                         dot(*bs[X], *cs[Y]) - 0.5);
    if (p >= 3) {
        for (int X = 0; X < 2; ++X)
            for (int Y = 0; Y < 2; ++Y)
                for (int Z = Y; Z < 2; ++Z)
                    rep.push(std::string("b_") + tag[X] + ".(c_" + tag[Y] +
                                 "*c_" + tag[Z] + ")-1/3",
                             dot(*bs[X], hadamard(*cs[Y], *cs[Z])) - 1.0 / 3.0);
        for (int X = 0; X < 2; ++X)
            for (int Y = 0; Y < 2; ++Y)
                for (int Z = 0; Z < 2; ++Z)
                    rep.push(std::string("b_") + tag[X] + ".A_" + tag[Y] +
                                 ".c_" + tag[Z] + "-1/6",
                             dot(*bs[X], matvec(t.s, *As[Y], *cs[Z])) -
                                 1.0 / 6.0);
    }
    return rep;
}

/// Residuals of the additional conditions that restore the declared order
/// in the stiff limit for stiffly accurate implicit parts:
///   c_ex[s-1] = 1            (second order)
///   (last row of A_ex).c_ex = 1/2   (third order)
/// Throws NotStifflyAccurate when the precondition fails.
inline ValidationReport check_algebraic_conditions(const IMEXTableau& t) {
    if (!has_stiffly_accurate_implicit(t))
        throw NotStifflyAccurate("tableau '" + t.name +
                                 "': implicit weights differ from the last "
                                 "implicit-matrix row");
    ValidationReport rep;
    rep.order_checked = t.declared_order;
    rep.push("c_ex[s]-1", t.c_ex[t.s - 1] - 1.0);
    double s = 0.0;
    for (int j = 0; j < t.s; ++j) s += t.aex(t.s - 1, j) * t.c_ex[j];
    rep.push("rowlast(A_ex).c_ex-1/2", s - 0.5);
    return rep;
}

// ---------------------------------------------------------------------------
// Stiff-limit stability quantities
// ---------------------------------------------------------------------------

namespace detail {

/// Extract the trailing (s-1) x (s-1) implicit block and the first column
/// below the (0,0) entry.
inline void split_ck(const IMEXTableau& t, std::vector<double>& ahat,
                     std::vector<double>& a_col, std::vector<double>& bhat) {
    const int m = t.s - 1;
    ahat.assign(static_cast<std::size_t>(m) * m, 0.0);
    a_col.assign(m, 0.0);
    bhat.assign(m, 0.0);
    for (int i = 1; i < t.s; ++i) {
        a_col[i - 1] = t.aim(i, 0);
        bhat[i - 1] = t.b_im[i];
        for (int j = 1; j < t.s; ++j)
            ahat[static_cast<std::size_t>(i - 1) * m + (j - 1)] = t.aim(i, j);
    }
}

} // namespace detail

/// Limit of the implicit part's linear stability function as the stiff
/// eigenvalue magnitude grows without bound.
///   type A:      R(inf) = 1 - b^T A^{-1} 1
///   type CK/ARS: R(inf) = 1 - bhat^T Ahat^{-1} 1 - bhat^T Ahat^{-2} a
/// For a stiffly accurate implicit part the CK form reduces to
/// -e_{s-1}^T Ahat^{-1} a.  Throws SingularMatrix if the needed block is
/// singular.
inline double r_infinity(const IMEXTableau& t) {
    const TableauClass cls = classify(t);
    if (cls == TableauClass::TypeA) {
        std::vector<double> ones(t.s, 1.0);
        std::vector<double> y = dense_solve(t.s, t.A_im, ones);
        return 1.0 - detail::dot(t.b_im, y);
    }
    const int m = t.s - 1;
    std::vector<double> ahat, a_col, bhat;
    detail::split_ck(t, ahat, a_col, bhat);
    std::vector<double> ones(m, 1.0);
    std::vector<double> y1 = dense_solve(m, ahat, ones);   // Ahat^{-1} 1
    std::vector<double> y2 = dense_solve(m, ahat, a_col);  // Ahat^{-1} a
    std::vector<double> y3 = dense_solve(m, ahat, y2);     // Ahat^{-2} a
    return 1.0 - detail::dot(bhat, y1) - detail::dot(bhat, y3);
}

/// The quantity e_{s-1}^T Ahat^{-1} a whose vanishing is equivalent to
/// R(inf) = 0 for CK tableaux with stiffly accurate implicit part.
/// Throws NotStifflyAccurate / DegenerateTableau on precondition failure.
inline double stiff_limit_quantity(const IMEXTableau& t) {
    if (!has_stiffly_accurate_implicit(t))
        throw NotStifflyAccurate("stiff_limit_quantity: tableau '" + t.name +
                                 "' lacks a stiffly accurate implicit part");
    const TableauClass cls = classify(t);
    if (cls == TableauClass::TypeA) return 0.0; // R(inf)=0 automatically
    const int m = t.s - 1;
    std::vector<double> ahat, a_col, bhat;
    detail::split_ck(t, ahat, a_col, bhat);
    std::vector<double> y = dense_solve(m, ahat, a_col);
    return y[m - 1];
}

/// Coefficients alpha = -Ahat^{-1} a of the stiff-limit stage cascade for
/// CK/ARS tableaux: in the vanishing-relaxation limit, stage constraint
/// values satisfy G(U_k) with the first-stage contribution folded through
/// these coefficients.  Zero vector for ARS (a = 0).
inline std::vector<double> ck_cascade_coefficients(const IMEXTableau& t) {
    const int m = t.s - 1;
    std::vector<double> ahat, a_col, bhat;
    detail::split_ck(t, ahat, a_col, bhat);
    std::vector<double> y = dense_solve(m, ahat, a_col);
    for (double& v : y) v = -v;
    return y;
}

// ---------------------------------------------------------------------------
// Builtins
// ---------------------------------------------------------------------------

/// Construct one of the builtin IMEX pairs by name:
///   ARS222     3-stage, order 2, type ARS, globally stiffly accurate
///   SSP2_332   3-stage, order 2, type A (not globally stiffly accurate)
///   ARS443     5-stage, order 3, type ARS, globally stiffly accurate
///   BPR353     5-stage, order 3, type CK, globally stiffly accurate
///   EULER_IMEX 2-stage, order 1 (forward/backward Euler pair)
/// Coefficients are computed from exact closed forms.
/// Throws UnknownScheme for other names.
inline IMEXTableau builtin(const std::string& name) {
    IMEXTableau t;
    t.name = name;
    auto set_rows = [&](std::vector<std::vector<double>> aex,
                        std::vector<std::vector<double>> aim,
                        std::vector<double> bex, std::vector<double> bim,
                        std::vector<double> cex, std::vector<double> cim) {
        const int s = static_cast<int>(bex.size());
        t.s = s;
        t.A_ex.assign(static_cast<std::size_t>(s) * s, 0.0);
        t.A_im.assign(static_cast<std::size_t>(s) * s, 0.0);
        for (int i = 0; i < s; ++i) {
            for (std::size_t j = 0; j < aex[i].size(); ++j)
                t.aex(i, static_cast<int>(j)) = aex[i][j];
            for (std::size_t j = 0; j < aim[i].size(); ++j)
                t.aim(i, static_cast<int>(j)) = aim[i][j];
        }
        t.b_ex = std::move(bex);
        t.b_im = std::move(bim);
        t.c_ex = std::move(cex);
        t.c_im = std::move(cim);
    };

    if (name == "ARS222") {
        const double g = 1.0 - std::sqrt(2.0) / 2.0;  // (2 - sqrt(2)) / 2
        const double d = 1.0 - 1.0 / (2.0 * g);
        t.declared_order = 2;
        set_rows({{}, {g}, {d, 1.0 - d}},
                 {{0.0}, {0.0, g}, {0.0, 1.0 - g, g}},
                 {d, 1.0 - d, 0.0}, {0.0, 1.0 - g, g},
                 {0.0, g, 1.0}, {0.0, g, 1.0});
    } else if (name == "SSP2_332") {
        const double th = 1.0 / 3.0;
        t.declared_order = 2;
        set_rows({{}, {0.5}, {0.5, 0.5}},
                 {{0.25}, {0.0, 0.25}, {th, th, th}},
                 {th, th, th}, {th, th, th},
                 {0.0, 0.5, 1.0}, {0.25, 0.25, 1.0});
    } else if (name == "ARS443") {
        t.declared_order = 3;
        set_rows({{},
                  {1.0 / 2},
                  {11.0 / 18, 1.0 / 18},
                  {5.0 / 6, -5.0 / 6, 1.0 / 2},
                  {1.0 / 4, 7.0 / 4, 3.0 / 4, -7.0 / 4}},
                 {{0.0},
                  {0.0, 1.0 / 2},
                  {0.0, 1.0 / 6, 1.0 / 2},
                  {0.0, -1.0 / 2, 1.0 / 2, 1.0 / 2},
                  {0.0, 3.0 / 2, -3.0 / 2, 1.0 / 2, 1.0 / 2}},
                 {1.0 / 4, 7.0 / 4, 3.0 / 4, -7.0 / 4, 0.0},
                 {0.0, 3.0 / 2, -3.0 / 2, 1.0 / 2, 1.0 / 2},
                 {0.0, 1.0 / 2, 2.0 / 3, 1.0 / 2, 1.0},
                 {0.0, 1.0 / 2, 2.0 / 3, 1.0 / 2, 1.0});
    } else if (name == "BPR353") {
        t.declared_order = 3;
        set_rows({{},
                  {1.0},
                  {4.0 / 9, 2.0 / 9},
                  {1.0 / 4, 0.0, 3.0 / 4},
                  {1.0 / 4, 0.0, 3.0 / 4, 0.0}},
                 {{0.0},
                  {1.0 / 2, 1.0 / 2},
                  {5.0 / 18, -1.0 / 9, 1.0 / 2},
                  {1.0 / 2, 0.0, 0.0, 1.0 / 2},
                  {1.0 / 4, 0.0, 3.0 / 4, -1.0 / 2, 1.0 / 2}},
                 {1.0 / 4, 0.0, 3.0 / 4, 0.0, 0.0},
                 {1.0 / 4, 0.0, 3.0 / 4, -1.0 / 2, 1.0 / 2},
                 {0.0, 1.0, 2.0 / 3, 1.0, 1.0},
                 {0.0, 1.0, 2.0 / 3, 1.0, 1.0});
    } else if (name == "EULER_IMEX") {
        // Forward/backward Euler as the classical 2-stage shared pair:
        // the explicit flux is evaluated at the old state, the implicit
        // terms at the new one.  (A single shared stage cannot realize
        // this pair: its implicit diagonal would contaminate the state
        // the explicit part sees.)
        t.declared_order = 1;
        set_rows({{}, {1.0}},
                 {{0.0}, {0.0, 1.0}},
                 {1.0, 0.0}, {0.0, 1.0},
                 {0.0, 1.0}, {0.0, 1.0});
    } else {
        throw UnknownScheme("unknown builtin tableau '" + name + "'");
    }
    check_structure(t);
    return t;
}

/// Names accepted by builtin(), in canonical order.
inline const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {
        "ARS222", "SSP2_332", "ARS443", "BPR353", "EULER_IMEX"};
    return names;
}

// ---------------------------------------------------------------------------
// Plain-text catalog serialization
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_array(std::ostream& os, const char* key,
                        const std::vector<double>& a) {
    os << key << " =";
    for (double v : a) os << ' ' << format_g17(v);
    os << '\n';
}

} // namespace detail

/// Render a tableau as a plain-text key-value block.  All numbers use 17
/// significant digits, so parse_tableau(serialize_tableau(t)) reproduces
/// every coefficient bit-exactly.
inline std::string serialize_tableau(const IMEXTableau& t) {
    std::ostringstream os;
    os << "name = " << t.name << '\n';
    os << "s = " << t.s << '\n';
    os << "declared_order = " << t.declared_order << '\n';
    detail::write_array(os, "A_ex", t.A_ex);
    detail::write_array(os, "b_ex", t.b_ex);
    detail::write_array(os, "c_ex", t.c_ex);
    detail::write_array(os, "A_im", t.A_im);
    detail::write_array(os, "b_im", t.b_im);
    detail::write_array(os, "c_im", t.c_im);
    return os.str();
}

/// Parse the catalog block produced by serialize_tableau.
/// Throws ConfigError on malformed input.
inline IMEXTableau parse_tableau(std::istream& is) {
    IMEXTableau t;
    std::string line;
    bool have_s = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("tableau catalog: missing '=' in line: " + line);
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const char* ws = " \t\r";
            s.erase(0, s.find_first_not_of(ws));
            const std::size_t e = s.find_last_not_of(ws);
            s.erase(e == std::string::npos ? 0 : e + 1);
        };
        trim(key);
        trim(val);
        auto parse_vec = [&](std::size_t expect) {
            std::istringstream vs(val);
            std::vector<double> out;
            double x;
            while (vs >> x) out.push_back(x);
            if (out.size() != expect)
                throw ConfigError("tableau catalog: key '" + key + "' expects " +
                                  std::to_string(expect) + " numbers, got " +
                                  std::to_string(out.size()));
            return out;
        };
        if (key == "name") {
            t.name = val;
        } else if (key == "s") {
            t.s = std::stoi(val);
            have_s = true;
        } else if (key == "declared_order") {
            t.declared_order = std::stoi(val);
        } else if (!have_s) {
            throw ConfigError("tableau catalog: 's' must precede arrays");
        } else if (key == "A_ex") {
            t.A_ex = parse_vec(static_cast<std::size_t>(t.s) * t.s);
        } else if (key == "b_ex") {
            t.b_ex = parse_vec(t.s);
        } else if (key == "c_ex") {
            t.c_ex = parse_vec(t.s);
        } else if (key == "A_im") {
            t.A_im = parse_vec(static_cast<std::size_t>(t.s) * t.s);
        } else if (key == "b_im") {
            t.b_im = parse_vec(t.s);
        } else if (key == "c_im") {
            t.c_im = parse_vec(t.s);
        } else {
            throw ConfigError("tableau catalog: unknown key '" + key + "'");
        }
    }
    check_structure(t);
    return t;
}

/// 64-bit FNV-1a hash of a byte string; used to fingerprint the canonical
/// tableau serialization in run manifests.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Canonical checksum of a tableau (FNV-1a of its catalog rendering).
inline std::uint64_t tableau_checksum(const IMEXTableau& t) {
    return fnv1a64(serialize_tableau(t));
}

// ---------------------------------------------------------------------------
// Three-stage infeasibility sweep
// ---------------------------------------------------------------------------

/// Result of the stiffly-accurate 3-stage type-A feasibility sweep.
struct FeasibilityReport {
    double min_abs_gamma = 0.0;     ///< smallest |gamma| over the grid
    double max_condition_residual = 0.0;
    int grid_points = 0;
};

/// Sweep the free parameters of a 3-stage stiffly accurate type-A
/// candidate with abscissae c_ex = (0, ct2, 1), c_im = (c1, c2, 1),
/// implicit diagonal gamma, enforcing all four coupled second-order
/// conditions.  Eliminating the weights from the first three conditions
/// leaves the final condition in the exact form gamma * c1 = 0, so every
/// grid point with c1 != 0 forces gamma = 0 -- an invertible implicit
/// matrix is impossible for this family.  Returns the per-point solved
/// |gamma| minimum (exactly 0) and the worst residual of the remaining
/// conditions evaluated at the solved parameters.
inline FeasibilityReport theorem_three_stage_infeasibility(int grid_resolution) {
    if (grid_resolution < 10)
        throw ConfigError("three-stage sweep: grid_resolution must be >= 10");
    FeasibilityReport rep;
    rep.min_abs_gamma = 1e300;
    for (int a = 0; a < grid_resolution; ++a) {
        // ct2 in [0.05, 1], c1 in [0.01, 1] (denominators bounded away
        // from zero)
        const double ct2 =
            0.05 + (1.0 - 0.05) * a / (grid_resolution - 1.0);
        for (int b = 0; b < grid_resolution; ++b) {
            const double c1 =
                0.01 + (1.0 - 0.01) * b / (grid_resolution - 1.0);
            // chain of eliminations:
            //   b_ex . c_ex = 1/2  =>  bt2 = 1/(2 ct2)
            //   b_ex . c_im = 1/2  =>  c2  = c1 + 2 ct2 (1/2 - c1)
            //   b_im . c_ex = 1/2  =>  b2  = (1 - 2 gamma)/(2 ct2)
            //   b_im . 1    = 1    =>  b1  = 1 - gamma - b2
            // The remaining condition b_im . c_im = 1/2 is affine in
            // gamma; solve it numerically at this grid point.
            const double bt2 = 1.0 / (2.0 * ct2);
            const double bt1 = 1.0 - bt2;
            const double c2 = c1 + 2.0 * ct2 * (0.5 - c1);
            const double b20 = 1.0 / (2.0 * ct2);   // b2 = b20 + b21*gamma
            const double b21 = -1.0 / ct2;
            // r3(gamma) = p + q*gamma with
            const double p = (1.0 - b20) * c1 + b20 * c2 - 0.5;
            const double q = (-1.0 - b21) * c1 + b21 * c2 + 1.0;
            if (std::abs(q) < 1e-14) continue;      // degenerate direction
            const double gamma = -p / q;
            const double b2 = (1.0 - 2.0 * gamma) / (2.0 * ct2);
            const double b1 = 1.0 - gamma - b2;
            const double r1 = bt2 * ct2 - 0.5;
            const double r2 = bt1 * c1 + bt2 * c2 - 0.5;
            const double r3 = b1 * c1 + b2 * c2 + gamma - 0.5;
            const double r4 = b2 * ct2 + gamma - 0.5;
            const double res =
                std::max(std::max(std::abs(r1), std::abs(r2)),
                         std::max(std::abs(r3), std::abs(r4)));
            rep.max_condition_residual =
                std::max(rep.max_condition_residual, res);
            rep.min_abs_gamma = std::min(rep.min_abs_gamma, std::abs(gamma));
            ++rep.grid_points;
        }
    }
    return rep;
}

/// A 4-stage stiffly accurate type-A pair with gamma = 1/4 satisfying all
/// coupled second-order conditions: one extra stage removes the 3-stage
/// obstruction.  Returned for the companion sanity check.
inline IMEXTableau relaxed_four_stage_example() {
    IMEXTableau t;
    t.name = "RELAXED_442";
    t.declared_order = 2;
    t.s = 4;
    t.A_ex = {0.0, 0.0, 0.0, 0.0,
              0.5, 0.0, 0.0, 0.0,
              0.375, 0.375, 0.0, 0.0,
              1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0};
    t.b_ex = {0.0, 1.0, 0.0, 0.0};
    t.c_ex = {0.0, 0.5, 0.75, 1.0};
    t.A_im = {0.25, 0.0, 0.0, 0.0,
              0.25, 0.25, 0.0, 0.0,
              0.25, 0.25, 0.25, 0.0,
              0.0, 1.25, -0.5, 0.25};
    t.b_im = {0.0, 1.25, -0.5, 0.25};
    t.c_im = {0.25, 0.5, 0.75, 1.0};
    check_structure(t);
    return t;
}

} // namespace diffrelax

#endif // DIFFRELAX_TABLEAU_HPP
