// ===========================================================================
//  test_tableau.cpp -- unit tests for the IMEX tableau toolkit.
//
//  Reference values (classifications, stiff limits, order-condition
//  residuals) were frozen from an independent Python/NumPy implementation.
// ===========================================================================

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "diffrelax/errors.hpp"
#include "diffrelax/tableau.hpp"

using namespace diffrelax;

// ---------------------------------------------------------------------------
// Builtins: structure, classification, stiff accuracy
// ---------------------------------------------------------------------------

TEST_CASE("builtin names resolve and unknown names throw") {
    for (const auto& name : builtin_names())
        CHECK_NOTHROW(builtin(name));
    CHECK_THROWS_AS(builtin("NOPE"), UnknownScheme);
}

TEST_CASE("builtin classifications") {
    CHECK(classify(builtin("ARS222")) == TableauClass::TypeARS);
    CHECK(classify(builtin("SSP2_332")) == TableauClass::TypeA);
    CHECK(classify(builtin("ARS443")) == TableauClass::TypeARS);
    CHECK(classify(builtin("BPR353")) == TableauClass::TypeCK);
    CHECK(classify(builtin("EULER_IMEX")) == TableauClass::TypeARS);
}

TEST_CASE("classification rejects degenerate implicit matrices") {
    IMEXTableau t = builtin("EULER_IMEX");
    t.aim(1, 1) = 0.0;  // trailing block now singular
    t.c_im[1] = 0.0;    // keep row sums consistent
    CHECK_THROWS_AS(classify(t), DegenerateTableau);
}

TEST_CASE("global stiff accuracy of the builtins") {
    CHECK(is_globally_stiffly_accurate(builtin("ARS222")));
    CHECK(is_globally_stiffly_accurate(builtin("ARS443")));
    CHECK(is_globally_stiffly_accurate(builtin("BPR353")));
    CHECK(is_globally_stiffly_accurate(builtin("EULER_IMEX")));
    CHECK_FALSE(is_globally_stiffly_accurate(builtin("SSP2_332")));
    // ... though SSP2's implicit part alone is stiffly accurate
    CHECK(has_stiffly_accurate_implicit(builtin("SSP2_332")));
}

TEST_CASE("structure checker catches a broken row sum") {
    IMEXTableau t = builtin("ARS222");
    t.c_ex[2] += 1e-9;
    CHECK_THROWS_AS(check_structure(t), DegenerateTableau);
}

// ---------------------------------------------------------------------------
// Order conditions
// ---------------------------------------------------------------------------

TEST_CASE("all builtins satisfy their declared order conditions") {
    for (const auto& name : builtin_names()) {
        const IMEXTableau t = builtin(name);
        const ValidationReport rep = validate_order(t, t.declared_order);
        INFO("scheme " << name << " max residual " << rep.max_residual());
        CHECK(rep.pass);
        CHECK(rep.max_residual() <= 1e-12);
    }
}

TEST_CASE("third-order pairs satisfy the full coupled condition set exactly") {
    for (const char* name : {"ARS443", "BPR353"}) {
        const ValidationReport rep = validate_order(builtin(name), 3);
        CHECK(rep.entries.size() == 2 + 4 + 6 + 8);
        for (const auto& e : rep.entries) {
            INFO(name << ": " << e.id << " residual " << e.residual);
            CHECK(std::abs(e.residual) <= 1e-12);
        }
    }
}

TEST_CASE("second-order pairs fail at least one third-order condition") {
    for (const char* name : {"ARS222", "SSP2_332"}) {
        const ValidationReport rep = validate_order(builtin(name), 3);
        CHECK_FALSE(rep.pass);
        CHECK(rep.max_residual() > 1e-3);
    }
}

TEST_CASE("stiff-limit order conditions for stiffly accurate implicit parts") {
    // residuals |c_ex[s]-1| and |rowlast(A_ex).c_ex - 1/2|
    for (const char* name : {"ARS222", "ARS443", "BPR353"}) {
        const ValidationReport rep =
            check_algebraic_conditions(builtin(name));
        INFO(name);
        CHECK(rep.pass);
        CHECK(rep.max_residual() <= 1e-13);
    }
    // SSP2: abscissa condition holds, the coupling product is 1/4 not 1/2
    const ValidationReport rep = check_algebraic_conditions(builtin("SSP2_332"));
    CHECK(std::abs(rep.entries[0].residual) <= 1e-13);
    CHECK(rep.entries[1].residual == Catch::Approx(-0.25).margin(1e-13));

    IMEXTableau bad = builtin("EULER_IMEX");
    bad.b_im = {0.5, 0.5};
    CHECK_THROWS_AS(check_algebraic_conditions(bad), NotStifflyAccurate);
}

// ---------------------------------------------------------------------------
// Stiff-limit stability function
// ---------------------------------------------------------------------------

TEST_CASE("r_infinity vanishes for every builtin except BPR353") {
    CHECK(std::abs(r_infinity(builtin("ARS222"))) <= 1e-12);
    CHECK(std::abs(r_infinity(builtin("SSP2_332"))) <= 1e-12);
    CHECK(std::abs(r_infinity(builtin("ARS443"))) <= 1e-12);
    CHECK(std::abs(r_infinity(builtin("EULER_IMEX"))) <= 1e-12);
    CHECK(r_infinity(builtin("BPR353")) ==
          Catch::Approx(-1.0 / 3.0).margin(1e-13));
}

TEST_CASE("stiff-limit quantity (last cascade weight) for the builtins") {
    // e_{s-1}^T Ahat^{-1} a: zero iff R(inf)=0 for stiffly accurate pairs
    CHECK(std::abs(stiff_limit_quantity(builtin("ARS222"))) <= 1e-13);
    CHECK(std::abs(stiff_limit_quantity(builtin("ARS443"))) <= 1e-13);
    CHECK(stiff_limit_quantity(builtin("BPR353")) ==
          Catch::Approx(1.0 / 3.0).margin(1e-13));
}

TEST_CASE("r_infinity matches the resolvent limit of the stability function") {
    // R(z) = 1 + z b^T (I - z A)^{-1} 1 evaluated at a very stiff z should
    // approach the closed-form limit computed from the tableau blocks.
    for (const auto& name : builtin_names()) {
        const IMEXTableau t = builtin(name);
        const double z = -1e10;
        std::vector<double> m(static_cast<std::size_t>(t.s) * t.s, 0.0);
        std::vector<double> ones(t.s, 1.0);
        for (int i = 0; i < t.s; ++i)
            for (int j = 0; j < t.s; ++j)
                m[static_cast<std::size_t>(i) * t.s + j] =
                    (i == j ? 1.0 : 0.0) - z * t.aim(i, j);
        const std::vector<double> y = dense_solve(t.s, m, ones);
        double rz = 1.0;
        for (int j = 0; j < t.s; ++j) rz += z * t.b_im[j] * y[j];
        INFO(name << ": R(-1e10) = " << rz);
        CHECK(rz == Catch::Approx(r_infinity(t)).margin(1e-8));
    }
}

TEST_CASE("cascade coefficients reproduce -Ahat^{-1} a for BPR353") {
    const std::vector<double> alpha =
        ck_cascade_coefficients(builtin("BPR353"));
    REQUIRE(alpha.size() == 4);
    CHECK(alpha[0] == Catch::Approx(-1.0).margin(1e-14));
    CHECK(alpha[1] == Catch::Approx(-7.0 / 9.0).margin(1e-14));
    CHECK(alpha[2] == Catch::Approx(-1.0).margin(1e-14));
    CHECK(alpha[3] == Catch::Approx(-1.0 / 3.0).margin(1e-14));
    // ARS types have a zero first implicit column, hence a zero cascade
    for (double v : ck_cascade_coefficients(builtin("ARS443")))
        CHECK(v == 0.0);
}

// ---------------------------------------------------------------------------
// Catalog round-trip and checksum
// ---------------------------------------------------------------------------

TEST_CASE("catalog serialization round-trips bit-exactly") {
    for (const auto& name : builtin_names()) {
        const IMEXTableau t = builtin(name);
        const std::string text = serialize_tableau(t);
        std::istringstream is(text);
        const IMEXTableau u = parse_tableau(is);
        CHECK(u.name == t.name);
        CHECK(u.s == t.s);
        CHECK(u.declared_order == t.declared_order);
        CHECK(u.A_ex == t.A_ex);  // exact bit equality
        CHECK(u.b_ex == t.b_ex);
        CHECK(u.c_ex == t.c_ex);
        CHECK(u.A_im == t.A_im);
        CHECK(u.b_im == t.b_im);
        CHECK(u.c_im == t.c_im);
        CHECK(serialize_tableau(u) == text);
        CHECK(tableau_checksum(u) == tableau_checksum(t));
    }
}

TEST_CASE("catalog parser rejects malformed input") {
    {
        std::istringstream is("name = X\nbogus_key = 1\n");
        CHECK_THROWS_AS(parse_tableau(is), ConfigError);
    }
    {
        std::istringstream is("name = X\nb_ex = 1 0\n"); // arrays before s
        CHECK_THROWS_AS(parse_tableau(is), ConfigError);
    }
    {
        std::istringstream is("name = X\ns = 2\nb_ex = 1 0 0\n"); // wrong len
        CHECK_THROWS_AS(parse_tableau(is), ConfigError);
    }
}

TEST_CASE("fnv1a64 known vectors") {
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 12638187200555641996ull);
}

// ---------------------------------------------------------------------------
// Three-stage infeasibility sweep
// ---------------------------------------------------------------------------

TEST_CASE("three-stage stiffly accurate sweep forces a singular diagonal") {
    const FeasibilityReport rep = theorem_three_stage_infeasibility(20);
    CHECK(rep.grid_points == 400);
    CHECK(rep.min_abs_gamma <= 1e-10);
    CHECK(rep.max_condition_residual <= 1e-12);
    CHECK_THROWS_AS(theorem_three_stage_infeasibility(5), ConfigError);
}

TEST_CASE("one extra stage removes the obstruction") {
    const IMEXTableau t = relaxed_four_stage_example();
    CHECK(classify(t) == TableauClass::TypeA);
    CHECK(t.aim(0, 0) == Catch::Approx(0.25));
    CHECK(has_stiffly_accurate_implicit(t));
    const ValidationReport rep = validate_order(t, 2);
    INFO("max residual " << rep.max_residual());
    CHECK(rep.pass);
    CHECK(rep.max_residual() <= 1e-14);
}
