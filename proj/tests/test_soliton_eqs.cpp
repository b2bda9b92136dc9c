#include <cmath>
#include <numbers>

#include "affsurf/error.hpp"
#include "affsurf/immersion.hpp"
#include "affsurf/soliton_eqs.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace affsurf;
using std::numbers::pi;

TEST_CASE("residuals vanish on trivial constant solutions") {
    const Grid2 g = make_grid({0, 1, 0, 1}, 9, 9);
    const ScalarField2D zero(g, 0.0);
    CHECK(max_abs(residual(SolitonEquation::sine_gordon(), zero)) == 0);
    CHECK(max_abs(residual(SolitonEquation::tzitzeica(-1), zero)) == 0);
    CHECK(max_abs(residual(SolitonEquation::sphere_lambda(-2), zero)) == 0);
    CHECK(max_abs(residual(SolitonEquation::sinh_gordon(), zero)) == 0);
    CHECK(max_abs(residual(SolitonEquation::linear(), zero)) == 0);
}

TEST_CASE("exact solutions give O(h^2) residuals") {
    const oracle::Kink kink;
    auto liou = [](double x, double y) { return std::log((x + y) * (x + y) / 2); };
    double pk = 0, pl = 0;
    for (int n : {33, 65, 129}) {
        const Grid2 gk = make_grid({-2, 2, 0, 1}, n, n, 1, -1);
        const double ek = max_abs(residual(SolitonEquation::sine_gordon(), ScalarField2D::sample(gk, kink)));
        const Grid2 gl = make_grid({0.5, 1.5, 0.5, 1.5}, n, n);
        const double el = max_abs(residual(SolitonEquation::liouville(-1), ScalarField2D::sample(gl, liou)));
        if (pk > 0) {
            CHECK(pk / ek >= 3.5);
            CHECK(pl / el >= 3.5);
        }
        pk = ek;
        pl = el;
    }
    CHECK(pk < 1e-3);
    CHECK(pl < 1e-3);
}

TEST_CASE("residual guards report the offending node") {
    const Grid2 g = make_grid({0, 1, 0, 1}, 5, 5);
    ScalarField2D lam(g, 0.5), mu(g, 2.0);
    mu(3, 1) = 0.5;
    try {
        residual(SolitonEquation::gauss_system(1), {lam, mu});
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(e.i() == 3);
        CHECK(e.j() == 1);
    }
    ScalarField2D b(g, 1.0);
    b(2, 4) = 0;
    CHECK_THROWS_AS(residual(SolitonEquation::complex_gauss(), {lam, b}), DomainError);
    ScalarField2D l(g, 0.3);
    l(1, 1) = 1.0;
    CHECK_THROWS_AS(residual(SolitonEquation::constant_tau(1), l), DomainError);
    CHECK_THROWS_AS(residual(SolitonEquation::gauss_system(1), {lam}), ValidationError);
}

TEST_CASE("elliptic Newton recovers the constant sphere solution") {
    const Grid2 g = make_grid({-0.5, 0.5, -0.5, 0.5}, 17, 17);
    const ScalarField2D bnd(g, 0.0);
    const SolitonEquation eq = SolitonEquation::sphere_lambda(-2);
    const SolveResult r = solve_elliptic(eq, bnd, with_edges(ScalarField2D(g, 0.1), bnd));
    CHECK(max_abs(r.psi) < 1e-10);
    CHECK(r.report.residual_norm < 1e-10);
    CHECK(max_abs_interior(residual(eq, r.psi)) < 1e-10);
    CHECK(r.report.iterations > 0);

    const SolveResult lin = solve_elliptic(SolitonEquation::linear(), bnd, bnd);
    CHECK(max_abs(lin.psi) == 0);
    CHECK(lin.report.iterations == 0);
}

TEST_CASE("elliptic manufactured solution converges at second order") {
    auto ex = [](double x, double y) { return 0.3 * std::sin(x) * std::cos(y); };
    double prev = 0;
    for (int n : {17, 33, 65}) {
        const Grid2 g = make_grid({0, 1, 0, 1}, n, n);
        const SolitonEquation eq = SolitonEquation::sinh_gordon();
        // d0 psi* = -2 psi*, so the source is -2 psi* + sinh psi*
        const ScalarField2D src = ScalarField2D::sample(g, [&](double x, double y) {
            const double p = ex(x, y);
            return -2 * p + std::sinh(p);
        });
        const ScalarField2D E = ScalarField2D::sample(g, ex);
        const SolveResult r = solve_elliptic(eq, E, with_edges(ScalarField2D(g, 0.0), E), {}, &src);
        const double e = max_abs(r.psi - E);
        if (prev > 0) CHECK(prev / e >= 3.5);
        prev = e;
    }
}

TEST_CASE("elliptic solver rejects bad setups and reports divergence") {
    const Grid2 g = make_grid({-5, 5, -5, 5}, 33, 33);
    const ScalarField2D z(g, 0.0);
    CHECK_THROWS_AS(solve_elliptic(SolitonEquation::sphere_lambda(1), z, z), NumericalError);
    CHECK_THROWS_AS(solve_elliptic(SolitonEquation::cosh_gordon(), z, z), ValidationError);
    const Grid2 h = make_grid({0, 1, 0, 1}, 9, 9, 1, -1);
    CHECK_THROWS_AS(solve_elliptic(SolitonEquation::sine_gordon(), ScalarField2D(h, 0.0), ScalarField2D(h, 0.0)),
                    ValidationError);
    const Grid2 s = make_grid({0, 1, 0, 1}, 9, 9);
    CHECK_THROWS_AS(solve_elliptic(SolitonEquation::sine_gordon(), ScalarField2D(s, 0.0), ScalarField2D(s, 1.0)),
                    DomainError);
    try {
        solve_elliptic(SolitonEquation::linear(), ScalarField2D(s, 0.0), ScalarField2D(s, 0.0), {1e-10, 0, 1.0});
        FAIL("expected a validation error");
    } catch (const ValidationError&) {
    }
}

TEST_CASE("Goursat marching with zero right-hand side is d'Alembert splitting") {
    const Grid2 g = make_grid({0, 1, 0, 2}, 11, 21);
    std::vector<double> row(g.n1), col(g.n2);
    for (int i = 0; i < g.n1; ++i) row[i] = 1 + 2 * g.x1(i);
    for (int j = 0; j < g.n2; ++j) col[j] = 1 - 0.5 * g.x2(j);
    const ScalarField2D u = solve_goursat([](double, double, double) { return 0.0; }, g, row, col);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) CHECK(u(i, j) == doctest::Approx(row[i] + col[j] - row[0]).epsilon(1e-14));
    col[0] = 5;
    CHECK_THROWS_AS(solve_goursat(SolitonEquation::cosh_gordon(), g, row, col), ValidationError);
    CHECK_THROWS_AS(solve_goursat(SolitonEquation::sine_gordon(), g, row, row), ValidationError);
}

TEST_CASE("Goursat Liouville converges to the exact solution") {
    auto ue = [](double x, double y) { return std::log((x + y) * (x + y) / 2); };
    double prev = 0;
    for (int n : {33, 65, 129}) {
        const Grid2 g = make_grid({0.5, 1.5, 0.5, 1.5}, n, n);
        std::vector<double> row(n), col(n);
        for (int i = 0; i < n; ++i) {
            row[i] = ue(g.x1(i), g.x2_min);
            col[i] = ue(g.x1_min, g.x2(i));
        }
        const double e = max_abs(solve_goursat(SolitonEquation::liouville(-1), g, row, col) - ScalarField2D::sample(g, ue));
        if (prev > 0) CHECK(prev / e >= 3.5);
        prev = e;
    }
}

TEST_CASE("Goursat cosh-Gordon self-convergence against a 4x finer reference") {
    auto row_fn = [](double x) { return 0.2 * std::sin(2 * x); };
    auto col_fn = [](double y) { return -0.3 * y * y; };
    auto run = [&](int n) {
        const Grid2 g = make_grid({0, 1, 0, 1}, n, n);
        std::vector<double> row(n), col(n);
        for (int i = 0; i < n; ++i) row[i] = row_fn(g.x1(i));
        for (int j = 0; j < n; ++j) col[j] = col_fn(g.x2(j));
        return solve_goursat(SolitonEquation::cosh_gordon(), g, row, col);
    };
    double prev = 0;
    for (int n : {17, 33, 65}) {
        const ScalarField2D coarse = run(n), fine = run(4 * (n - 1) + 1);
        double e = 0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) e = std::max(e, std::abs(coarse(i, j) - fine(4 * i, 4 * j)));
        if (prev > 0) CHECK(prev / e >= 3.5);
        prev = e;
    }
}

TEST_CASE("leapfrog marching for the hyperbolic signature") {
    const Grid2 g = make_grid({-2, 2, 0, 1}, 33, 33, 1, -1);
    const std::vector<double> zero(33, 0.0);
    CHECK(max_abs(solve_cauchy(SolitonEquation::sine_gordon(), g, zero, zero)) == 0);

    const Grid2 bad = make_grid({0, 1, 0, 4}, 11, 11, 1, -1);
    CHECK_THROWS_AS(solve_cauchy(SolitonEquation::sine_gordon(), bad, std::vector<double>(11, 0.0),
                                 std::vector<double>(11, 0.0)),
                    ValidationError);
    const Grid2 ell = make_grid({0, 1, 0, 1}, 11, 11);
    CHECK_THROWS_AS(solve_cauchy(SolitonEquation::sine_gordon(), ell, std::vector<double>(11, 0.0),
                                 std::vector<double>(11, 0.0)),
                    ValidationError);
}

TEST_CASE("leapfrog kink and manufactured solution converge at second order") {
    const oracle::Kink kink;
    auto ms = [](double x, double y) { return 0.4 * std::sin(x + 0.5) * std::cos(0.5 * y) + 0.1 * x * y; };
    // psi_11 - psi_22 for ms
    auto ms_d0 = [](double x, double y) { return -0.3 * std::sin(x + 0.5) * std::cos(0.5 * y); };
    double pk = 0, pm = 0;
    for (int n : {33, 65, 129}) {
        const Grid2 g = make_grid({-2, 2, 0, 1}, n, n, 1, -1);
        std::vector<double> p0(n), d0(n), m0(n), md(n);
        for (int i = 0; i < n; ++i) {
            const double x = g.x1(i);
            p0[i] = kink(x, 0);
            d0[i] = kink.dt(x, 0);
            m0[i] = ms(x, 0);
            md[i] = 0.1 * x;  // d2 ms at x2 = 0
        }
        CauchyOptions ck;
        ck.sides = EdgeValues(kink);
        const double ek = max_abs(solve_cauchy(SolitonEquation::sine_gordon(), g, p0, d0, ck) - ScalarField2D::sample(g, kink));

        const ScalarField2D src = ScalarField2D::sample(g, [&](double x, double y) { return ms_d0(x, y) - std::sin(ms(x, y)); });
        CauchyOptions cm;
        cm.sides = EdgeValues(ms);
        cm.source = &src;
        const double em = max_abs(solve_cauchy(SolitonEquation::sine_gordon(), g, m0, md, cm) - ScalarField2D::sample(g, ms));
        if (pk > 0) {
            CHECK(pk / ek >= 3.5);
            CHECK(pm / em >= 3.5);
        }
        pk = ek;
        pm = em;
    }
}

TEST_CASE("rigid motions are symmetries of the sphere equation") {
    // residual((u o g)) against residual(u) o g, the latter read off by interpolation
    auto u = [](double x, double y) { return 0.2 * std::sin(x) * std::cos(0.5 * y) + 0.1 * x; };
    const GroupElement e{GroupKind::AO2, 0.3, 1, 0.05, -0.02};
    double prev = 0;
    for (int n : {33, 65, 129}) {
        const Grid2 g = make_grid({-1, 1, -1, 1}, n, n);
        const SolitonEquation eq = SolitonEquation::sphere_lambda(-1.5);
        const ScalarField2D ru = residual(eq, ScalarField2D::sample(g, u));
        const ScalarField2D rug = residual(eq, ScalarField2D::sample(g, [&](double x, double y) {
            const auto p = e.apply(x, y);
            return u(p[0], p[1]);
        }));
        double d = 0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if (std::abs(g.x1(i)) > 0.5 || std::abs(g.x2(j)) > 0.5) continue;
                const auto p = e.apply(g.x1(i), g.x2(j));
                d = std::max(d, std::abs(rug(i, j) - bilinear(ru, p[0], p[1])));
            }
        if (prev > 0) CHECK(prev / d >= 3.0);
        prev = d;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("Lorentz motions are symmetries of the indefinite sphere equation") {
    auto u = [](double x, double y) { return 0.2 * std::sin(x) * std::cos(0.5 * y) + 0.1 * y; };
    const GroupElement e{GroupKind::AO11, 0.25, 1, 0.03, 0.01};
    double prev = 0;
    for (int n : {33, 65, 129}) {
        const Grid2 g = make_grid({-1, 1, -1, 1}, n, n, 1, -1);
        const SolitonEquation eq = SolitonEquation::sphere_lambda1(-1.5, -1);
        const ScalarField2D ru = residual(eq, ScalarField2D::sample(g, u));
        const ScalarField2D rug = residual(eq, ScalarField2D::sample(g, [&](double x, double y) {
            const auto p = e.apply(x, y);
            return u(p[0], p[1]);
        }));
        double d = 0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if (std::abs(g.x1(i)) > 0.5 || std::abs(g.x2(j)) > 0.5) continue;
                const auto p = e.apply(g.x1(i), g.x2(j));
                d = std::max(d, std::abs(rug(i, j) - bilinear(ru, p[0], p[1])));
            }
        if (prev > 0) CHECK(prev / d >= 3.0);
        prev = d;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("equation tags round-trip") {
    for (const char* t : {"sinh-gordon", "linear", "sine-gordon", "cosh-gordon", "tzitzeica", "sphere-lambda",
                          "sphere-lambda1", "liouville", "gauss-system", "constant-tau", "complex-gauss", "phi-eq"})
        CHECK(to_string(eq_tag_from_string(t)) == t);
    CHECK_THROWS_AS(eq_tag_from_string("kdv"), ValidationError);
    CHECK_THROWS_AS(SolitonEquation::sphere_lambda1(1, 2).validate(), ValidationError);
}
