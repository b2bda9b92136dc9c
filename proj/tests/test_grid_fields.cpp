#include <cmath>

#include "affsurf/error.hpp"
#include "affsurf/grid_fields.hpp"
#include "affsurf/io.hpp"
#include "doctest.h"

using namespace affsurf;

TEST_CASE("make_grid spacings and rejection") {
    const Grid2 a = make_grid({-1, 1, -1, 1}, 3, 3, 1, 1);
    CHECK(a.h1() == doctest::Approx(1.0));
    CHECK(a.h2() == doctest::Approx(1.0));
    const Grid2 b = make_grid({0, 1, 0, 2}, 11, 21, 1, -1);
    CHECK(b.h1() == doctest::Approx(0.1));
    CHECK(b.h2() == doctest::Approx(0.1));
    CHECK(b.eta == -1);
    CHECK_THROWS_AS(make_grid({1, 0, 0, 1}, 5, 5), ValidationError);
    CHECK_THROWS_AS(make_grid({0, 1, 0, 1}, 2, 5), ValidationError);
    CHECK_THROWS_AS(make_grid({0, 1, 0, 1}, 5, 5, 0, 1), ValidationError);
}

TEST_CASE("layout is row-major with x1 fastest") {
    const Grid2 g = make_grid({0, 1, 0, 1}, 4, 3);
    CHECK(g.index(1, 0) == 1);
    CHECK(g.index(0, 1) == 4);
    CHECK(g.index(3, 2) == 11);
}

TEST_CASE("derivatives of constants vanish") {
    const Grid2 g = make_grid({-1, 2, 0, 1}, 9, 7);
    const ScalarField2D c(g, 3.5);
    for (Deriv d : {Deriv::d1, Deriv::d2, Deriv::d11, Deriv::d22, Deriv::d12}) CHECK(max_abs(diff(c, d)) < 1e-12);
    CHECK(max_abs(laplace0(c)) < 1e-12);
}

TEST_CASE("stencils are exact on quadratics, boundary included") {
    const Grid2 g = make_grid({-0.7, 1.3, 0.2, 1.1}, 7, 9);
    const ScalarField2D q = ScalarField2D::sample(g, [](double x, double y) { return x * x - 3 * x * y + 2 * y * y + x - y; });
    const ScalarField2D d1 = diff(q, Deriv::d1), d2 = diff(q, Deriv::d2);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const double x = g.x1(i), y = g.x2(j);
            CHECK(d1(i, j) == doctest::Approx(2 * x - 3 * y + 1).epsilon(1e-11));
            CHECK(d2(i, j) == doctest::Approx(-3 * x + 4 * y - 1).epsilon(1e-11));
        }
    CHECK(max_abs(diff(q, Deriv::d11) - ScalarField2D(g, 2.0)) < 1e-9);
    CHECK(max_abs(diff(q, Deriv::d22) - ScalarField2D(g, 4.0)) < 1e-9);
    CHECK(max_abs(diff(q, Deriv::d12) - ScalarField2D(g, -3.0)) < 1e-9);
}

TEST_CASE("signed Laplacian of x1^2 + x2^2") {
    auto f = [](double x, double y) { return x * x + y * y; };
    const Grid2 hyp = make_grid({-1, 1, -1, 1}, 11, 11, 1, -1);
    CHECK(max_abs(laplace0(ScalarField2D::sample(hyp, f))) < 1e-10);
    const Grid2 ell = make_grid({-1, 1, -1, 1}, 11, 11, 1, 1);
    CHECK(max_abs(laplace0(ScalarField2D::sample(ell, f)) - ScalarField2D(ell, 4.0)) < 1e-10);
}

TEST_CASE("second-order convergence under grid halving") {
    auto f = [](double x, double y) { return std::sin(x) * std::exp(0.5 * y); };
    struct Op {
        Deriv d;
        std::function<double(double, double)> exact;
    };
    const std::vector<Op> ops = {
        {Deriv::d1, [](double x, double y) { return std::cos(x) * std::exp(0.5 * y); }},
        {Deriv::d2, [](double x, double y) { return 0.5 * std::sin(x) * std::exp(0.5 * y); }},
        {Deriv::d11, [](double x, double y) { return -std::sin(x) * std::exp(0.5 * y); }},
        {Deriv::d22, [](double x, double y) { return 0.25 * std::sin(x) * std::exp(0.5 * y); }},
        {Deriv::d12, [](double x, double y) { return 0.5 * std::cos(x) * std::exp(0.5 * y); }},
    };
    for (const Op& op : ops) {
        double prev = 0;
        for (int n : {33, 65, 129}) {
            const Grid2 g = make_grid({0, 1, 0, 1}, n, n);
            const double e = max_abs(diff(ScalarField2D::sample(g, f), op.d) - ScalarField2D::sample(g, op.exact));
            if (prev > 0) {
                CHECK(prev / e >= 3.5);
                CHECK(prev / e <= 4.5);
            }
            prev = e;
        }
    }
}

TEST_CASE("linearity and mixed-partial symmetry") {
    const Grid2 g = make_grid({0, 1, 0, 1}, 33, 33);
    const ScalarField2D a = ScalarField2D::sample(g, [](double x, double y) { return std::cos(2 * x + y); });
    const ScalarField2D b = ScalarField2D::sample(g, [](double x, double y) { return x * std::exp(y); });
    for (Deriv d : {Deriv::d1, Deriv::d2, Deriv::d11, Deriv::d22, Deriv::d12})
        CHECK(max_abs(diff(2.0 * a + -3.0 * b, d) - (2.0 * diff(a, d) + -3.0 * diff(b, d))) < 1e-9);

    const ScalarField2D m = diff(a, Deriv::d12);
    const ScalarField2D c12 = diff(diff(a, Deriv::d1), Deriv::d2), c21 = diff(diff(a, Deriv::d2), Deriv::d1);
    CHECK(max_abs_interior(c12 - c21) < 1e-9);
    const double h = g.h1();
    CHECK(max_abs_interior(m - c12) < 10 * h * h);
}

TEST_CASE("validation of non-finite input") {
    const Grid2 g = make_grid({0, 1, 0, 1}, 5, 5);
    ScalarField2D f(g, 0.0);
    f(2, 2) = std::nan("");
    CHECK_THROWS_AS(diff(f, Deriv::d1), ValidationError);
    CHECK_THROWS_AS(ScalarField2D(g, std::vector<double>(3, 0.0)), ValidationError);
}

TEST_CASE("bilinear interpolation reproduces bilinear functions") {
    const Grid2 g = make_grid({0, 2, -1, 1}, 5, 9);
    const ScalarField2D f = ScalarField2D::sample(g, [](double x, double y) { return 1 + 2 * x - y + 0.5 * x * y; });
    CHECK(bilinear(f, 0.37, 0.11) == doctest::Approx(1 + 0.74 - 0.11 + 0.5 * 0.37 * 0.11));
    CHECK(bilinear(f, 2, 1) == doctest::Approx(1 + 4 - 1 + 1));
    CHECK_THROWS_AS(bilinear(f, 2.5, 0), ValidationError);
}

TEST_CASE("CSV round-trip is exact") {
    const Grid2 g = make_grid({-0.3, 0.7, 0.1, 0.9}, 6, 4, 1, -1);
    const ScalarField2D f = ScalarField2D::sample(g, [](double x, double y) { return std::exp(x) / 3 + std::sin(7 * y); });
    const std::string text = field_to_csv(f);
    CHECK(text.rfind("# -0.29999999999999999 0.69999999999999996 0.10000000000000001 0.90000000000000002 6 4 1 -1\n", 0) ==
          0);
    const ScalarField2D back = field_from_csv(text);
    CHECK(back.grid == g);
    CHECK(back.values == f.values);
    CHECK_THROWS_AS(field_from_csv("1\n2\n"), ValidationError);
    CHECK_THROWS_AS(field_from_csv("# 0 1 0 1 3 3 1 1\n1\n2\n"), ValidationError);
}
