#include "affsurf/grid_fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "affsurf/error.hpp"

namespace affsurf {

Grid2 make_grid(const std::array<double, 4>& b, int n1, int n2, int eps, int eta) {
    for (double v : b)
        if (!std::isfinite(v)) throw ValidationError("grid bounds must be finite");
    if (!(b[1] > b[0]) || !(b[3] > b[2])) throw ValidationError("grid bounds must be ordered (min < max)");
    if (n1 < 3 || n2 < 3) throw ValidationError("grid needs at least 3 nodes per direction");
    if ((eps != 1 && eps != -1) || (eta != 1 && eta != -1))
        throw ValidationError("signature signs must be +1 or -1");
    Grid2 g;
    g.x1_min = b[0];
    g.x1_max = b[1];
    g.x2_min = b[2];
    g.x2_max = b[3];
    g.n1 = n1;
    g.n2 = n2;
    g.eps = eps;
    g.eta = eta;
    return g;
}

Grid2 with_signature(const Grid2& g, int eps, int eta) {
    return make_grid({g.x1_min, g.x1_max, g.x2_min, g.x2_max}, g.n1, g.n2, eps, eta);
}

ScalarField2D::ScalarField2D(const Grid2& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != g.size()) throw ValidationError("field length does not match grid");
}

ScalarField2D ScalarField2D::sample(const Grid2& g, const std::function<double(double, double)>& fn) {
    ScalarField2D out(g);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) out(i, j) = fn(g.x1(i), g.x2(j));
    return out;
}

ScalarField2D Vec3Field2D::component(int c) const {
    ScalarField2D out(grid);
    for (std::size_t k = 0; k < values.size(); ++k) out.values[k] = values[k][c];
    return out;
}

Vec3Field2D Vec3Field2D::from_components(const ScalarField2D& x, const ScalarField2D& y, const ScalarField2D& z) {
    require_same_grid(x.grid, y.grid, "from_components");
    require_same_grid(x.grid, z.grid, "from_components");
    Vec3Field2D out(x.grid);
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = {x.values[k], y.values[k], z.values[k]};
    return out;
}

Vec3Field2D Vec3Field2D::sample(const Grid2& g, const std::function<Vec3(double, double)>& fn) {
    Vec3Field2D out(g);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) out(i, j) = fn(g.x1(i), g.x2(j));
    return out;
}

namespace {

// First derivative along a strided line of n samples.
void d1_line(const double* f, std::size_t stride, int n, double h, double* out) {
    const double inv2h = 1.0 / (2.0 * h);
    out[0] = (-3.0 * f[0] + 4.0 * f[stride] - f[2 * stride]) * inv2h;
    for (int k = 1; k < n - 1; ++k) out[k * stride] = (f[(k + 1) * stride] - f[(k - 1) * stride]) * inv2h;
    const std::size_t e = (n - 1) * stride;
    out[e] = (3.0 * f[e] - 4.0 * f[e - stride] + f[e - 2 * stride]) * inv2h;
}

void d2_line(const double* f, std::size_t stride, int n, double h, double* out) {
    const double invh2 = 1.0 / (h * h);
    for (int k = 1; k < n - 1; ++k)
        out[k * stride] = (f[(k + 1) * stride] - 2.0 * f[k * stride] + f[(k - 1) * stride]) * invh2;
    const std::size_t e = (n - 1) * stride;
    if (n >= 4) {
        out[0] = (2.0 * f[0] - 5.0 * f[stride] + 4.0 * f[2 * stride] - f[3 * stride]) * invh2;
        out[e] = (2.0 * f[e] - 5.0 * f[e - stride] + 4.0 * f[e - 2 * stride] - f[e - 3 * stride]) * invh2;
    } else {
        out[0] = out[stride];
        out[e] = out[stride];
    }
}

ScalarField2D along1(const ScalarField2D& f, bool second) {
    ScalarField2D out(f.grid);
    const Grid2& g = f.grid;
    for (int j = 0; j < g.n2; ++j) {
        const std::size_t base = g.index(0, j);
        if (second)
            d2_line(&f.values[base], 1, g.n1, g.h1(), &out.values[base]);
        else
            d1_line(&f.values[base], 1, g.n1, g.h1(), &out.values[base]);
    }
    return out;
}

ScalarField2D along2(const ScalarField2D& f, bool second) {
    ScalarField2D out(f.grid);
    const Grid2& g = f.grid;
    const std::size_t stride = static_cast<std::size_t>(g.n1);
    for (int i = 0; i < g.n1; ++i) {
        if (second)
            d2_line(&f.values[i], stride, g.n2, g.h2(), &out.values[i]);
        else
            d1_line(&f.values[i], stride, g.n2, g.h2(), &out.values[i]);
    }
    return out;
}

}  // namespace

ScalarField2D diff(const ScalarField2D& f, Deriv which) {
    check_finite(f, "diff");
    switch (which) {
        case Deriv::d1: return along1(f, false);
        case Deriv::d2: return along2(f, false);
        case Deriv::d11: return along1(f, true);
        case Deriv::d22: return along2(f, true);
        case Deriv::d12: return along1(along2(f, false), false);
    }
    throw ValidationError("unknown derivative");
}

Vec3Field2D diff(const Vec3Field2D& f, Deriv which) {
    return Vec3Field2D::from_components(diff(f.component(0), which), diff(f.component(1), which),
                                        diff(f.component(2), which));
}

ScalarField2D laplace0(const ScalarField2D& f) {
    ScalarField2D a = diff(f, Deriv::d11);
    ScalarField2D b = diff(f, Deriv::d22);
    const double e = f.grid.eps, n = f.grid.eta;
    for (std::size_t k = 0; k < a.values.size(); ++k) a.values[k] = e * a.values[k] + n * b.values[k];
    return a;
}

void check_finite(const ScalarField2D& f, const char* what) {
    if (f.values.size() != f.grid.size()) throw ValidationError(std::string(what) + ": field length does not match grid");
    for (int j = 0; j < f.grid.n2; ++j)
        for (int i = 0; i < f.grid.n1; ++i)
            if (!std::isfinite(f(i, j))) throw DomainError(std::string(what) + ": non-finite value", i, j);
}

void check_finite(const Vec3Field2D& f, const char* what) {
    if (f.values.size() != f.grid.size()) throw ValidationError(std::string(what) + ": field length does not match grid");
    for (int j = 0; j < f.grid.n2; ++j)
        for (int i = 0; i < f.grid.n1; ++i)
            for (double v : f(i, j))
                if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite value", i, j);
}

void require_same_grid(const Grid2& a, const Grid2& b, const char* what) {
    if (!(a == b)) throw ValidationError(std::string(what) + ": fields live on different grids");
}

double max_abs(const ScalarField2D& f) {
    double m = 0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double max_abs_interior(const ScalarField2D& f) {
    double m = 0;
    for (int j = 1; j < f.grid.n2 - 1; ++j)
        for (int i = 1; i < f.grid.n1 - 1; ++i) m = std::max(m, std::abs(f(i, j)));
    return m;
}

double norm_inf(const Vec3& a) { return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])}); }

double max_abs(const Vec3Field2D& f) {
    double m = 0;
    for (const Vec3& v : f.values) m = std::max(m, norm_inf(v));
    return m;
}

double max_abs_interior(const Vec3Field2D& f) {
    double m = 0;
    for (int j = 1; j < f.grid.n2 - 1; ++j)
        for (int i = 1; i < f.grid.n1 - 1; ++i) m = std::max(m, norm_inf(f(i, j)));
    return m;
}

bool contains(const Grid2& g, double x1, double x2) {
    const double s1 = 1e-12 * std::max(1.0, std::abs(g.x1_max) + std::abs(g.x1_min));
    const double s2 = 1e-12 * std::max(1.0, std::abs(g.x2_max) + std::abs(g.x2_min));
    return x1 >= g.x1_min - s1 && x1 <= g.x1_max + s1 && x2 >= g.x2_min - s2 && x2 <= g.x2_max + s2;
}

double bilinear(const ScalarField2D& f, double x1, double x2) {
    const Grid2& g = f.grid;
    if (!contains(g, x1, x2)) throw ValidationError("resample point outside the source grid");
    double s = (x1 - g.x1_min) / g.h1();
    double t = (x2 - g.x2_min) / g.h2();
    s = std::clamp(s, 0.0, double(g.n1 - 1));
    t = std::clamp(t, 0.0, double(g.n2 - 1));
    // Snap to nodes so aligned samples are reproduced exactly.
    const double rs = std::round(s), rt = std::round(t);
    if (std::abs(s - rs) < 1e-10) s = rs;
    if (std::abs(t - rt) < 1e-10) t = rt;
    int i = std::min(static_cast<int>(std::floor(s)), g.n1 - 2);
    int j = std::min(static_cast<int>(std::floor(t)), g.n2 - 2);
    const double a = s - i, b = t - j;
    return (1 - a) * (1 - b) * f(i, j) + a * (1 - b) * f(i + 1, j) + (1 - a) * b * f(i, j + 1) +
           a * b * f(i + 1, j + 1);
}

ScalarField2D resample_bilinear(const ScalarField2D& src, const Grid2& target) {
    ScalarField2D out(target);
    for (int j = 0; j < target.n2; ++j)
        for (int i = 0; i < target.n1; ++i) out(i, j) = bilinear(src, target.x1(i), target.x2(j));
    return out;
}

ScalarField2D operator+(const ScalarField2D& a, const ScalarField2D& b) {
    return zip(a, b, [](double x, double y) { return x + y; });
}
ScalarField2D operator-(const ScalarField2D& a, const ScalarField2D& b) {
    return zip(a, b, [](double x, double y) { return x - y; });
}
ScalarField2D operator*(const ScalarField2D& a, const ScalarField2D& b) {
    return zip(a, b, [](double x, double y) { return x * y; });
}
ScalarField2D operator*(double s, const ScalarField2D& a) {
    return map(a, [s](double x) { return s * x; });
}
ScalarField2D operator-(const ScalarField2D& a) {
    return map(a, [](double x) { return -x; });
}

}  // namespace affsurf
