#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace affsurf {

struct Grid2 {
    double x1_min = 0, x1_max = 1, x2_min = 0, x2_max = 1;
    int n1 = 3, n2 = 3;
    int eps = 1, eta = 1;

    double h1() const { return (x1_max - x1_min) / (n1 - 1); }
    double h2() const { return (x2_max - x2_min) / (n2 - 1); }
    double x1(int i) const { return x1_min + i * h1(); }
    double x2(int j) const { return x2_min + j * h2(); }
    std::size_t size() const { return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(n1) * j; }
    bool is_boundary(int i, int j) const { return i == 0 || j == 0 || i == n1 - 1 || j == n2 - 1; }

    bool operator==(const Grid2&) const = default;
};

Grid2 make_grid(const std::array<double, 4>& bounds, int n1, int n2, int eps = 1, int eta = 1);

// Same chart and node counts with a different signature.
Grid2 with_signature(const Grid2& g, int eps, int eta);

struct ScalarField2D {
    Grid2 grid;
    std::vector<double> values;

    ScalarField2D() = default;
    explicit ScalarField2D(const Grid2& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    ScalarField2D(const Grid2& g, std::vector<double> v);

    double& operator()(int i, int j) { return values[grid.index(i, j)]; }
    double operator()(int i, int j) const { return values[grid.index(i, j)]; }
    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }

    static ScalarField2D sample(const Grid2& g, const std::function<double(double, double)>& fn);
};

using Vec3 = std::array<double, 3>;

struct Vec3Field2D {
    Grid2 grid;
    std::vector<Vec3> values;

    Vec3Field2D() = default;
    explicit Vec3Field2D(const Grid2& g) : grid(g), values(g.size(), Vec3{0, 0, 0}) {}

    Vec3& operator()(int i, int j) { return values[grid.index(i, j)]; }
    const Vec3& operator()(int i, int j) const { return values[grid.index(i, j)]; }
    Vec3& operator[](std::size_t k) { return values[k]; }
    const Vec3& operator[](std::size_t k) const { return values[k]; }

    ScalarField2D component(int c) const;
    static Vec3Field2D from_components(const ScalarField2D& x, const ScalarField2D& y, const ScalarField2D& z);
    static Vec3Field2D sample(const Grid2& g, const std::function<Vec3(double, double)>& fn);
};

enum class Deriv { d1, d2, d11, d22, d12 };

ScalarField2D diff(const ScalarField2D& field, Deriv which);
Vec3Field2D diff(const Vec3Field2D& field, Deriv which);

// eps * d11 + eta * d22 with the grid's signature.
ScalarField2D laplace0(const ScalarField2D& field);

// Throws ValidationError on NaN/inf or size mismatch.
void check_finite(const ScalarField2D& f, const char* what);
void check_finite(const Vec3Field2D& f, const char* what);
void require_same_grid(const Grid2& a, const Grid2& b, const char* what);

double max_abs(const ScalarField2D& f);
double max_abs_interior(const ScalarField2D& f);
double max_abs(const Vec3Field2D& f);
double max_abs_interior(const Vec3Field2D& f);

// Bilinear interpolation at an arbitrary point; the point must lie in the grid's rectangle
// up to a relative slack of 1e-12.
double bilinear(const ScalarField2D& f, double x1, double x2);
bool contains(const Grid2& g, double x1, double x2);
ScalarField2D resample_bilinear(const ScalarField2D& src, const Grid2& target);

template <class F>
ScalarField2D map(const ScalarField2D& a, F&& fn) {
    ScalarField2D out(a.grid);
    for (std::size_t k = 0; k < a.values.size(); ++k) out.values[k] = fn(a.values[k]);
    return out;
}

template <class F>
ScalarField2D zip(const ScalarField2D& a, const ScalarField2D& b, F&& fn) {
    require_same_grid(a.grid, b.grid, "zip");
    ScalarField2D out(a.grid);
    for (std::size_t k = 0; k < a.values.size(); ++k) out.values[k] = fn(a.values[k], b.values[k]);
    return out;
}

ScalarField2D operator+(const ScalarField2D& a, const ScalarField2D& b);
ScalarField2D operator-(const ScalarField2D& a, const ScalarField2D& b);
ScalarField2D operator*(const ScalarField2D& a, const ScalarField2D& b);
ScalarField2D operator*(double s, const ScalarField2D& a);
ScalarField2D operator-(const ScalarField2D& a);

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double det3(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }
double norm_inf(const Vec3& a);

}  // namespace affsurf
