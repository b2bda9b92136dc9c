#include "affsurf/immersion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "affsurf/error.hpp"

namespace affsurf {

namespace {

// f, F1, F2, xi
struct State {
    std::array<Vec3, 4> v;
    Vec3& operator[](int k) { return v[k]; }
    const Vec3& operator[](int k) const { return v[k]; }
};

using affsurf::operator+;
using affsurf::operator*;

State operator+(const State& a, const State& b) {
    return {{a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]}};
}
State operator*(double s, const State& a) {
    return {{s * a[0], s * a[1], s * a[2], s * a[3]}};
}

// Coefficients of the moving frame along one coordinate direction d:
// F_j' = G^0_dj F1 + G^1_dj F2 + h_dj xi, xi' = -S^0_d F1 - S^1_d F2.
struct Coef {
    std::array<double, 13> v;  // G^0_d0, G^1_d0, G^0_d1, G^1_d1, h_d0, h_d1, S^0_d, S^1_d, pad
};

Coef coef_at(const BlaschkeStructure& s, int d, std::size_t n) {
    Coef c{};
    c.v[0] = s.nabla.at(0, d, 0, n);
    c.v[1] = s.nabla.at(1, d, 0, n);
    c.v[2] = s.nabla.at(0, d, 1, n);
    c.v[3] = s.nabla.at(1, d, 1, n);
    c.v[4] = s.metric.at(d, 0, n);
    c.v[5] = s.metric.at(d, 1, n);
    c.v[6] = s.shape.at(0, d, n);
    c.v[7] = s.shape.at(1, d, n);
    return c;
}

State rhs(const Coef& c, int d, const State& y) {
    const Vec3& F1 = y[1];
    const Vec3& F2 = y[2];
    const Vec3& xi = y[3];
    State r;
    r[0] = d == 0 ? F1 : F2;
    r[1] = c.v[0] * F1 + c.v[1] * F2 + c.v[4] * xi;
    r[2] = c.v[2] * F1 + c.v[3] * F2 + c.v[5] * xi;
    r[3] = (-c.v[6]) * F1 + (-c.v[7]) * F2;
    return r;
}

Coef combine(std::initializer_list<std::pair<double, const Coef*>> terms) {
    Coef out{};
    for (const auto& [w, c] : terms)
        for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] += w * c->v[k];
    return out;
}

// Coefficient at the midpoint between line nodes m and m+1 (cubic Lagrange where possible).
Coef midpoint(const std::vector<Coef>& c, int m) {
    const int n = static_cast<int>(c.size());
    if (n == 2) return combine({{0.5, &c[0]}, {0.5, &c[1]}});
    if (n == 3) {
        if (m == 0) return combine({{3.0 / 8, &c[0]}, {6.0 / 8, &c[1]}, {-1.0 / 8, &c[2]}});
        return combine({{-1.0 / 8, &c[0]}, {6.0 / 8, &c[1]}, {3.0 / 8, &c[2]}});
    }
    if (m == 0) return combine({{5.0 / 16, &c[0]}, {15.0 / 16, &c[1]}, {-5.0 / 16, &c[2]}, {1.0 / 16, &c[3]}});
    if (m == n - 2)
        return combine({{1.0 / 16, &c[n - 4]}, {-5.0 / 16, &c[n - 3]}, {15.0 / 16, &c[n - 2]}, {5.0 / 16, &c[n - 1]}});
    return combine({{-1.0 / 16, &c[m - 1]}, {9.0 / 16, &c[m]}, {9.0 / 16, &c[m + 1]}, {-1.0 / 16, &c[m + 2]}});
}

State rk4(const Coef& c0, const Coef& cm, const Coef& c1, int d, const State& y, double h) {
    const State k1 = rhs(c0, d, y);
    const State k2 = rhs(cm, d, y + (h / 2) * k1);
    const State k3 = rhs(cm, d, y + (h / 2) * k2);
    const State k4 = rhs(c1, d, y + h * k3);
    return y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool finite(const State& y) {
    for (const auto& v : y.v)
        for (double x : v)
            if (!std::isfinite(x)) return false;
    return true;
}

// Integrates along the line of nodes `idx` in direction d, overwriting out[idx[1..]].
void sweep(const BlaschkeStructure& s, int d, const std::vector<std::size_t>& idx, double h, std::vector<State>& out) {
    std::vector<Coef> c(idx.size());
    for (std::size_t m = 0; m < idx.size(); ++m) c[m] = coef_at(s, d, idx[m]);
    for (std::size_t m = 0; m + 1 < idx.size(); ++m) {
        const Coef cm = midpoint(c, static_cast<int>(m));
        out[idx[m + 1]] = rk4(c[m], cm, c[m + 1], d, out[idx[m]], h);
        if (!finite(out[idx[m + 1]])) throw NumericalError("integrate: non-finite state (blow-up)");
    }
}

std::vector<State> integrate_path(const BlaschkeStructure& s, const State& y0, bool row_first) {
    const Grid2& g = s.grid();
    std::vector<State> out(g.size());
    out[0] = y0;
    auto row = [&](int j) {
        std::vector<std::size_t> idx(g.n1);
        for (int i = 0; i < g.n1; ++i) idx[i] = g.index(i, j);
        return idx;
    };
    auto col = [&](int i) {
        std::vector<std::size_t> idx(g.n2);
        for (int j = 0; j < g.n2; ++j) idx[j] = g.index(i, j);
        return idx;
    };
    if (row_first) {
        sweep(s, 0, row(0), g.h1(), out);
        for (int i = 0; i < g.n1; ++i) sweep(s, 1, col(i), g.h2(), out);
    } else {
        sweep(s, 1, col(0), g.h2(), out);
        for (int j = 0; j < g.n2; ++j) sweep(s, 0, row(j), g.h1(), out);
    }
    return out;
}

Eigen::Matrix3d frame_matrix(const Vec3& a, const Vec3& b, const Vec3& c) {
    Eigen::Matrix3d M;
    for (int r = 0; r < 3; ++r) {
        M(r, 0) = a[r];
        M(r, 1) = b[r];
        M(r, 2) = c[r];
    }
    return M;
}

}  // namespace

SeedFrame seed_from_sheet(const ImmersionSheet& sheet, int i, int j) {
    return {sheet.f(i, j), sheet.F1(i, j), sheet.F2(i, j), sheet.xi(i, j), 0};
}

IntegrateResult integrate(const BlaschkeStructure& s, const SeedFrame& seed, double seed_tol) {
    s.metric.validate();
    const Grid2& g = s.grid();
    for (int k = 0; k < 6; ++k) check_finite(s.nabla.c[k], "integrate: nabla");
    for (int k = 0; k < 4; ++k) check_finite(s.shape.S[k], "integrate: S");
    for (const Vec3* v : {&seed.f0, &seed.F1_0, &seed.F2_0, &seed.xi0})
        for (double x : *v)
            if (!std::isfinite(x)) throw ValidationError("integrate: seed must be finite");
    const double vol = det3(seed.F1_0, seed.F2_0, seed.xi0);
    const double dh = s.metric.h11[0] * s.metric.h22[0] - s.metric.h12[0] * s.metric.h12[0];
    const double target = std::sqrt(std::abs(dh));
    if (std::abs(std::abs(vol) - target) > seed_tol)
        throw ValidationError("integrate: seed violates det(F1, F2, xi) = +-sqrt|det h|");
    if (seed.orientation != 0 && vol * seed.orientation < 0)
        throw ValidationError("integrate: seed orientation does not match");

    const State y0{{seed.f0, seed.F1_0, seed.F2_0, seed.xi0}};
    const std::vector<State> A = integrate_path(s, y0, true);
    const std::vector<State> B = integrate_path(s, y0, false);

    IntegrateResult res{ImmersionSheet(g), 0.0};
    for (std::size_t n = 0; n < g.size(); ++n) {
        res.sheet.f[n] = A[n][0];
        res.sheet.F1[n] = A[n][1];
        res.sheet.F2[n] = A[n][2];
        res.sheet.xi[n] = A[n][3];
        for (int c = 0; c < 4; ++c) res.path_residual = std::max(res.path_residual, norm_inf(A[n][c] - B[n][c]));
    }
    return res;
}

GWResidual gw_residual(const ImmersionSheet& sheet, const BlaschkeStructure& s) {
    const Grid2& g = sheet.grid;
    require_same_grid(g, s.grid(), "gw_residual");
    const std::array<const Vec3Field2D*, 2> F = {&sheet.F1, &sheet.F2};
    // dF[i][j] = d_i F_j
    std::array<std::array<Vec3Field2D, 2>, 2> dF;
    for (int j = 0; j < 2; ++j) {
        dF[0][j] = diff(*F[j], Deriv::d1);
        dF[1][j] = diff(*F[j], Deriv::d2);
    }
    const std::array<Vec3Field2D, 2> dxi = {diff(sheet.xi, Deriv::d1), diff(sheet.xi, Deriv::d2)};
    const std::array<Vec3Field2D, 2> df = {diff(sheet.f, Deriv::d1), diff(sheet.f, Deriv::d2)};
    GWResidual r;
    for (int jj = 1; jj + 1 < g.n2; ++jj)
        for (int ii = 1; ii + 1 < g.n1; ++ii) {
            const std::size_t n = g.index(ii, jj);
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    Vec3 v = dF[i][j][n] - s.metric.at(i, j, n) * sheet.xi[n];
                    for (int k = 0; k < 2; ++k) v = v - s.nabla.at(k, i, j, n) * (*F[k])[n];
                    r.frame = std::max(r.frame, norm_inf(v));
                }
                Vec3 w = dxi[i][n];
                for (int k = 0; k < 2; ++k) w = w + s.shape.at(k, i, n) * (*F[k])[n];
                r.normal = std::max(r.normal, norm_inf(w));
                r.position = std::max(r.position, norm_inf(df[i][n] - (*F[i])[n]));
            }
        }
    return r;
}

InducedStructure induce(const ImmersionSheet& sheet) {
    const Grid2& g = sheet.grid;
    check_finite(sheet.F1, "induce: F1");
    check_finite(sheet.F2, "induce: F2");
    // second derivatives f_ij from the tangent fields
    const Vec3Field2D F11 = diff(sheet.F1, Deriv::d1);
    const Vec3Field2D F22 = diff(sheet.F2, Deriv::d2);
    const Vec3Field2D F12a = diff(sheet.F1, Deriv::d2), F12b = diff(sheet.F2, Deriv::d1);
    Vec3Field2D F12(g);
    for (std::size_t n = 0; n < g.size(); ++n) F12[n] = 0.5 * (F12a[n] + F12b[n]);
    auto fij = [&](int i, int j, std::size_t n) -> const Vec3& {
        return i != j ? F12[n] : (i == 0 ? F11[n] : F22[n]);
    };

    MetricField h{ScalarField2D(g), ScalarField2D(g), ScalarField2D(g)};
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t n = g.index(i, j);
            const double G11 = det3(sheet.F1[n], sheet.F2[n], F11[n]);
            const double G12 = det3(sheet.F1[n], sheet.F2[n], F12[n]);
            const double G22 = det3(sheet.F1[n], sheet.F2[n], F22[n]);
            const double d = G11 * G22 - G12 * G12;
            if (std::abs(d) < 1e-12) throw DomainError("induce: degenerate second fundamental form", i, j);
            const double s = std::pow(std::abs(d), 0.25);
            h.h11[n] = G11 / s;
            h.h12[n] = G12 / s;
            h.h22[n] = G22 / s;
        }
    const ConnectionField Gh = levi_civita(h);

    Vec3Field2D xi(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double d = h.h11[n] * h.h22[n] - h.h12[n] * h.h12[n];
        const double inv[2][2] = {{h.h22[n] / d, -h.h12[n] / d}, {-h.h12[n] / d, h.h11[n] / d}};
        Vec3 acc{0, 0, 0};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Vec3 v = fij(i, j, n) - Gh.at(0, i, j, n) * sheet.F1[n] - Gh.at(1, i, j, n) * sheet.F2[n];
                acc = acc + inv[i][j] * v;
            }
        xi[n] = 0.5 * acc;
    }
    const std::array<Vec3Field2D, 2> dxi = {diff(xi, Deriv::d1), diff(xi, Deriv::d2)};

    ConnectionField G = ConnectionField::zeros(g);
    std::array<ScalarField2D, 4> S;
    for (auto& f : S) f = ScalarField2D(g);
    for (int jj = 0; jj < g.n2; ++jj)
        for (int ii = 0; ii < g.n1; ++ii) {
            const std::size_t n = g.index(ii, jj);
            const Eigen::Matrix3d M = frame_matrix(sheet.F1[n], sheet.F2[n], xi[n]);
            const Eigen::PartialPivLU<Eigen::Matrix3d> lu(M);
            if (std::abs(M.determinant()) < 1e-14) throw DomainError("induce: degenerate frame (F1, F2, xi)", ii, jj);
            for (int i = 0; i < 2; ++i) {
                for (int j = i; j < 2; ++j) {
                    const Vec3& v = fij(i, j, n);
                    const Eigen::Vector3d c = lu.solve(Eigen::Vector3d(v[0], v[1], v[2]));
                    G(0, i, j)[n] = c[0];
                    G(1, i, j)[n] = c[1];
                }
                const Vec3& w = dxi[i][n];
                const Eigen::Vector3d c = lu.solve(Eigen::Vector3d(w[0], w[1], w[2]));
                S[2 * 0 + i][n] = -c[0];
                S[2 * 1 + i][n] = -c[1];
            }
        }
    DifferenceField K = ConnectionField::zeros(g);
    for (int c = 0; c < 6; ++c) K.c[c] = G.c[c] - Gh.c[c];
    InducedStructure out{make_structure(h, Gh, K, ShapeField::from_components(S[0], S[1], S[2], S[3]),
                                        StructureCase::Induced),
                         xi};
    return out;
}

CurveSolution solve_curve(const ScalarFn& a_fn, const ScalarFn& b_fn, double H, double t0, double dt, int n,
                          const std::array<Vec3, 3>& basis_init, double max_step) {
    if (!(H != 0) || !std::isfinite(H)) throw ValidationError("curve: H must be nonzero and finite");
    if (n < 1 || !(dt > 0) || !(max_step > 0)) throw ValidationError("curve: need n >= 1, dt > 0, max_step > 0");
    const double w0 = det3(basis_init[0], basis_init[1], basis_init[2]);
    if (!std::isfinite(w0) || std::abs(w0) < 1e-14) throw ValidationError("curve: basis_init has zero Wronskian");
    const double scale = std::cbrt(H / w0);
    using Y = std::array<Vec3, 3>;
    Y y = {scale * basis_init[0], scale * basis_init[1], scale * basis_init[2]};
    auto f = [&](double t, const Y& v) -> Y {
        return {v[1], v[2], a_fn(t) * v[1] + b_fn(t) * v[0]};
    };
    auto add = [](const Y& a, double s, const Y& b) -> Y {
        return {a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
    };

    CurveSolution sol;
    auto record = [&](double t, const Y& v) {
        sol.t.push_back(t);
        sol.xi.push_back(v[0]);
        sol.xi1.push_back(v[1]);
        sol.xi2.push_back(v[2]);
        sol.a.push_back(a_fn(t));
        sol.b.push_back(b_fn(t));
    };
    record(t0, y);
    sol.wronskian_drift = std::abs(det3(y[0], y[1], y[2]) - H);
    const int sub = std::max(1, static_cast<int>(std::ceil(dt / max_step - 1e-9)));
    const double h = dt / sub;
    for (int k = 1; k < n; ++k) {
        const double tk = t0 + (k - 1) * dt;
        for (int m = 0; m < sub; ++m) {
            const double t = tk + m * h;
            const Y k1 = f(t, y);
            const Y k2 = f(t + h / 2, add(y, h / 2, k1));
            const Y k3 = f(t + h / 2, add(y, h / 2, k2));
            const Y k4 = f(t + h, add(y, h, k3));
            for (int c = 0; c < 3; ++c) y[c] = y[c] + (h / 6) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            for (const auto& v : y)
                for (double x : v)
                    if (!std::isfinite(x)) throw NumericalError("curve: non-finite state (blow-up)");
            sol.wronskian_drift = std::max(sol.wronskian_drift, std::abs(det3(y[0], y[1], y[2]) - H));
        }
        record(t0 + k * dt, y);
    }
    return sol;
}

ImmersionSheet liouville_build(const ScalarFn& a_fn, const ScalarFn& b_fn, double H, const Grid2& grid,
                               const std::array<Vec3, 3>& basis_init, const LiouvilleOptions& opts) {
    if (!(H != 0) || !std::isfinite(H))
        throw ValidationError("liouville_build: H must be nonzero (the H = 0 surface is the improper graph)");
    if (!a_fn || !b_fn) throw ValidationError("liouville_build: a and b must be given");
    if (opts.a_prime) {
        for (int j = 0; j < grid.n2; ++j) {
            const double t = grid.x2(j);
            if (std::abs(opts.a_prime(t) - 2 * b_fn(t) - 2 * H) > opts.constraint_tol)
                throw ValidationError("liouville_build: a' - 2b = 2H violated at x2 = " + std::to_string(t));
        }
    }
    const CurveSolution c = solve_curve(a_fn, b_fn, H, grid.x2_min, grid.h2(), grid.n2, basis_init, opts.max_step);
    ImmersionSheet s(grid);
    for (int j = 0; j < grid.n2; ++j)
        for (int i = 0; i < grid.n1; ++i) {
            const std::size_t n = grid.index(i, j);
            const double z1 = grid.x1(i), z2 = grid.x2(j);
            double x1 = z1;
            std::array<double, 2> dx{1, 0};
            if (opts.chart) {
                x1 = opts.chart->x1(z1, z2);
                dx = opts.chart->grad(z1, z2);
            }
            const Vec3& xi = c.xi[j];
            const Vec3& xi1 = c.xi1[j];
            const Vec3& xi2 = c.xi2[j];
            s.f[n] = x1 * xi - (1 / H) * xi1;
            const Vec3 fx2 = x1 * xi1 - (1 / H) * xi2;
            s.F1[n] = dx[0] * xi;
            s.F2[n] = dx[1] * xi + fx2;
            s.xi[n] = -H * s.f[n];
            for (double v : s.f[n])
                if (!std::isfinite(v)) throw NumericalError("liouville_build: non-finite surface point");
        }
    return s;
}

double quadric_defect(const ImmersionSheet& sheet) {
    const InducedStructure ind = induce(sheet);
    double m = 0;
    for (const auto& c : ind.structure.K.c) m = std::max(m, max_abs_interior(c));
    return m;
}

}  // namespace affsurf
