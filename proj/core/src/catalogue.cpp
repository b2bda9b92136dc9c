#include <cmath>

#include "affsurf/error.hpp"
#include "affsurf/immersion.hpp"

namespace affsurf {

std::string to_string(CatalogueKind k) {
    switch (k) {
        case CatalogueKind::DefiniteConstFp: return "definite";
        case CatalogueKind::IndefiniteConstFp: return "indefinite";
        case CatalogueKind::ImproperGraph: return "improper-graph";
        case CatalogueKind::OrbitHyperbolic: return "orbit-hyperbolic";
        case CatalogueKind::OrbitElliptic: return "orbit-elliptic";
    }
    return "?";
}

CatalogueKind catalogue_kind_from_string(const std::string& s) {
    for (auto k : {CatalogueKind::DefiniteConstFp, CatalogueKind::IndefiniteConstFp, CatalogueKind::ImproperGraph,
                   CatalogueKind::OrbitHyperbolic, CatalogueKind::OrbitElliptic})
        if (to_string(k) == s) return k;
    throw ValidationError("unknown catalogue kind '" + s + "'");
}

double catalogue_c(double lambda) {
    if (!(lambda > 0) || !std::isfinite(lambda)) throw ValidationError("catalogue: lambda must be positive");
    const double hcc = 16 * lambda * lambda;
    return 3 * std::sqrt(3.0) / 128 * hcc * hcc;
}

ImmersionSheet catalogue(CatalogueKind kind, const CatalogueParams& p, const Grid2& grid) {
    ImmersionSheet s(grid);
    if (kind == CatalogueKind::ImproperGraph) {
        if (!p.phi || !p.phi1) throw ValidationError("catalogue: improper graph needs phi and phi'");
        for (int j = 0; j < grid.n2; ++j)
            for (int i = 0; i < grid.n1; ++i) {
                const double x = grid.x1(i), y = grid.x2(j);
                const std::size_t n = grid.index(i, j);
                s.f[n] = {x, y, x * y + p.phi(y)};
                s.F1[n] = {1, 0, y};
                s.F2[n] = {0, 1, x + p.phi1(y)};
                s.xi[n] = {0, 0, 1};
            }
        return s;
    }
    if (p.sign != 1 && p.sign != -1) throw ValidationError("catalogue: sign must be +-1");
    const double lam = p.lambda;
    const double c = catalogue_c(lam);
    const double k = std::sqrt(3.0) * lam;
    const double z0 = p.sign / c;
    const bool definite = kind == CatalogueKind::DefiniteConstFp || kind == CatalogueKind::OrbitHyperbolic;
    // affine normal -H f with H = -2 lambda^2 (definite) or 2 lambda^2 (indefinite)
    const double kappa = definite ? 2 * lam * lam : -2 * lam * lam;

    for (int j = 0; j < grid.n2; ++j)
        for (int i = 0; i < grid.n1; ++i) {
            const double x1 = grid.x1(i), x2 = grid.x2(j);
            const std::size_t n = grid.index(i, j);
            const double e = std::exp(-lam * x2), e2 = std::exp(2 * lam * x2);
            switch (kind) {
                case CatalogueKind::DefiniteConstFp: {
                    const double ch = std::cosh(k * x1), sh = std::sinh(k * x1);
                    s.f[n] = {e * ch, e * sh, z0 * e2};
                    s.F1[n] = {k * e * sh, k * e * ch, 0};
                    s.F2[n] = {-lam * e * ch, -lam * e * sh, 2 * lam * z0 * e2};
                    break;
                }
                case CatalogueKind::IndefiniteConstFp: {
                    const double cs = std::cos(k * x1), sn = std::sin(k * x1);
                    s.f[n] = {e * cs, -e * sn, z0 * e2};
                    s.F1[n] = {-k * e * sn, -k * e * cs, 0};
                    s.F2[n] = {-lam * e * cs, lam * e * sn, 2 * lam * z0 * e2};
                    break;
                }
                case CatalogueKind::OrbitHyperbolic:
                case CatalogueKind::OrbitElliptic: {
                    // g(a, b) applied to (1, 0, z0) with a = lambda x2, b = sqrt(3) lambda x1
                    const double a = lam * x2, b = k * x1;
                    const double ea = std::exp(-a), e2a = std::exp(2 * a);
                    std::array<std::array<double, 3>, 3> M{};
                    std::array<std::array<double, 3>, 3> Ma{}, Mb{};  // derivatives in a and b
                    if (kind == CatalogueKind::OrbitHyperbolic) {
                        const double ch = std::cosh(b), sh = std::sinh(b);
                        M = {{{ea * ch, ea * sh, 0}, {ea * sh, ea * ch, 0}, {0, 0, e2a}}};
                        Mb = {{{ea * sh, ea * ch, 0}, {ea * ch, ea * sh, 0}, {0, 0, 0}}};
                    } else {
                        const double cs = std::cos(b), sn = std::sin(b);
                        M = {{{ea * cs, ea * sn, 0}, {-ea * sn, ea * cs, 0}, {0, 0, e2a}}};
                        Mb = {{{-ea * sn, ea * cs, 0}, {-ea * cs, -ea * sn, 0}, {0, 0, 0}}};
                    }
                    for (int r = 0; r < 2; ++r)
                        for (int q = 0; q < 2; ++q) Ma[r][q] = -M[r][q];
                    Ma[2][2] = 2 * e2a;
                    const Vec3 p0{1, 0, z0};
                    auto mul = [&](const std::array<std::array<double, 3>, 3>& A) {
                        return Vec3{A[0][0] * p0[0] + A[0][1] * p0[1] + A[0][2] * p0[2],
                                    A[1][0] * p0[0] + A[1][1] * p0[1] + A[1][2] * p0[2],
                                    A[2][0] * p0[0] + A[2][1] * p0[1] + A[2][2] * p0[2]};
                    };
                    s.f[n] = mul(M);
                    s.F1[n] = k * mul(Mb);
                    s.F2[n] = lam * mul(Ma);
                    break;
                }
                default: break;
            }
            s.xi[n] = kappa * s.f[n];
        }
    return s;
}

std::array<std::array<double, 3>, 3> GroupElement::matrix() const {
    if (eps != 1 && eps != -1) throw ValidationError("group element: eps must be +-1");
    if (kind == GroupKind::AO2) {
        const double c = std::cos(angle), s = std::sin(angle);
        return {{{c, -eps * s, a}, {s, eps * c, b}, {0, 0, 1}}};
    }
    const double c = std::cosh(angle), s = std::sinh(angle);
    return {{{c, eps * s, a}, {s, eps * c, b}, {0, 0, 1}}};
}

std::array<double, 2> GroupElement::apply(double x1, double x2) const {
    const auto M = matrix();
    return {M[0][0] * x1 + M[0][1] * x2 + M[0][2], M[1][0] * x1 + M[1][1] * x2 + M[1][2]};
}

namespace {

// Snaps points that land within rounding of a node so aligned maps resample exactly.
double snap(double x, double lo, double h) {
    const double r = std::round((x - lo) / h);
    const double node = lo + r * h;
    return std::abs(x - node) <= 1e-9 * h ? node : x;
}

std::array<double, 2> mapped(const Grid2& g, const GroupElement& e, int i, int j) {
    auto p = e.apply(g.x1(i), g.x2(j));
    p[0] = snap(p[0], g.x1_min, g.h1());
    p[1] = snap(p[1], g.x2_min, g.h2());
    if (!contains(g, p[0], p[1]))
        throw DomainError("group_apply: transformed point leaves the grid", i, j);
    return p;
}

}  // namespace

ScalarField2D group_apply(const ScalarField2D& u, const GroupElement& e) {
    check_finite(u, "group_apply");
    const Grid2& g = u.grid;
    ScalarField2D out(g);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const auto p = mapped(g, e, i, j);
            out(i, j) = bilinear(u, p[0], p[1]);
        }
    return out;
}

ImmersionSheet group_apply(const ImmersionSheet& sheet, const GroupElement& e) {
    const Grid2& g = sheet.grid;
    const auto M = e.matrix();
    std::array<std::array<ScalarField2D, 3>, 4> comp;
    const std::array<const Vec3Field2D*, 4> src = {&sheet.f, &sheet.F1, &sheet.F2, &sheet.xi};
    for (int q = 0; q < 4; ++q)
        for (int c = 0; c < 3; ++c) comp[q][c] = src[q]->component(c);
    ImmersionSheet out(g);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const auto p = mapped(g, e, i, j);
            std::array<Vec3, 4> v;
            for (int q = 0; q < 4; ++q)
                for (int c = 0; c < 3; ++c) v[q][c] = bilinear(comp[q][c], p[0], p[1]);
            const std::size_t n = g.index(i, j);
            out.f[n] = v[0];
            out.F1[n] = M[0][0] * v[1] + M[1][0] * v[2];
            out.F2[n] = M[0][1] * v[1] + M[1][1] * v[2];
            out.xi[n] = v[3];
        }
    return out;
}

}  // namespace affsurf
