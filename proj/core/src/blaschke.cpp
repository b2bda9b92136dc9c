#include "affsurf/blaschke.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "affsurf/error.hpp"

namespace affsurf {

namespace {

struct Sym2 {
    double a00, a01, a11;
    double at(int i, int j) const { return i != j ? a01 : (i == 0 ? a00 : a11); }
};

Sym2 metric_at(const MetricField& m, std::size_t n) { return {m.h11[n], m.h12[n], m.h22[n]}; }

Sym2 inverse(const Sym2& h) {
    const double d = h.a00 * h.a11 - h.a01 * h.a01;
    return {h.a11 / d, -h.a01 / d, h.a00 / d};
}

// True when h12 == 0 and |h11| == |h22| to rounding, with a fixed sign pattern.
bool semi_isothermal(const MetricField& m, int& eps, int& eta) {
    const std::size_t n = m.grid().size();
    eps = m.h11[0] > 0 ? 1 : -1;
    eta = m.h22[0] > 0 ? 1 : -1;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = m.h11[k], b = m.h22[k];
        const double s = std::max(std::abs(a), std::abs(b));
        if (s == 0) return false;
        if (std::abs(m.h12[k]) > 1e-14 * s) return false;
        if (std::abs(std::abs(a) - std::abs(b)) > 1e-13 * s) return false;
        if ((a > 0 ? 1 : -1) != eps || (b > 0 ? 1 : -1) != eta) return false;
    }
    return true;
}

bool null_metric(const MetricField& m) {
    for (std::size_t k = 0; k < m.grid().size(); ++k) {
        const double s = std::abs(m.h12[k]);
        if (s == 0 || std::abs(m.h11[k]) > 1e-14 * s || std::abs(m.h22[k]) > 1e-14 * s) return false;
    }
    return true;
}

ScalarField2D conformal_u(const MetricField& m) {
    return map(m.h11, [](double v) { return -0.5 * std::log(std::abs(v)); });
}

// d_m Gamma^k_ij for every slot.
struct ConnDerivs {
    std::array<std::array<ScalarField2D, 6>, 2> d;
    explicit ConnDerivs(const SymTensorField& c) {
        for (int s = 0; s < 6; ++s) {
            d[0][s] = diff(c.c[s], Deriv::d1);
            d[1][s] = diff(c.c[s], Deriv::d2);
        }
    }
    double at(int m, int k, int i, int j, std::size_t n) const { return d[m][SymTensorField::slot(k, i, j)][n]; }
};

// R^l_{k i j} = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
double curvature(const SymTensorField& G, const ConnDerivs& dG, int l, int k, int i, int j, std::size_t n) {
    double r = dG.at(i, l, j, k, n) - dG.at(j, l, i, k, n);
    for (int m = 0; m < 2; ++m) r += G.at(l, i, m, n) * G.at(m, j, k, n) - G.at(l, j, m, n) * G.at(m, i, k, n);
    return r;
}

void check_structure_grids(const BlaschkeStructure& s) {
    const Grid2& g = s.grid();
    auto chk = [&](const ScalarField2D& f) { require_same_grid(g, f.grid, "structure field"); };
    chk(s.metric.h12);
    chk(s.metric.h22);
    for (int k = 0; k < 6; ++k) {
        chk(s.nabla.c[k]);
        chk(s.nabla_hat.c[k]);
        chk(s.K.c[k]);
    }
    for (int k = 0; k < 4; ++k) chk(s.shape.S[k]);
}

CubicInvariants contract(const MetricField& metric, std::array<ScalarField2D, 8> C) {
    const Grid2& g = metric.grid();
    CubicInvariants out{std::move(C), ScalarField2D(g), ScalarField2D(g)};
    for (std::size_t n = 0; n < g.size(); ++n) {
        const Sym2 hi = inverse(metric_at(metric, n));
        double acc = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int p = 0; p < 2; ++p)
                        for (int q = 0; q < 2; ++q)
                            for (int r = 0; r < 2; ++r)
                                acc += hi.at(i, p) * hi.at(j, q) * hi.at(k, r) * out.C[4 * i + 2 * j + k][n] *
                                       out.C[4 * p + 2 * q + r][n];
        out.hCC[n] = acc;
        out.J[n] = acc / 8;
    }
    return out;
}

// Nodes at distance >= 2 from the edge. Entries that difference already-differenced
// fields are only first order on the innermost ring, where central stencils pick up
// one-sided boundary values.
double interior_max(const Grid2& g, const std::function<double(std::size_t)>& fn) {
    double m = 0;
    for (int j = kVerifyMargin; j + kVerifyMargin < g.n2; ++j)
        for (int i = kVerifyMargin; i + kVerifyMargin < g.n1; ++i) m = std::max(m, fn(g.index(i, j)));
    return m;
}

void require_finite_u(const ScalarField2D& u, const char* what) { check_finite(u, what); }

}  // namespace

void MetricField::validate() const {
    require_same_grid(h11.grid, h12.grid, "metric");
    require_same_grid(h11.grid, h22.grid, "metric");
    check_finite(h11, "h11");
    check_finite(h12, "h12");
    check_finite(h22, "h22");
    const Grid2& g = grid();
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t k = g.index(i, j);
            if (std::abs(h11[k] * h22[k] - h12[k] * h12[k]) < 1e-12) throw DomainError("metric is degenerate", i, j);
        }
}

SymTensorField SymTensorField::zeros(const Grid2& g) {
    SymTensorField t;
    for (auto& f : t.c) f = ScalarField2D(g);
    return t;
}

ShapeField ShapeField::from_components(ScalarField2D s00, ScalarField2D s01, ScalarField2D s10, ScalarField2D s11) {
    ShapeField sh;
    sh.S = {std::move(s00), std::move(s01), std::move(s10), std::move(s11)};
    const Grid2& g = sh.S[0].grid;
    sh.H = ScalarField2D(g);
    sh.tau = ScalarField2D(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        sh.H[k] = 0.5 * (sh.S[0][k] + sh.S[3][k]);
        sh.tau[k] = sh.S[0][k] * sh.S[3][k] - sh.S[1][k] * sh.S[2][k];
    }
    return sh;
}

ShapeField ShapeField::scalar(const Grid2& g, double H) {
    return from_components(ScalarField2D(g, H), ScalarField2D(g), ScalarField2D(g), ScalarField2D(g, H));
}

std::string to_string(StructureCase c) {
    switch (c) {
        case StructureCase::Eigen: return "eigen";
        case StructureCase::Complex: return "complex";
        case StructureCase::SphereDefinite: return "sphere-definite";
        case StructureCase::SphereIndefinite: return "sphere-indefinite";
        case StructureCase::Liouville: return "liouville";
        case StructureCase::Family: return "family";
        case StructureCase::Induced: return "induced";
        case StructureCase::Custom: return "custom";
    }
    return "custom";
}

StructureCase structure_case_from_string(const std::string& s) {
    for (auto c : {StructureCase::Eigen, StructureCase::Complex, StructureCase::SphereDefinite,
                   StructureCase::SphereIndefinite, StructureCase::Liouville, StructureCase::Family,
                   StructureCase::Induced, StructureCase::Custom})
        if (to_string(c) == s) return c;
    throw ValidationError("unknown structure case '" + s + "'");
}

void BlaschkeStructure::validate() const {
    metric.validate();
    check_structure_grids(*this);
    const Grid2& g = grid();
    for (int s = 0; s < 6; ++s) {
        check_finite(nabla.c[s], "nabla");
        check_finite(nabla_hat.c[s], "nabla_hat");
        check_finite(K.c[s], "K");
        for (std::size_t n = 0; n < g.size(); ++n) {
            const double d = nabla.c[s][n] - nabla_hat.c[s][n] - K.c[s][n];
            if (std::abs(d) > 1e-12 * std::max(1.0, std::abs(nabla.c[s][n])))
                throw ValidationError("structure: nabla != nabla_hat + K");
        }
    }
    for (int s = 0; s < 4; ++s) check_finite(shape.S[s], "S");
}

ConnectionField semi_isothermal_christoffels(const ScalarField2D& u1, const ScalarField2D& u2, int eps, int eta) {
    const Grid2& g = u1.grid;
    const double ee = eps * eta;
    ConnectionField G = ConnectionField::zeros(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
        G(0, 0, 0)[n] = -u1[n];
        G(1, 0, 0)[n] = ee * u2[n];
        G(0, 0, 1)[n] = -u2[n];
        G(1, 0, 1)[n] = -u1[n];
        G(0, 1, 1)[n] = ee * u1[n];
        G(1, 1, 1)[n] = -u2[n];
    }
    return G;
}

ConnectionField levi_civita_general(const MetricField& metric) {
    metric.validate();
    const Grid2& g = metric.grid();
    // dh[m][slot(i,j)] = d_m h_ij
    std::array<std::array<ScalarField2D, 3>, 2> dh;
    const std::array<const ScalarField2D*, 3> comps = {&metric.h11, &metric.h12, &metric.h22};
    for (int s = 0; s < 3; ++s) {
        dh[0][s] = diff(*comps[s], Deriv::d1);
        dh[1][s] = diff(*comps[s], Deriv::d2);
    }
    ConnectionField G = ConnectionField::zeros(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const Sym2 hi = inverse(metric_at(metric, n));
        auto d = [&](int m, int i, int j) { return dh[m][i + j][n]; };
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = i; j < 2; ++j) {
                    double acc = 0;
                    for (int l = 0; l < 2; ++l) acc += hi.at(k, l) * (d(i, j, l) + d(j, i, l) - d(l, i, j));
                    G(k, i, j)[n] = 0.5 * acc;
                }
    }
    return G;
}

ConnectionField levi_civita(const MetricField& metric) {
    metric.validate();
    int eps = 1, eta = 1;
    if (semi_isothermal(metric, eps, eta)) {
        const ScalarField2D u = conformal_u(metric);
        return semi_isothermal_christoffels(diff(u, Deriv::d1), diff(u, Deriv::d2), eps, eta);
    }
    if (null_metric(metric)) {
        const ScalarField2D w = map(metric.h12, [](double v) { return std::log(std::abs(v)); });
        ConnectionField G = ConnectionField::zeros(metric.grid());
        G(0, 0, 0) = diff(w, Deriv::d1);
        G(1, 1, 1) = diff(w, Deriv::d2);
        return G;
    }
    return levi_civita_general(metric);
}

BlaschkeStructure make_structure(const MetricField& metric, const ConnectionField& nabla_hat, const DifferenceField& K,
                                 const ShapeField& shape, StructureCase tag) {
    BlaschkeStructure s;
    s.metric = metric;
    s.nabla_hat = nabla_hat;
    s.K = K;
    s.shape = ShapeField::from_components(shape.S[0], shape.S[1], shape.S[2], shape.S[3]);
    s.case_tag = tag;
    s.nabla = ConnectionField::zeros(metric.grid());
    for (int c = 0; c < 6; ++c) s.nabla.c[c] = nabla_hat.c[c] + K.c[c];
    s.metric.validate();
    check_structure_grids(s);
    return s;
}

BlaschkeStructure build_eigen(const ScalarField2D& lambda, const ScalarField2D& mu) {
    require_same_grid(lambda.grid, mu.grid, "eigen structure");
    check_finite(lambda, "lambda");
    check_finite(mu, "mu");
    const Grid2& g = lambda.grid;
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i)
            if (!(mu(i, j) > lambda(i, j))) throw DomainError("eigen structure: need mu > lambda", i, j);
    const double eps = g.eps, eta = g.eta, ee = eps * eta;

    const ScalarField2D l1 = diff(lambda, Deriv::d1), l2 = diff(lambda, Deriv::d2);
    const ScalarField2D m1 = diff(mu, Deriv::d1), m2 = diff(mu, Deriv::d2);

    MetricField h{ScalarField2D(g), ScalarField2D(g), ScalarField2D(g)};
    ConnectionField G = ConnectionField::zeros(g);
    ScalarField2D u1(g), u2(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double d = lambda[n] - mu[n];
        h.h11[n] = eps / std::abs(d);
        h.h22[n] = eta / std::abs(d);
        G(0, 0, 0)[n] = -l1[n] / d;
        G(1, 0, 0)[n] = -ee * m2[n] / d;
        G(0, 0, 1)[n] = -l2[n] / d;
        G(1, 0, 1)[n] = m1[n] / d;
        G(0, 1, 1)[n] = ee * l1[n] / d;
        G(1, 1, 1)[n] = m2[n] / d;
        // u = ln(mu - lambda)/2
        u1[n] = (m1[n] - l1[n]) / (-2 * d);
        u2[n] = (m2[n] - l2[n]) / (-2 * d);
    }
    const ConnectionField Gh = semi_isothermal_christoffels(u1, u2, g.eps, g.eta);
    DifferenceField K = ConnectionField::zeros(g);
    for (int c = 0; c < 6; ++c) K.c[c] = G.c[c] - Gh.c[c];

    BlaschkeStructure s;
    s.metric = h;
    s.nabla = G;
    s.nabla_hat = Gh;
    s.K = K;
    s.shape = ShapeField::from_components(lambda, ScalarField2D(g), ScalarField2D(g), mu);
    s.case_tag = StructureCase::Eigen;
    s.metric.validate();
    return s;
}

BlaschkeStructure build_complex(const ScalarField2D& a, const ScalarField2D& b) {
    require_same_grid(a.grid, b.grid, "complex structure");
    check_finite(a, "a");
    check_finite(b, "b");
    const Grid2& g = a.grid;
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i)
            if (std::abs(b(i, j)) < 1e-8) throw DomainError("complex structure: b == 0", i, j);
    const ScalarField2D a1 = diff(a, Deriv::d1), a2 = diff(a, Deriv::d2);
    const ScalarField2D b1 = diff(b, Deriv::d1), b2 = diff(b, Deriv::d2);

    MetricField h{ScalarField2D(g), map(b, [](double v) { return 1 / v; }), ScalarField2D(g)};
    ConnectionField Gh = ConnectionField::zeros(g);
    DifferenceField K = ConnectionField::zeros(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
        Gh(0, 0, 0)[n] = -b1[n] / b[n];
        Gh(1, 1, 1)[n] = -b2[n] / b[n];
        K(1, 0, 0)[n] = a1[n] / b[n];
        K(0, 1, 1)[n] = -a2[n] / b[n];
    }
    const ShapeField S = ShapeField::from_components(a, -b, b, a);
    return make_structure(h, Gh, K, S, StructureCase::Complex);
}

namespace {

BlaschkeStructure conformal_structure(const ScalarField2D& u, int eps, int eta, double scale, const DifferenceField& K,
                                      double H, StructureCase tag) {
    const Grid2& g = u.grid;
    MetricField h{ScalarField2D(g), ScalarField2D(g), ScalarField2D(g)};
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double f = std::exp(-2 * u[n]);
        h.h11[n] = scale * eps * f;
        h.h22[n] = scale * eta * f;
    }
    const ConnectionField Gh = semi_isothermal_christoffels(diff(u, Deriv::d1), diff(u, Deriv::d2), eps, eta);
    BlaschkeStructure s = make_structure(h, Gh, K, ShapeField::scalar(g, H), tag);
    s.params["H"] = H;
    return s;
}

}  // namespace

BlaschkeStructure build_sphere_definite(const ScalarField2D& u, double H) {
    require_finite_u(u, "u");
    if (!std::isfinite(H)) throw ValidationError("H must be finite");
    const Grid2& g = u.grid;
    DifferenceField K = ConnectionField::zeros(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double e = std::exp(2 * u[n]);
        K(1, 0, 0)[n] = -e;
        K(1, 1, 1)[n] = e;
        K(0, 0, 1)[n] = -e;
    }
    return conformal_structure(u, 1, 1, 1.0, K, H, StructureCase::SphereDefinite);
}

BlaschkeStructure build_sphere_indefinite(const ScalarField2D& u, double H, int alpha) {
    require_finite_u(u, "u");
    if (!std::isfinite(H)) throw ValidationError("H must be finite");
    if (alpha != 1 && alpha != -1) throw ValidationError("alpha must be +1 or -1");
    const Grid2& g = u.grid;
    DifferenceField K = ConnectionField::zeros(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double e = std::exp(2 * u[n]);
        K(0, 0, 0)[n] = e;
        K(0, 1, 1)[n] = e;
        K(1, 0, 1)[n] = -e;
    }
    BlaschkeStructure s = conformal_structure(u, 1, -1, alpha, K, H, StructureCase::SphereIndefinite);
    s.params["alpha"] = alpha;
    return s;
}

BlaschkeStructure build_liouville(const ScalarField2D& u, double H) {
    require_finite_u(u, "u");
    if (!std::isfinite(H)) throw ValidationError("H must be finite");
    const Grid2& g = u.grid;
    MetricField h{ScalarField2D(g), map(u, [](double v) { return std::exp(-v); }), ScalarField2D(g)};
    ConnectionField Gh = ConnectionField::zeros(g);
    Gh(0, 0, 0) = -diff(u, Deriv::d1);
    Gh(1, 1, 1) = -diff(u, Deriv::d2);
    DifferenceField K = ConnectionField::zeros(g);
    K(0, 1, 1) = map(u, [](double v) { return std::exp(v); });
    BlaschkeStructure s = make_structure(h, Gh, K, ShapeField::scalar(g, H), StructureCase::Liouville);
    s.params["H"] = H;
    return s;
}

BlaschkeStructure build_family(const ScalarField2D& u, double angle, int eps, SignatureKind kind, double H, int sigma) {
    require_finite_u(u, "u");
    if (!std::isfinite(angle) || !std::isfinite(H)) throw ValidationError("family: parameters must be finite");
    if (eps != 1 && eps != -1) throw ValidationError("family: eps must be +1 or -1");
    if (sigma != 1 && sigma != -1) throw ValidationError("family: sigma must be +1 or -1");
    const Grid2& g = u.grid;
    DifferenceField K = ConnectionField::zeros(g);
    BlaschkeStructure s;
    if (kind == SignatureKind::Definite) {
        const double sn = std::sin(3 * angle), cs = std::cos(3 * angle);
        for (std::size_t n = 0; n < g.size(); ++n) {
            const double e = std::exp(2 * u[n]);
            K(0, 0, 0)[n] = -e * sn;
            K(1, 0, 0)[n] = -e * eps * cs;
            K(0, 1, 1)[n] = e * sn;
            K(1, 1, 1)[n] = e * eps * cs;
            K(0, 0, 1)[n] = -e * eps * cs;
            K(1, 0, 1)[n] = e * sn;
        }
        s = conformal_structure(u, 1, 1, 1.0, K, H, StructureCase::Family);
    } else {
        const double sh = std::sinh(3 * angle), ch = std::cosh(3 * angle);
        for (std::size_t n = 0; n < g.size(); ++n) {
            const double e = std::exp(2 * u[n]);
            K(0, 0, 0)[n] = e * ch;
            K(1, 0, 0)[n] = -e * eps * sh;
            K(0, 1, 1)[n] = e * ch;
            K(1, 1, 1)[n] = -e * eps * sh;
            K(0, 0, 1)[n] = e * eps * sh;
            K(1, 0, 1)[n] = -e * ch;
        }
        s = conformal_structure(u, 1, -1, sigma, K, H, StructureCase::Family);
        s.params["sigma"] = sigma;
    }
    s.params["angle"] = angle;
    s.params["eps"] = eps;
    s.params["indefinite"] = kind == SignatureKind::Indefinite ? 1 : 0;
    return s;
}

CubicInvariants cubic_invariants(const BlaschkeStructure& s) {
    const Grid2& g = s.grid();
    std::array<std::array<ScalarField2D, 3>, 2> dh;
    const std::array<const ScalarField2D*, 3> comps = {&s.metric.h11, &s.metric.h12, &s.metric.h22};
    for (int c = 0; c < 3; ++c) {
        dh[0][c] = diff(*comps[c], Deriv::d1);
        dh[1][c] = diff(*comps[c], Deriv::d2);
    }
    std::array<ScalarField2D, 8> C;
    for (auto& f : C) f = ScalarField2D(g);
    for (std::size_t n = 0; n < g.size(); ++n)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) {
                    double v = dh[i][j + k][n];
                    for (int m = 0; m < 2; ++m)
                        v -= s.nabla.at(m, i, j, n) * s.metric.at(m, k, n) + s.nabla.at(m, i, k, n) * s.metric.at(j, m, n);
                    C[4 * i + 2 * j + k][n] = v;
                }
    return contract(s.metric, std::move(C));
}

CubicInvariants cubic_invariants_algebraic(const BlaschkeStructure& s) {
    const Grid2& g = s.grid();
    std::array<ScalarField2D, 8> C;
    for (auto& f : C) f = ScalarField2D(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
        auto Klow = [&](int i, int j, int k) {
            double v = 0;
            for (int m = 0; m < 2; ++m) v += s.K.at(m, i, j, n) * s.metric.at(m, k, n);
            return v;
        };
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) C[4 * i + 2 * j + k][n] = -(Klow(i, j, k) + Klow(i, k, j));
    }
    return contract(s.metric, std::move(C));
}

ScalarField2D gauss_curvature_brioschi(const MetricField& metric) {
    metric.validate();
    const ScalarField2D &E = metric.h11, &F = metric.h12, &G = metric.h22;
    const ScalarField2D Eu = diff(E, Deriv::d1), Ev = diff(E, Deriv::d2);
    const ScalarField2D Fu = diff(F, Deriv::d1), Fv = diff(F, Deriv::d2);
    const ScalarField2D Gu = diff(G, Deriv::d1), Gv = diff(G, Deriv::d2);
    const ScalarField2D Evv = diff(E, Deriv::d22), Fuv = diff(F, Deriv::d12), Guu = diff(G, Deriv::d11);
    ScalarField2D K(E.grid);
    auto det3x3 = [](const double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    for (std::size_t n = 0; n < K.values.size(); ++n) {
        const double A[3][3] = {{-0.5 * Evv[n] + Fuv[n] - 0.5 * Guu[n], 0.5 * Eu[n], Fu[n] - 0.5 * Ev[n]},
                                {Fv[n] - 0.5 * Gu[n], E[n], F[n]},
                                {0.5 * Gv[n], F[n], G[n]}};
        const double B[3][3] = {{0, 0.5 * Ev[n], 0.5 * Gu[n]}, {0.5 * Ev[n], E[n], F[n]}, {0.5 * Gu[n], F[n], G[n]}};
        const double d = E[n] * G[n] - F[n] * F[n];
        K[n] = (det3x3(A) - det3x3(B)) / (d * d);
    }
    return K;
}

ScalarField2D gauss_curvature(const MetricField& metric) {
    metric.validate();
    int eps = 1, eta = 1;
    if (!semi_isothermal(metric, eps, eta)) return gauss_curvature_brioschi(metric);
    const ScalarField2D u = conformal_u(metric);
    const ScalarField2D u11 = diff(u, Deriv::d11), u22 = diff(u, Deriv::d22);
    ScalarField2D K(u.grid);
    for (std::size_t n = 0; n < K.values.size(); ++n) K[n] = std::exp(2 * u[n]) * (eps * u11[n] + eta * u22[n]);
    return K;
}

ScalarField2D gauss_curvature_connection(const MetricField& metric, const ConnectionField& conn) {
    metric.validate();
    const ConnDerivs dG(conn);
    ScalarField2D K(metric.grid());
    for (std::size_t n = 0; n < K.values.size(); ++n) {
        double v = 0;
        for (int l = 0; l < 2; ++l) v += metric.at(l, 0, n) * curvature(conn, dG, l, 1, 0, 1, n);
        const double d = metric.h11[n] * metric.h22[n] - metric.h12[n] * metric.h12[n];
        K[n] = v / d;
    }
    return K;
}

ScalarField2D egregium_defect(const BlaschkeStructure& s) {
    const ScalarField2D Kh = gauss_curvature(s.metric);
    const CubicInvariants ci = cubic_invariants_algebraic(s);
    ScalarField2D d(s.grid());
    for (std::size_t n = 0; n < d.values.size(); ++n) d[n] = Kh[n] - s.shape.H[n] - ci.J[n];
    return d;
}

double ResidualReport::max() const {
    double m = 0;
    for (const auto& [k, v] : entries()) m = std::max(m, v);
    return m;
}

std::map<std::string, double> ResidualReport::entries() const {
    return {{"gauss", gauss},         {"codazzi_C", codazzi_C}, {"codazzi_S", codazzi_S},
            {"ricci", ricci},         {"r1_symmetry", r1_symmetry}, {"apolarity", apolarity},
            {"proj_flat", proj_flat}, {"egregium", egregium},   {"gamma_sym", gamma_sym}};
}

ResidualReport verify(const BlaschkeStructure& s) {
    s.metric.validate();
    check_structure_grids(s);
    const Grid2& g = s.grid();
    const SymTensorField& G = s.nabla;
    const ConnDerivs dG(G);
    std::array<std::array<ScalarField2D, 4>, 2> dS;
    for (int c = 0; c < 4; ++c) {
        dS[0][c] = diff(s.shape.S[c], Deriv::d1);
        dS[1][c] = diff(s.shape.S[c], Deriv::d2);
    }
    const CubicInvariants C = cubic_invariants(s);
    const CubicInvariants Calg = cubic_invariants_algebraic(s);
    const ScalarField2D Kh = gauss_curvature(s.metric);

    // gamma_jk = 2H h_jk - h_jm S^m_k (slot 2j + k) and its derivatives
    std::array<ScalarField2D, 4> gam;
    for (auto& f : gam) f = ScalarField2D(g);
    for (std::size_t n = 0; n < g.size(); ++n)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                double v = 2 * s.shape.H[n] * s.metric.at(j, k, n);
                for (int m = 0; m < 2; ++m) v -= s.metric.at(j, m, n) * s.shape.at(m, k, n);
                gam[2 * j + k][n] = v;
            }
    std::array<std::array<ScalarField2D, 4>, 2> dgam;
    for (int c = 0; c < 4; ++c) {
        dgam[0][c] = diff(gam[c], Deriv::d1);
        dgam[1][c] = diff(gam[c], Deriv::d2);
    }

    // (nabla S)(d_i, d_j) component l
    auto nablaS = [&](int i, int j, int l, std::size_t n) {
        double v = dS[i][2 * l + j][n];
        for (int m = 0; m < 2; ++m) v += s.shape.at(m, j, n) * G.at(l, i, m, n) - s.shape.at(l, m, n) * G.at(m, i, j, n);
        return v;
    };

    ResidualReport r;
    r.gauss = interior_max(g, [&](std::size_t n) {
        double m = 0;
        for (int l = 0; l < 2; ++l)
            for (int k = 0; k < 2; ++k) {
                const double rhs = s.metric.at(1, k, n) * s.shape.at(l, 0, n) - s.metric.at(0, k, n) * s.shape.at(l, 1, n);
                m = std::max(m, std::abs(curvature(G, dG, l, k, 0, 1, n) - rhs));
            }
        return m;
    });
    r.codazzi_C = interior_max(g, [&](std::size_t n) {
        double m = 0;
        for (int k = 0; k < 2; ++k) m = std::max(m, std::abs(C.C[0 + 2 + k][n] - C.C[4 + 0 + k][n]));
        return m;
    });
    r.codazzi_S = interior_max(g, [&](std::size_t n) {
        double m = 0;
        for (int l = 0; l < 2; ++l) m = std::max(m, std::abs(nablaS(0, 1, l, n) - nablaS(1, 0, l, n)));
        return m;
    });
    r.ricci = interior_max(g, [&](std::size_t n) {
        double v = 0;
        for (int m = 0; m < 2; ++m) v += s.shape.at(m, 0, n) * s.metric.at(m, 1, n) - s.shape.at(m, 1, n) * s.metric.at(0, m, n);
        return std::abs(v);
    });
    r.r1_symmetry = interior_max(g, [&](std::size_t n) {
        double mx = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) {
                    double a = 0, b = 0;
                    for (int m = 0; m < 2; ++m) {
                        a += s.K.at(m, i, j, n) * s.metric.at(m, k, n);
                        b += s.K.at(m, i, k, n) * s.metric.at(m, j, n);
                    }
                    mx = std::max(mx, std::abs(a - b));
                }
        return mx;
    });
    r.apolarity = interior_max(g, [&](std::size_t n) {
        const Sym2 hi = inverse(metric_at(s.metric, n));
        double mx = 0;
        for (int l = 0; l < 2; ++l) {
            double v = 0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) v += hi.at(i, j) * s.K.at(l, i, j, n);
            mx = std::max(mx, std::abs(v));
        }
        return mx;
    });
    r.proj_flat = interior_max(g, [&](std::size_t n) {
        const Sym2 hi = inverse(metric_at(s.metric, n));
        double mx = 0;
        for (int l = 0; l < 2; ++l) {
            double v = 0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) v += hi.at(i, j) * nablaS(i, j, l, n);
            mx = std::max(mx, std::abs(v));
        }
        return mx;
    });
    r.egregium = interior_max(g, [&](std::size_t n) { return std::abs(Kh[n] - s.shape.H[n] - Calg.J[n]); });
    r.gamma_sym = interior_max(g, [&](std::size_t n) {
        // (nabla_i gamma)_jk = d_i gamma_jk - G^m_ij gamma_mk - G^m_ik gamma_jm
        auto ng = [&](int i, int j, int k) {
            double v = dgam[i][2 * j + k][n];
            for (int m = 0; m < 2; ++m) v -= G.at(m, i, j, n) * gam[2 * m + k][n] + G.at(m, i, k, n) * gam[2 * j + m][n];
            return v;
        };
        double mx = 0;
        for (int k = 0; k < 2; ++k) mx = std::max(mx, std::abs(ng(0, 1, k) - ng(1, 0, k)));
        return mx;
    });
    return r;
}

double commutator_identity(const BlaschkeStructure& s) {
    s.metric.validate();
    const Grid2& g = s.grid();
    const CubicInvariants ci = cubic_invariants_algebraic(s);
    double mx = 0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        const Sym2 h = metric_at(s.metric, n);
        // |h| = V |Lambda| V^T for the symmetric 2x2 matrix h
        const double tr = h.a00 + h.a11, det = h.a00 * h.a11 - h.a01 * h.a01;
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
        const double l1 = tr / 2 + disc, l2 = tr / 2 - disc;
        double ab[2][2];
        if (disc == 0) {
            ab[0][0] = ab[1][1] = std::abs(l1);
            ab[0][1] = ab[1][0] = 0;
        } else {
            // projector onto the l1 eigenspace: (h - l2 I)/(l1 - l2)
            const double p00 = (h.a00 - l2) / (l1 - l2), p01 = h.a01 / (l1 - l2), p11 = (h.a11 - l2) / (l1 - l2);
            const double a1 = std::abs(l1), a2 = std::abs(l2);
            ab[0][0] = a1 * p00 + a2 * (1 - p00);
            ab[0][1] = ab[1][0] = (a1 - a2) * p01;
            ab[1][1] = a1 * p11 + a2 * (1 - p11);
        }
        for (int k = 0; k < 2; ++k) {
            double v[2];
            for (int l = 0; l < 2; ++l) {
                double c = 0;
                for (int m = 0; m < 2; ++m) c += s.K.at(m, 1, k, n) * s.K.at(l, 0, m, n) - s.K.at(m, 0, k, n) * s.K.at(l, 1, m, n);
                v[l] = c;
            }
            v[0] += ci.J[n] * h.at(1, k);
            v[1] -= ci.J[n] * h.at(0, k);
            const double q = v[0] * v[0] * ab[0][0] + 2 * v[0] * v[1] * ab[0][1] + v[1] * v[1] * ab[1][1];
            mx = std::max(mx, std::sqrt(std::max(0.0, q)));
        }
    }
    return mx;
}

FrameForm conformal_frame_form(const MetricField& metric, const ConnectionField& nabla_hat) {
    metric.validate();
    int eps = 1, eta = 1;
    if (!semi_isothermal(metric, eps, eta)) throw ValidationError("conformal_frame_form: metric is not semi-isothermal");
    const ScalarField2D u = conformal_u(metric);
    FrameForm f{ScalarField2D(u.grid), ScalarField2D(u.grid)};
    for (std::size_t n = 0; n < u.values.size(); ++n) {
        const double e = std::exp(u[n]);
        f.omega_E1[n] = e * nabla_hat.at(0, 0, 1, n);
        f.omega_E2[n] = e * nabla_hat.at(0, 1, 1, n);
    }
    return f;
}

}  // namespace affsurf
