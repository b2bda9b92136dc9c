#include "affsurf/soliton_eqs.hpp"

#include <cmath>
#include <map>

#include "affsurf/error.hpp"

namespace affsurf {

int SolitonEquation::arity() const {
    return (tag == EqTag::GaussSystem || tag == EqTag::ComplexGaussSystem) ? 2 : 1;
}

bool SolitonEquation::is_mixed() const {
    return tag == EqTag::CoshGordonMixed || tag == EqTag::LiouvilleMixed;
}

bool SolitonEquation::is_laplace_form() const {
    switch (tag) {
        case EqTag::SinhGordon:
        case EqTag::LinearDegenerate:
        case EqTag::SineGordon:
        case EqTag::Tzitzeica:
        case EqTag::SphereLambda:
        case EqTag::SphereLambda1: return true;
        default: return false;
    }
}

void SolitonEquation::validate() const {
    if (!std::isfinite(H) || !std::isfinite(tau)) throw ValidationError("equation parameters must be finite");
    if (alpha != 1 && alpha != -1) throw ValidationError("alpha must be +1 or -1");
    if (eps_t < -1 || eps_t > 1) throw ValidationError("eps_t must be -1, 0 or +1");
}

EqTag eq_tag_from_string(const std::string& s) {
    static const std::map<std::string, EqTag> tags = {
        {"sinh-gordon", EqTag::SinhGordon},       {"linear", EqTag::LinearDegenerate},
        {"sine-gordon", EqTag::SineGordon},       {"cosh-gordon", EqTag::CoshGordonMixed},
        {"tzitzeica", EqTag::Tzitzeica},          {"sphere-lambda", EqTag::SphereLambda},
        {"sphere-lambda1", EqTag::SphereLambda1}, {"liouville", EqTag::LiouvilleMixed},
        {"gauss-system", EqTag::GaussSystem},     {"constant-tau", EqTag::ConstantTauReduced},
        {"complex-gauss", EqTag::ComplexGaussSystem}, {"phi-eq", EqTag::PhiEquation},
    };
    auto it = tags.find(s);
    if (it == tags.end()) throw ValidationError("unknown equation tag '" + s + "'");
    return it->second;
}

std::string to_string(EqTag t) {
    switch (t) {
        case EqTag::SinhGordon: return "sinh-gordon";
        case EqTag::LinearDegenerate: return "linear";
        case EqTag::SineGordon: return "sine-gordon";
        case EqTag::CoshGordonMixed: return "cosh-gordon";
        case EqTag::Tzitzeica: return "tzitzeica";
        case EqTag::SphereLambda: return "sphere-lambda";
        case EqTag::SphereLambda1: return "sphere-lambda1";
        case EqTag::LiouvilleMixed: return "liouville";
        case EqTag::GaussSystem: return "gauss-system";
        case EqTag::ConstantTauReduced: return "constant-tau";
        case EqTag::ComplexGaussSystem: return "complex-gauss";
        case EqTag::PhiEquation: return "phi-eq";
    }
    return "?";
}

double rhs_value(const SolitonEquation& eq, double p) {
    switch (eq.tag) {
        case EqTag::SinhGordon: return -std::sinh(p);
        case EqTag::LinearDegenerate: return -p;
        case EqTag::SineGordon: return std::sin(p);
        case EqTag::CoshGordonMixed: return std::cosh(p);
        case EqTag::Tzitzeica: return std::exp(2 * p) + eq.eps_t * std::exp(-p);
        case EqTag::SphereLambda: return eq.H * std::exp(-2 * p) + 2 * std::exp(4 * p);
        case EqTag::SphereLambda1: return eq.alpha * eq.H * std::exp(-2 * p) + 2 * std::exp(4 * p);
        case EqTag::LiouvilleMixed: return eq.H * std::exp(-p);
        default: throw ValidationError("equation " + to_string(eq.tag) + " has no pointwise right-hand side");
    }
}

double rhs_derivative(const SolitonEquation& eq, double p) {
    switch (eq.tag) {
        case EqTag::SinhGordon: return -std::cosh(p);
        case EqTag::LinearDegenerate: return -1.0;
        case EqTag::SineGordon: return std::cos(p);
        case EqTag::CoshGordonMixed: return std::sinh(p);
        case EqTag::Tzitzeica: return 2 * std::exp(2 * p) - eq.eps_t * std::exp(-p);
        case EqTag::SphereLambda: return -2 * eq.H * std::exp(-2 * p) + 8 * std::exp(4 * p);
        case EqTag::SphereLambda1: return -2 * eq.alpha * eq.H * std::exp(-2 * p) + 8 * std::exp(4 * p);
        case EqTag::LiouvilleMixed: return -eq.H * std::exp(-p);
        default: throw ValidationError("equation " + to_string(eq.tag) + " has no pointwise right-hand side");
    }
}

namespace {

double grad2(const Grid2& g, double f1, double f2) { return g.eps * f1 * f1 + g.eta * f2 * f2; }

std::vector<ScalarField2D> gauss_system(const SolitonEquation& eq, const ScalarField2D& lam, const ScalarField2D& mu) {
    const Grid2& g = lam.grid;
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i)
            if (std::abs(lam(i, j) - mu(i, j)) < 1e-8) throw DomainError("gauss-system: lambda == mu", i, j);
    const ScalarField2D l1 = diff(lam, Deriv::d1), l2 = diff(lam, Deriv::d2);
    const ScalarField2D m1 = diff(mu, Deriv::d1), m2 = diff(mu, Deriv::d2);
    const ScalarField2D dl = laplace0(lam), dm = laplace0(mu);
    ScalarField2D r1(g), r2(g), r3(g);
    const double a = eq.alpha;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double d = lam[k] - mu[k];
        r1[k] = dm[k] + 2.0 / d * grad2(g, m1[k], m2[k]) - a * mu[k];
        r2[k] = dl[k] - 2.0 / d * grad2(g, l1[k], l2[k]) + a * lam[k];
        r3[k] = l1[k] * m2[k] - m1[k] * l2[k];
    }
    return {r1, r2, r3};
}

ScalarField2D constant_tau(const SolitonEquation& eq, const ScalarField2D& lam) {
    const Grid2& g = lam.grid;
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i)
            if (std::abs(eq.tau - lam(i, j) * lam(i, j)) < 1e-8)
                throw DomainError("constant-tau: lambda^2 == tau", i, j);
    const ScalarField2D l1 = diff(lam, Deriv::d1), l2 = diff(lam, Deriv::d2), dl = laplace0(lam);
    ScalarField2D r(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double l = lam[k];
        r[k] = dl[k] + 2 * l / (eq.tau - l * l) * grad2(g, l1[k], l2[k]) + l;
    }
    return r;
}

std::vector<ScalarField2D> complex_gauss(const ScalarField2D& a, const ScalarField2D& b) {
    const Grid2& g = a.grid;
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i)
            if (std::abs(b(i, j)) < 1e-8) throw DomainError("complex-gauss: b == 0", i, j);
    const ScalarField2D a1 = diff(a, Deriv::d1), a2 = diff(a, Deriv::d2), a12 = diff(a, Deriv::d12);
    const ScalarField2D b1 = diff(b, Deriv::d1), b2 = diff(b, Deriv::d2), b12 = diff(b, Deriv::d12);
    ScalarField2D r1(g), r2(g), r3(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        r1[k] = b[k] * a12[k] - 2 * a1[k] * b2[k] + b[k] * b[k];
        r2[k] = b[k] * b12[k] + a1[k] * a2[k] - b1[k] * b2[k] - a[k] * b[k];
        r3[k] = a1[k] * b2[k] - a2[k] * b1[k];
    }
    return {r1, r2, r3};
}

ScalarField2D phi_equation(const ScalarField2D& phi) {
    const ScalarField2D p1 = diff(phi, Deriv::d1), p2 = diff(phi, Deriv::d2), p12 = diff(phi, Deriv::d12);
    ScalarField2D r(phi.grid);
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        const double s = std::sin(phi[k]), c = std::cos(phi[k]);
        r[k] = s * p12[k] - c * p1[k] * p2[k] - s;
    }
    return r;
}

}  // namespace

std::vector<ScalarField2D> residual(const SolitonEquation& eq, const std::vector<ScalarField2D>& fields) {
    eq.validate();
    if (static_cast<int>(fields.size()) != eq.arity())
        throw ValidationError("equation " + to_string(eq.tag) + " expects " + std::to_string(eq.arity()) + " field(s)");
    for (const auto& f : fields) check_finite(f, "residual input");
    if (fields.size() == 2) require_same_grid(fields[0].grid, fields[1].grid, "residual");

    const ScalarField2D& f = fields[0];
    if (eq.is_laplace_form()) {
        ScalarField2D r = laplace0(f);
        for (std::size_t k = 0; k < r.values.size(); ++k) r[k] -= rhs_value(eq, f[k]);
        return {r};
    }
    if (eq.is_mixed()) {
        ScalarField2D r = diff(f, Deriv::d12);
        for (std::size_t k = 0; k < r.values.size(); ++k) r[k] -= rhs_value(eq, f[k]);
        return {r};
    }
    switch (eq.tag) {
        case EqTag::GaussSystem: return gauss_system(eq, fields[0], fields[1]);
        case EqTag::ConstantTauReduced: return {constant_tau(eq, f)};
        case EqTag::ComplexGaussSystem: return complex_gauss(fields[0], fields[1]);
        case EqTag::PhiEquation: return {phi_equation(f)};
        default: break;
    }
    throw ValidationError("unhandled equation");
}

ScalarField2D residual(const SolitonEquation& eq, const ScalarField2D& field) {
    auto r = residual(eq, std::vector<ScalarField2D>{field});
    if (r.size() != 1) throw ValidationError("equation has several residual fields");
    return r.front();
}

}  // namespace affsurf
