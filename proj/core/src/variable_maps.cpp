#include "affsurf/variable_maps.hpp"

#include <cmath>
#include <numbers>

#include "affsurf/error.hpp"

namespace affsurf {

using std::numbers::pi;

EigenCase EigenCase::from_tau(double tau) {
    if (!std::isfinite(tau)) throw ValidationError("tau must be finite");
    EigenCase c;
    c.tau = tau;
    c.tag = tau > 0 ? EigenCaseTag::PositiveTau : (tau < 0 ? EigenCaseTag::NegativeTau : EigenCaseTag::ZeroTau);
    return c;
}

void EigenCase::validate() const {
    if (!std::isfinite(tau)) throw ValidationError("tau must be finite");
    const bool ok = (tag == EigenCaseTag::PositiveTau && tau > 0) || (tag == EigenCaseTag::ZeroTau && tau == 0) ||
                    (tag == EigenCaseTag::NegativeTau && tau < 0);
    if (!ok) throw ValidationError("sign of tau does not match the eigen case");
}

std::string to_string(EigenCaseTag t) {
    switch (t) {
        case EigenCaseTag::PositiveTau: return "pos";
        case EigenCaseTag::ZeroTau: return "zero";
        case EigenCaseTag::NegativeTau: return "neg";
    }
    return "?";
}

ScalarField2D lambda_psi(const EigenCase& c, Direction dir, const ScalarField2D& field) {
    c.validate();
    check_finite(field, "lambda_psi");
    const Grid2& g = field.grid;
    ScalarField2D out(g);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const double v = field(i, j);
            double r = 0;
            switch (c.tag) {
                case EigenCaseTag::PositiveTau: {
                    const double s = std::sqrt(c.tau);
                    if (dir == Direction::Forward) {
                        if (!(std::abs(v) < s)) throw DomainError("lambda_psi: need |lambda| < sqrt(tau)", i, j);
                        r = -2.0 * std::atanh(v / s);
                    } else {
                        r = -s * std::tanh(v / 2);
                    }
                    break;
                }
                case EigenCaseTag::ZeroTau:
                    if (v == 0) throw DomainError(dir == Direction::Forward ? "lambda_psi: lambda == 0" : "lambda_psi: psi == 0", i, j);
                    r = 1.0 / v;
                    break;
                case EigenCaseTag::NegativeTau: {
                    const double s = std::sqrt(-c.tau);
                    if (dir == Direction::Forward) {
                        // arccot with values in (0, pi)
                        r = -2.0 * (pi / 2 - std::atan(v / s));
                    } else {
                        const double sh = std::sin(v / 2);
                        if (std::abs(sh) < 1e-14) throw DomainError("lambda_psi: psi is a multiple of 2 pi", i, j);
                        r = -s * std::cos(v / 2) / sh;
                    }
                    break;
                }
            }
            out(i, j) = r;
        }
    return out;
}

ScalarField2D companion_mu(const EigenCase& c, const ScalarField2D& lambda) {
    c.validate();
    const Grid2& g = lambda.grid;
    ScalarField2D out(g);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            if (c.tag == EigenCaseTag::ZeroTau) {
                out(i, j) = 0;
                continue;
            }
            if (lambda(i, j) == 0) throw DomainError("companion_mu: lambda == 0", i, j);
            out(i, j) = c.tau / lambda(i, j);
        }
    return out;
}

RescaleResult tzitzeica_rescale(const ScalarField2D& field, double H, Direction dir, SignatureKind kind, int alpha) {
    if (!std::isfinite(H)) throw ValidationError("tzitzeica_rescale: H must be finite");
    if (alpha != 1 && alpha != -1) throw ValidationError("tzitzeica_rescale: alpha must be +-1");
    check_finite(field, "tzitzeica_rescale");
    RescaleResult res;
    const double aH = std::abs(H);
    if (H == 0) {
        res.a = 2;
        res.b = 1;
        res.eps_t = 0;
    } else {
        res.a = std::cbrt(4 * aH);
        res.b = std::cbrt(aH / 2);
        const double sH = kind == SignatureKind::Definite ? H : alpha * H;
        res.eps_t = sH > 0 ? 1 : -1;
    }
    res.residual_factor = 2 / (res.a * res.a);
    const double lnb = H == 0 ? 0.0 : std::log(res.b);

    const Grid2& g = field.grid;
    const double s = dir == Direction::Forward ? res.a : 1 / res.a;
    Grid2 t = g;
    t.x1_min *= s;
    t.x1_max *= s;
    t.x2_min *= s;
    t.x2_max *= s;
    res.field = ScalarField2D(t);
    for (std::size_t k = 0; k < g.size(); ++k)
        res.field[k] = dir == Direction::Forward ? 2 * field[k] - lnb : 0.5 * (field[k] + lnb);
    if (dir == Direction::Inverse) res.residual_factor = 1 / res.residual_factor;
    return res;
}

ScalarField2D unwrap_angle(const ScalarField2D& angle, double period) {
    const Grid2& g = angle.grid;
    ScalarField2D out = angle;
    auto fix = [period](double prev, double v) {
        return v - period * std::round((v - prev) / period);
    };
    for (int i = 1; i < g.n1; ++i) out(i, 0) = fix(out(i - 1, 0), angle(i, 0));
    for (int i = 0; i < g.n1; ++i)
        for (int j = 1; j < g.n2; ++j) out(i, j) = fix(out(i, j - 1), angle(i, j));
    return out;
}

AnglePair complex_angle_maps(const ScalarField2D& a, const ScalarField2D& b, double tau) {
    if (!(tau > 0) || !std::isfinite(tau)) throw ValidationError("complex_angle_maps: tau must be positive");
    require_same_grid(a.grid, b.grid, "complex_angle_maps");
    check_finite(a, "complex_angle_maps a");
    check_finite(b, "complex_angle_maps b");
    const Grid2& g = a.grid;
    ScalarField2D raw(g);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const double A = a(i, j), B = b(i, j);
            if (std::abs(A * A + B * B - tau) > 1e-8) throw DomainError("complex_angle_maps: a^2 + b^2 != tau", i, j);
            if (!(B > 0)) throw DomainError("complex_angle_maps: need b > 0", i, j);
            raw(i, j) = std::atan2(B, A);
        }
    AnglePair out{unwrap_angle(raw), ScalarField2D(g)};
    for (std::size_t k = 0; k < g.size(); ++k) out.psi[k] = std::log(std::tan(out.phi[k] / 2));
    return out;
}

ScalarField2D phi_from_psi(const ScalarField2D& psi) {
    return map(psi, [](double p) { return 2 * std::atan(std::exp(p)); });
}

CanonicalFrame canonical_frame(SignatureKind kind, const ScalarField2D& a, const ScalarField2D& b) {
    require_same_grid(a.grid, b.grid, "canonical_frame");
    check_finite(a, "canonical_frame a");
    check_finite(b, "canonical_frame b");
    const Grid2& g = a.grid;
    CanonicalFrame cf;
    FrameAngles& fa = cf.angles;
    fa.lambda = ScalarField2D(g);
    fa.psi = ScalarField2D(g);
    fa.phi = ScalarField2D(g);
    fa.sign = ScalarField2D(g, 1.0);

    if (kind == SignatureKind::Definite) {
        ScalarField2D raw(g);
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                const double A = a(i, j), B = b(i, j);
                if (A == 0 && B == 0) throw DomainError("canonical_frame: (a, b) == (0, 0)", i, j);
                fa.lambda(i, j) = std::hypot(A, B);
                raw(i, j) = std::atan2(B, A);
            }
        fa.psi = unwrap_angle(raw);
        fa.phi = map(fa.psi, [](double p) { return p / 3; });
        cf.eps = 1;
        return cf;
    }

    // Classify every node; the class must be uniform.
    int eps = 2;
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const double A = a(i, j), B = b(i, j);
            const double d = A * A - B * B;
            const int e = std::abs(d) <= 1e-12 * (A * A + B * B) ? 0 : (d > 0 ? 1 : -1);
            if (eps == 2)
                eps = e;
            else if (e != eps)
                throw DomainError("canonical_frame: sign of a^2 - b^2 changes across the field", i, j);
        }
    cf.eps = eps;
    if (eps == 0) {
        cf.null_a = a;
        fa.lambda = ScalarField2D(g, 0.0);
        return cf;
    }
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const double A = a(i, j), B = b(i, j);
            fa.lambda(i, j) = std::sqrt(eps * (A * A - B * B));
            if (eps == 1) {
                if (std::abs(B) >= std::abs(A)) throw DomainError("canonical_frame: |b| >= |a| in the eps = 1 branch", i, j);
                fa.psi(i, j) = std::atanh(B / A);
                fa.sign(i, j) = A > 0 ? 1 : -1;
            } else {
                fa.psi(i, j) = std::atanh(A / B);
                fa.sign(i, j) = B > 0 ? 1 : -1;
            }
            fa.phi(i, j) = fa.psi(i, j) / 3;
        }
    return cf;
}

}  // namespace affsurf
