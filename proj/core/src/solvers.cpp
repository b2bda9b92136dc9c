#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "affsurf/error.hpp"
#include "affsurf/soliton_eqs.hpp"

namespace affsurf {

ScalarField2D with_edges(const ScalarField2D& field, const ScalarField2D& boundary) {
    require_same_grid(field.grid, boundary.grid, "with_edges");
    ScalarField2D out = field;
    const Grid2& g = field.grid;
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i)
            if (g.is_boundary(i, j)) out(i, j) = boundary(i, j);
    return out;
}

namespace {

// Interior residual of the 5-point scheme, d0 psi - N(psi) - s.
double interior_residual(const SolitonEquation& eq, const ScalarField2D& psi, const ScalarField2D* source,
                         Eigen::VectorXd& out) {
    const Grid2& g = psi.grid;
    const int m1 = g.n1 - 2;
    const double c1 = g.eps / (g.h1() * g.h1()), c2 = g.eta / (g.h2() * g.h2());
    double norm = 0;
    for (int j = 1; j < g.n2 - 1; ++j)
        for (int i = 1; i < g.n1 - 1; ++i) {
            const double p = psi(i, j);
            double r = c1 * (psi(i + 1, j) - 2 * p + psi(i - 1, j)) + c2 * (psi(i, j + 1) - 2 * p + psi(i, j - 1)) -
                       rhs_value(eq, p);
            if (source) r -= (*source)(i, j);
            out[(i - 1) + m1 * (j - 1)] = r;
            norm = std::isfinite(r) ? std::max(norm, std::abs(r)) : std::numeric_limits<double>::infinity();
        }
    return norm;
}

}  // namespace

SolveResult solve_elliptic(const SolitonEquation& eq, const ScalarField2D& boundary, const ScalarField2D& init,
                           const NewtonOptions& opts, const ScalarField2D* source) {
    eq.validate();
    if (!eq.is_laplace_form() || eq.tag == EqTag::SphereLambda1)
        throw ValidationError("solve_elliptic: equation " + to_string(eq.tag) + " is not an elliptic Laplace-form equation");
    const Grid2& g = init.grid;
    if (g.eps != g.eta) throw ValidationError("solve_elliptic: grid signature must satisfy eps == eta");
    require_same_grid(g, boundary.grid, "solve_elliptic");
    if (source) require_same_grid(g, source->grid, "solve_elliptic source");
    if (!(opts.tol > 0) || opts.max_iter < 1 || !(opts.damping > 0 && opts.damping <= 1))
        throw ValidationError("solve_elliptic: need tol > 0, max_iter >= 1, damping in (0,1]");
    check_finite(init, "solve_elliptic init");
    check_finite(boundary, "solve_elliptic boundary");
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i)
            if (g.is_boundary(i, j) && std::abs(init(i, j) - boundary(i, j)) > 1e-14 * (1 + std::abs(boundary(i, j))))
                throw DomainError("solve_elliptic: init does not match the boundary data", i, j);

    const int m1 = g.n1 - 2, m2 = g.n2 - 2, m = m1 * m2;
    const double c1 = g.eps / (g.h1() * g.h1()), c2 = g.eta / (g.h2() * g.h2());
    auto id = [m1](int i, int j) { return (i - 1) + m1 * (j - 1); };

    ScalarField2D psi = init;
    Eigen::VectorXd F(m), Ftrial(m);
    double fnorm = interior_residual(eq, psi, source, F);
    if (!std::isfinite(fnorm)) throw NumericalError("solve_elliptic: non-finite residual at the initial guess");

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool analyzed = false;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(5 * m));
    SolveReport rep;
    double step_norm = 0;

    for (int it = 0; it < opts.max_iter; ++it) {
        if (fnorm < opts.tol) {
            rep.iterations = it;
            rep.residual_norm = fnorm;
            rep.last_step_norm = step_norm;
            return {psi, rep};
        }
        trip.clear();
        for (int j = 1; j <= m2; ++j)
            for (int i = 1; i <= m1; ++i) {
                const int r = id(i, j);
                trip.emplace_back(r, r, -2 * c1 - 2 * c2 - rhs_derivative(eq, psi(i, j)));
                if (i > 1) trip.emplace_back(r, id(i - 1, j), c1);
                if (i < m1) trip.emplace_back(r, id(i + 1, j), c1);
                if (j > 1) trip.emplace_back(r, id(i, j - 1), c2);
                if (j < m2) trip.emplace_back(r, id(i, j + 1), c2);
            }
        Eigen::SparseMatrix<double> J(m, m);
        J.setFromTriplets(trip.begin(), trip.end());
        if (!analyzed) {
            lu.analyzePattern(J);
            analyzed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success) throw NumericalError("solve_elliptic: singular Jacobian at iteration " + std::to_string(it));
        Eigen::VectorXd delta = lu.solve(-F);
        if (lu.info() != Eigen::Success || !delta.allFinite())
            throw NumericalError("solve_elliptic: singular Jacobian at iteration " + std::to_string(it));

        double t = opts.damping;
        bool accepted = false;
        ScalarField2D trial = psi;
        for (int halving = 0; halving <= 8; ++halving) {
            for (int j = 1; j <= m2; ++j)
                for (int i = 1; i <= m1; ++i) trial(i, j) = psi(i, j) + t * delta[id(i, j)];
            const double tn = interior_residual(eq, trial, source, Ftrial);
            if (std::isfinite(tn) && tn <= fnorm) {
                psi = trial;
                F = Ftrial;
                fnorm = tn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        step_norm = t * delta.lpNorm<Eigen::Infinity>();
        if (!accepted)
            throw NonConvergence("solve_elliptic: line search failed to reduce the residual", it + 1, fnorm, step_norm);
    }
    if (fnorm < opts.tol) {
        rep.iterations = opts.max_iter;
        rep.residual_norm = fnorm;
        rep.last_step_norm = step_norm;
        return {psi, rep};
    }
    throw NonConvergence("solve_elliptic: Newton did not converge", opts.max_iter, fnorm, step_norm);
}

ScalarField2D solve_goursat(const MixedRhs& rhs, const Grid2& g, const std::vector<double>& row,
                            const std::vector<double>& col, const GoursatOptions& opts) {
    if (static_cast<int>(row.size()) != g.n1 || static_cast<int>(col.size()) != g.n2)
        throw ValidationError("solve_goursat: edge data lengths must be n1 (row) and n2 (column)");
    if (std::abs(row[0] - col[0]) > 1e-12 * (1 + std::abs(row[0])))
        throw ValidationError("solve_goursat: corner values of the edge data disagree");
    for (double v : row)
        if (!std::isfinite(v)) throw ValidationError("solve_goursat: non-finite edge data");
    for (double v : col)
        if (!std::isfinite(v)) throw ValidationError("solve_goursat: non-finite edge data");

    ScalarField2D psi(g);
    for (int i = 0; i < g.n1; ++i) psi(i, 0) = row[i];
    for (int j = 0; j < g.n2; ++j) psi(0, j) = col[j];
    ScalarField2D R(g);
    for (int i = 0; i < g.n1; ++i) R(i, 0) = rhs(psi(i, 0), g.x1(i), g.x2(0));
    for (int j = 1; j < g.n2; ++j) R(0, j) = rhs(psi(0, j), g.x1(0), g.x2(j));

    const double c = 0.25 * g.h1() * g.h2();
    for (int j = 0; j < g.n2 - 1; ++j)
        for (int i = 0; i < g.n1 - 1; ++i) {
            const double x1 = g.x1(i + 1), x2 = g.x2(j + 1);
            const double base = psi(i + 1, j) + psi(i, j + 1) - psi(i, j) + c * (R(i, j) + R(i + 1, j) + R(i, j + 1));
            double v = psi(i + 1, j) + psi(i, j + 1) - psi(i, j);
            bool done = false;
            for (int it = 0; it < opts.max_cell_iter; ++it) {
                const double next = base + c * rhs(v, x1, x2);
                if (!std::isfinite(next)) throw NumericalError("solve_goursat: non-finite value in cell update");
                const double change = std::abs(next - v);
                v = next;
                if (change <= opts.cell_tol * std::max(1.0, std::abs(v))) {
                    done = true;
                    break;
                }
            }
            if (!done)
                throw NonConvergence("solve_goursat: cell fixed point diverged at node (" + std::to_string(i + 1) + ", " +
                                         std::to_string(j + 1) + ")",
                                     opts.max_cell_iter, std::abs(v - base - c * rhs(v, x1, x2)), 0.0);
            psi(i + 1, j + 1) = v;
            R(i + 1, j + 1) = rhs(v, x1, x2);
        }
    return psi;
}

ScalarField2D solve_goursat(const SolitonEquation& eq, const Grid2& g, const std::vector<double>& row,
                            const std::vector<double>& col, const GoursatOptions& opts) {
    eq.validate();
    if (!eq.is_mixed()) throw ValidationError("solve_goursat: equation " + to_string(eq.tag) + " is not in d12 form");
    return solve_goursat([&eq](double p, double, double) { return rhs_value(eq, p); }, g, row, col, opts);
}

namespace {

// eps*d11 + eta*d22 = N(psi, psi_1, psi_2); returns N.
double cauchy_rhs(const SolitonEquation& eq, const Grid2& g, double p, double p1, double p2, int i, int j) {
    if (eq.tag == EqTag::ConstantTauReduced) {
        const double d = eq.tau - p * p;
        if (std::abs(d) < 1e-8) throw DomainError("solve_cauchy: lambda^2 == tau", i, j);
        return -p - 2 * p / d * (g.eps * p1 * p1 + g.eta * p2 * p2);
    }
    return rhs_value(eq, p);
}

}  // namespace

ScalarField2D solve_cauchy(const SolitonEquation& eq, const Grid2& g, const std::vector<double>& psi0,
                           const std::vector<double>& dpsi0, const CauchyOptions& opts) {
    eq.validate();
    if (!(eq.is_laplace_form() || eq.tag == EqTag::ConstantTauReduced))
        throw ValidationError("solve_cauchy: equation " + to_string(eq.tag) + " is not in d0 form");
    if (g.eps * g.eta != -1) throw ValidationError("solve_cauchy: requires eps*eta = -1 (hyperbolic signature)");
    if (g.h2() > g.h1() * (1 + 1e-12)) throw ValidationError("solve_cauchy: CFL condition h2 <= h1 violated");
    if (static_cast<int>(psi0.size()) != g.n1 || static_cast<int>(dpsi0.size()) != g.n1)
        throw ValidationError("solve_cauchy: line data must have n1 values");
    if (opts.source) require_same_grid(g, opts.source->grid, "solve_cauchy source");
    for (int i = 0; i < g.n1; ++i)
        if (!std::isfinite(psi0[i]) || !std::isfinite(dpsi0[i])) throw DomainError("solve_cauchy: non-finite line data", i, 0);

    const bool clamp = eq.tag == EqTag::ConstantTauReduced && eq.tau > 0;
    const double lim = clamp ? std::sqrt(eq.tau) - 1e-8 : 0.0;
    const bool grad_dep = eq.tag == EqTag::ConstantTauReduced;
    const double h2 = g.h2();
    const int n1 = g.n1;

    ScalarField2D psi(g);
    std::vector<double> row(n1), d11(n1), d1(n1);
    auto row_derivs = [&](int j) {
        for (int i = 0; i < n1; ++i) row[i] = psi(i, j);
        ScalarField2D tmp(make_grid({g.x1_min, g.x1_max, 0.0, 1.0}, n1, 3), 0.0);
        for (int i = 0; i < n1; ++i) tmp(i, 0) = row[i];
        const ScalarField2D a = diff(tmp, Deriv::d11), b = diff(tmp, Deriv::d1);
        for (int i = 0; i < n1; ++i) {
            d11[i] = a(i, 0);
            d1[i] = b(i, 0);
        }
    };
    auto src = [&](int i, int j) { return opts.source ? (*opts.source)(i, j) : 0.0; };
    auto post = [&](int j) {
        if (opts.sides) {
            psi(0, j) = (*opts.sides)(g.x1(0), g.x2(j));
            psi(n1 - 1, j) = (*opts.sides)(g.x1(n1 - 1), g.x2(j));
        }
        for (int i = 0; i < n1; ++i) {
            if (!std::isfinite(psi(i, j))) throw NumericalError("solve_cauchy: blow-up at row " + std::to_string(j));
            if (clamp) psi(i, j) = std::clamp(psi(i, j), -lim, lim);
        }
    };

    for (int i = 0; i < n1; ++i) psi(i, 0) = psi0[i];
    post(0);
    if (g.n2 < 2) return psi;

    // Second-order Taylor start.
    row_derivs(0);
    for (int i = 0; i < n1; ++i) {
        const double N = cauchy_rhs(eq, g, psi(i, 0), d1[i], dpsi0[i], i, 0) + src(i, 0);
        const double p22 = (N - g.eps * d11[i]) / g.eta;
        psi(i, 1) = psi(i, 0) + h2 * dpsi0[i] + 0.5 * h2 * h2 * p22;
    }
    post(1);

    for (int j = 1; j < g.n2 - 1; ++j) {
        row_derivs(j);
        for (int i = 0; i < n1; ++i) {
            const double pm = psi(i, j - 1), p0 = psi(i, j);
            double next = 2 * p0 - pm;
            double guess = next + h2 * h2 * (cauchy_rhs(eq, g, p0, d1[i], (p0 - pm) / h2, i, j) + src(i, j) -
                                             g.eps * d11[i]) / g.eta;
            if (grad_dep) {
                bool ok = false;
                for (int it = 0; it < opts.max_node_iter; ++it) {
                    const double p2 = (guess - pm) / (2 * h2);
                    const double upd =
                        next + h2 * h2 * (cauchy_rhs(eq, g, p0, d1[i], p2, i, j) + src(i, j) - g.eps * d11[i]) / g.eta;
                    const double change = std::abs(upd - guess);
                    guess = upd;
                    if (change <= opts.node_tol * std::max(1.0, std::abs(guess))) {
                        ok = true;
                        break;
                    }
                }
                if (!ok)
                    throw NonConvergence("solve_cauchy: node iteration diverged at row " + std::to_string(j + 1),
                                         opts.max_node_iter, 0.0, 0.0);
            }
            psi(i, j + 1) = guess;
        }
        post(j + 1);
    }
    return psi;
}

}  // namespace affsurf
