#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "affsurf/grid_fields.hpp"

namespace affsurf {

enum class EqTag {
    SinhGordon,          // d0 psi + sinh psi
    LinearDegenerate,    // d0 psi + psi
    SineGordon,          // d0 psi - sin psi
    CoshGordonMixed,     // d12 psi - cosh psi
    Tzitzeica,           // d0 psi - e^{2psi} - eps_t e^{-psi}
    SphereLambda,        // d0 u - e^{-2u}(H + 2e^{6u})
    SphereLambda1,       // d0 u - e^{-2u}(alpha H + 2e^{6u})
    LiouvilleMixed,      // d12 u - H e^{-u}
    GaussSystem,         // eigenvalue pair (lambda, mu)
    ConstantTauReduced,  // lambda with lambda*mu = tau
    ComplexGaussSystem,  // pair (a, b)
    PhiEquation,         // angle phi of the complex case
};

struct SolitonEquation {
    EqTag tag = EqTag::SineGordon;
    double H = 0;
    double tau = 0;
    int alpha = 1;  // sign
    int eps_t = 0;  // sign or 0

    static SolitonEquation sinh_gordon() { return {EqTag::SinhGordon}; }
    static SolitonEquation linear() { return {EqTag::LinearDegenerate}; }
    static SolitonEquation sine_gordon() { return {EqTag::SineGordon}; }
    static SolitonEquation cosh_gordon() { return {EqTag::CoshGordonMixed}; }
    static SolitonEquation tzitzeica(int eps_t) { return {EqTag::Tzitzeica, 0, 0, 1, eps_t}; }
    static SolitonEquation sphere_lambda(double H) { return {EqTag::SphereLambda, H}; }
    static SolitonEquation sphere_lambda1(double H, int alpha) { return {EqTag::SphereLambda1, H, 0, alpha}; }
    static SolitonEquation liouville(double H) { return {EqTag::LiouvilleMixed, H}; }
    static SolitonEquation gauss_system(int alpha_g) { return {EqTag::GaussSystem, 0, 0, alpha_g}; }
    static SolitonEquation constant_tau(double tau) { return {EqTag::ConstantTauReduced, 0, tau}; }
    static SolitonEquation complex_gauss() { return {EqTag::ComplexGaussSystem}; }
    static SolitonEquation phi_equation() { return {EqTag::PhiEquation}; }

    int arity() const;
    bool is_mixed() const;       // d1 d2 form
    bool is_laplace_form() const;  // d0 psi = N(psi) with pointwise N
    void validate() const;
};

// CLI tag <-> equation (parameters filled by the caller).
EqTag eq_tag_from_string(const std::string& s);
std::string to_string(EqTag t);

// LHS - RHS, discretized with diff(); one field per scalar identity.
std::vector<ScalarField2D> residual(const SolitonEquation& eq, const std::vector<ScalarField2D>& fields);
ScalarField2D residual(const SolitonEquation& eq, const ScalarField2D& field);

// Pointwise nonlinearity N of the Laplace-form equations (d0 psi = N) and of the mixed
// ones (d12 psi = N), with its derivative.
double rhs_value(const SolitonEquation& eq, double psi);
double rhs_derivative(const SolitonEquation& eq, double psi);

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 50;
    double damping = 1.0;
};

struct SolveReport {
    int iterations = 0;
    double residual_norm = 0;
    double last_step_norm = 0;
};

struct SolveResult {
    ScalarField2D psi;
    SolveReport report;
};

// Damped Newton on the 5-point discretization. Dirichlet data are the edge values of
// `boundary`; `init` must agree with them. `source` (optional) is added to the right-hand
// side: d0 psi - N(psi) = source.
SolveResult solve_elliptic(const SolitonEquation& eq, const ScalarField2D& boundary, const ScalarField2D& init,
                           const NewtonOptions& opts = {}, const ScalarField2D* source = nullptr);

// Copies the four edges of `boundary` into `field`.
ScalarField2D with_edges(const ScalarField2D& field, const ScalarField2D& boundary);

using MixedRhs = std::function<double(double psi, double x1, double x2)>;

struct GoursatOptions {
    double cell_tol = 1e-13;
    int max_cell_iter = 50;
};

// Characteristic marching for d12 psi = R. Edge data: row on x2 = x2_min (length n1) and
// column on x1 = x1_min (length n2); corners must agree.
ScalarField2D solve_goursat(const SolitonEquation& eq, const Grid2& grid, const std::vector<double>& row_x2min,
                            const std::vector<double>& col_x1min, const GoursatOptions& opts = {});
ScalarField2D solve_goursat(const MixedRhs& rhs, const Grid2& grid, const std::vector<double>& row_x2min,
                            const std::vector<double>& col_x1min, const GoursatOptions& opts = {});

using EdgeValues = std::function<double(double x1, double x2)>;

struct CauchyOptions {
    // Dirichlet values on x1 = x1_min and x1 = x1_max; without them the side nodes use
    // one-sided second differences.
    std::optional<EdgeValues> sides;
    const ScalarField2D* source = nullptr;  // d0 psi - N(psi) = source
    int max_node_iter = 50;
    double node_tol = 1e-14;
};

// Leapfrog marching in x2 for d0-form equations with eps*eta = -1.
ScalarField2D solve_cauchy(const SolitonEquation& eq, const Grid2& grid, const std::vector<double>& psi0,
                           const std::vector<double>& dpsi2_0, const CauchyOptions& opts = {});

}  // namespace affsurf
