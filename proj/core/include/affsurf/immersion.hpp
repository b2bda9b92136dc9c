#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "affsurf/blaschke.hpp"
#include "affsurf/grid_fields.hpp"

namespace affsurf {

// Position, tangent frame and affine normal at the origin node (x1_min, x2_min).
struct SeedFrame {
    Vec3 f0{0, 0, 0};
    Vec3 F1_0{1, 0, 0};
    Vec3 F2_0{0, 1, 0};
    Vec3 xi0{0, 0, 1};
    int orientation = 0;  // +-1 demands that sign of det(F1, F2, xi); 0 accepts either
};

struct ImmersionSheet {
    Grid2 grid;
    Vec3Field2D f, F1, F2, xi;

    explicit ImmersionSheet(const Grid2& g = Grid2{}) : grid(g), f(g), F1(g), F2(g), xi(g) {}
};

SeedFrame seed_from_sheet(const ImmersionSheet& sheet, int i = 0, int j = 0);

struct IntegrateResult {
    ImmersionSheet sheet;
    double path_residual = 0;  // max |row-first - column-first| over nodes and all 12 state components
};

// Gauss-Weingarten integration: bottom row first, then every column, RK4 with
// cubic interpolation of the coefficients at half steps.
IntegrateResult integrate(const BlaschkeStructure& s, const SeedFrame& seed, double seed_tol = 1e-8);

struct GWResidual {
    double frame = 0;     // d_i F_j - Gamma^k_ij F_k - h_ij xi
    double normal = 0;    // d_i xi + S^k_i F_k
    double position = 0;  // d_i f - F_i
};

GWResidual gw_residual(const ImmersionSheet& sheet, const BlaschkeStructure& s);

struct InducedStructure {
    BlaschkeStructure structure;
    Vec3Field2D affine_normal;
};

// Blaschke normalization of the sheet's tangent data: h = G/|det G|^{1/4},
// xi = (1/2) trace_h of the Hessian, then nabla and S by projection onto (F1, F2, xi).
InducedStructure induce(const ImmersionSheet& sheet);

using ScalarFn = std::function<double(double)>;

struct CurveSolution {
    std::vector<double> t;
    std::vector<Vec3> xi, xi1, xi2;  // xi, xi', xi''
    std::vector<double> a, b;
    double wronskian_drift = 0;      // max |det(xi, xi', xi'') - H| over every step
};

// xi''' = a xi' + b xi from t0 with (xi, xi', xi'')(t0) = basis_init rescaled to Wronskian H.
// Output is sampled at t0 + k*dt, k = 0..n-1; internal steps never exceed max_step.
CurveSolution solve_curve(const ScalarFn& a_fn, const ScalarFn& b_fn, double H, double t0, double dt, int n,
                          const std::array<Vec3, 3>& basis_init, double max_step = 1e-3);

// Reparametrization of the first coordinate: x1 = x1(z1, z2), x2 = z2.
struct ChartMap {
    std::function<double(double, double)> x1;
    std::function<std::array<double, 2>(double, double)> grad;  // (dx1/dz1, dx1/dz2)
};

struct LiouvilleOptions {
    std::optional<ChartMap> chart;
    ScalarFn a_prime;  // when set, a' - 2b = 2H is required on the x2 range
    double constraint_tol = 1e-10;
    double max_step = 1e-3;
};

// f = x1 xi(x2) - xi'(x2)/H with analytic F1 = xi, F2 = x1 xi' - xi''/H and affine normal -H f.
ImmersionSheet liouville_build(const ScalarFn& a_fn, const ScalarFn& b_fn, double H, const Grid2& grid,
                               const std::array<Vec3, 3>& basis_init, const LiouvilleOptions& opts = {});

// max |K| of the induced structure over interior nodes; vanishes exactly on quadrics.
double quadric_defect(const ImmersionSheet& sheet);

enum class CatalogueKind { DefiniteConstFp, IndefiniteConstFp, ImproperGraph, OrbitHyperbolic, OrbitElliptic };

std::string to_string(CatalogueKind k);
CatalogueKind catalogue_kind_from_string(const std::string& s);

struct CatalogueParams {
    double lambda = 1;
    int sign = 1;
    // improper graph z = x y + phi(y): phi and its first two derivatives
    ScalarFn phi, phi1, phi2;
};

// c with h(C,C) = 16 lambda^2.
double catalogue_c(double lambda);

ImmersionSheet catalogue(CatalogueKind kind, const CatalogueParams& params, const Grid2& grid);

enum class GroupKind { AO2, AO11 };

struct GroupElement {
    GroupKind kind = GroupKind::AO2;
    double angle = 0;
    int eps = 1;
    double a = 0, b = 0;

    std::array<std::array<double, 3>, 3> matrix() const;
    std::array<double, 2> apply(double x1, double x2) const;
};

// u o g by bilinear resampling on the same grid.
ScalarField2D group_apply(const ScalarField2D& u, const GroupElement& g);
// Domain reparametrization f o g with chain-rule tangents; xi resampled.
ImmersionSheet group_apply(const ImmersionSheet& sheet, const GroupElement& g);

}  // namespace affsurf
