#pragma once

#include <array>
#include <map>
#include <string>

#include "affsurf/grid_fields.hpp"
#include "affsurf/variable_maps.hpp"

namespace affsurf {

// Coordinate indices are 0-based throughout: index 0 is x1, index 1 is x2.

struct MetricField {
    ScalarField2D h11, h12, h22;

    const Grid2& grid() const { return h11.grid; }
    // h_ij at flat node k
    double at(int i, int j, std::size_t k) const {
        return i != j ? h12[k] : (i == 0 ? h11[k] : h22[k]);
    }
    void validate() const;  // nondegeneracy |det| >= 1e-12
};

// Symmetric (i,j) tensors with one upper index: Christoffels of a connection or the
// difference tensor. Slot layout: Gamma^0_00, Gamma^0_01, Gamma^0_11, Gamma^1_00, Gamma^1_01, Gamma^1_11.
struct SymTensorField {
    std::array<ScalarField2D, 6> c;

    static int slot(int k, int i, int j) { return 3 * k + i + j; }
    ScalarField2D& operator()(int k, int i, int j) { return c[slot(k, i, j)]; }
    const ScalarField2D& operator()(int k, int i, int j) const { return c[slot(k, i, j)]; }
    double at(int k, int i, int j, std::size_t n) const { return c[slot(k, i, j)][n]; }

    static SymTensorField zeros(const Grid2& g);
};

using ConnectionField = SymTensorField;
using DifferenceField = SymTensorField;

// S d_j = S^i_j d_i; slot 2*i + j.
struct ShapeField {
    std::array<ScalarField2D, 4> S;
    ScalarField2D H, tau;

    ScalarField2D& operator()(int i, int j) { return S[2 * i + j]; }
    const ScalarField2D& operator()(int i, int j) const { return S[2 * i + j]; }
    double at(int i, int j, std::size_t n) const { return S[2 * i + j][n]; }

    static ShapeField from_components(ScalarField2D s00, ScalarField2D s01, ScalarField2D s10, ScalarField2D s11);
    static ShapeField scalar(const Grid2& g, double H);
};

enum class StructureCase { Eigen, Complex, SphereDefinite, SphereIndefinite, Liouville, Family, Induced, Custom };

std::string to_string(StructureCase c);
StructureCase structure_case_from_string(const std::string& s);

struct BlaschkeStructure {
    MetricField metric;
    ConnectionField nabla;
    ConnectionField nabla_hat;
    DifferenceField K;
    ShapeField shape;
    StructureCase case_tag = StructureCase::Custom;
    std::map<std::string, double> params;

    const Grid2& grid() const { return metric.grid(); }
    void validate() const;  // grids, finiteness, nabla = nabla_hat + K
};

// Christoffels of h. Semi-isothermal metrics (h12 = 0, |h11| = |h22|) and null metrics
// (h11 = h22 = 0) take the closed-form path through u = -ln|conformal factor|/2.
ConnectionField levi_civita(const MetricField& metric);
ConnectionField levi_civita_general(const MetricField& metric);
// Closed-form Christoffels of e^{-2u}(eps dx1^2 + eta dx2^2) from the derivatives of u.
ConnectionField semi_isothermal_christoffels(const ScalarField2D& u1, const ScalarField2D& u2, int eps, int eta);

// Assembles nabla = nabla_hat + K and recomputes H, tau from S.
BlaschkeStructure make_structure(const MetricField& metric, const ConnectionField& nabla_hat, const DifferenceField& K,
                                 const ShapeField& shape, StructureCase tag);

BlaschkeStructure build_eigen(const ScalarField2D& lambda, const ScalarField2D& mu);
BlaschkeStructure build_complex(const ScalarField2D& a, const ScalarField2D& b);
BlaschkeStructure build_sphere_definite(const ScalarField2D& u, double H);
BlaschkeStructure build_sphere_indefinite(const ScalarField2D& u, double H, int alpha);
BlaschkeStructure build_liouville(const ScalarField2D& u, double H);
// Rotated difference tensors. `sigma` is the sign of the indefinite metric (ignored when definite).
BlaschkeStructure build_family(const ScalarField2D& u, double angle, int eps, SignatureKind kind, double H,
                               int sigma = 1);

struct CubicInvariants {
    std::array<ScalarField2D, 8> C;  // C_ijk at slot 4i + 2j + k
    ScalarField2D J;
    ScalarField2D hCC;
};

// C = nabla h with differenced h, then the triple contraction.
CubicInvariants cubic_invariants(const BlaschkeStructure& s);
// Same invariants from K alone: C_ijk = -(K_ijk + K_ikj) since nabla_hat h = 0.
CubicInvariants cubic_invariants_algebraic(const BlaschkeStructure& s);

// Gauss curvature of h. Conformal charts use e^{2u} d0 u, others the Brioschi formula.
ScalarField2D gauss_curvature(const MetricField& metric);
ScalarField2D gauss_curvature_brioschi(const MetricField& metric);
// h(R(d1,d2)d2, d1) / det h for the given connection.
ScalarField2D gauss_curvature_connection(const MetricField& metric, const ConnectionField& conn);

// K_h - H - J with J from the algebraic cubic form.
ScalarField2D egregium_defect(const BlaschkeStructure& s);

struct ResidualReport {
    double gauss = 0, codazzi_C = 0, codazzi_S = 0, ricci = 0, r1_symmetry = 0, apolarity = 0, proj_flat = 0,
           egregium = 0, gamma_sym = 0;

    double max() const;
    std::map<std::string, double> entries() const;
};

// Max norms over nodes at least kVerifyMargin away from the edge.
inline constexpr int kVerifyMargin = 2;
ResidualReport verify(const BlaschkeStructure& s);

// max | [K_1, K_2] d_k + J (h_2k d_1 - h_1k d_2) | in the norm of |h|.
double commutator_identity(const BlaschkeStructure& s);

// Connection form of the conformal frame E_i = e^u d_i: omega(E_k) = e^u Gamma_hat^0_{k1}.
struct FrameForm {
    ScalarField2D omega_E1, omega_E2;
};
FrameForm conformal_frame_form(const MetricField& metric, const ConnectionField& nabla_hat);

}  // namespace affsurf
