#pragma once

#include <optional>
#include <string>

#include "affsurf/grid_fields.hpp"

namespace affsurf {

enum class EigenCaseTag { PositiveTau, ZeroTau, NegativeTau };

struct EigenCase {
    EigenCaseTag tag = EigenCaseTag::PositiveTau;
    double tau = 1;

    static EigenCase from_tau(double tau);
    void validate() const;
};

enum class Direction { Forward, Inverse };

// Forward: eigenvalue lambda -> soliton unknown psi; inverse: psi -> lambda.
ScalarField2D lambda_psi(const EigenCase& c, Direction dir, const ScalarField2D& field);

// Second eigenvalue: mu = tau / lambda (tau != 0), mu = 0 for tau = 0.
ScalarField2D companion_mu(const EigenCase& c, const ScalarField2D& lambda);

enum class SignatureKind { Definite, Indefinite };

struct RescaleResult {
    ScalarField2D field;
    int eps_t = 0;        // sign of the target Tzitzeica equation
    double a = 1, b = 1;  // dilation and shift constants
    // residual(target)(output) = factor * residual(source)(input) node by node.
    double residual_factor = 1;
};

// Forward: u (sphere equation) -> psi on the grid dilated by a, psi = 2u(x/a) - ln b
// (psi = 2u(x/2) for H = 0). Inverse undoes it, returning u on the contracted grid.
RescaleResult tzitzeica_rescale(const ScalarField2D& field, double H, Direction dir,
                                SignatureKind kind = SignatureKind::Definite, int alpha = 1);

struct AnglePair {
    ScalarField2D phi;
    ScalarField2D psi;
};

// a = sqrt(tau) cos(phi), b = sqrt(tau) sin(phi) with phi in (0, pi) unwrapped along rows;
// psi = ln tan(phi/2), which turns the phi equation into d12 psi = cosh psi.
AnglePair complex_angle_maps(const ScalarField2D& a, const ScalarField2D& b, double tau);
ScalarField2D phi_from_psi(const ScalarField2D& psi);

struct FrameAngles {
    ScalarField2D lambda;
    ScalarField2D psi;
    ScalarField2D phi;
    ScalarField2D sign;  // +-1 per node; indefinite orientation of E1, all +1 when definite
};

struct CanonicalFrame {
    FrameAngles angles;
    int eps = 1;                         // case sign; 0 marks the null case a = +-b
    std::optional<ScalarField2D> null_a;  // the stored a of the null case
};

CanonicalFrame canonical_frame(SignatureKind kind, const ScalarField2D& a, const ScalarField2D& b);

// Continuous unwrap of an angle field: first along the bottom row from the origin node,
// then up every column.
ScalarField2D unwrap_angle(const ScalarField2D& angle, double period = 2 * 3.14159265358979323846);

std::string to_string(EigenCaseTag t);

}  // namespace affsurf
