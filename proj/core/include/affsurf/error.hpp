#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace affsurf {

// Bad input: malformed parameters, domain violations, mismatched grids.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A pointwise precondition failed at a specific grid node.
class DomainError : public ValidationError {
public:
    DomainError(const std::string& what, int i, int j)
        : ValidationError(what + " at node (" + std::to_string(i) + ", " + std::to_string(j) + ")"),
          i_(i), j_(j) {}
    int i() const { return i_; }
    int j() const { return j_; }

private:
    int i_, j_;
};

// Numerical failure: divergence, singular systems, blow-up.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergence : public NumericalError {
public:
    NonConvergence(const std::string& what, int iterations, double residual_norm, double step_norm)
        : NumericalError(what + " (iterations " + std::to_string(iterations) + ", residual " +
                         std::to_string(residual_norm) + ", last step " + std::to_string(step_norm) + ")"),
          iterations_(iterations), residual_norm_(residual_norm), step_norm_(step_norm) {}
    int iterations() const { return iterations_; }
    double residual_norm() const { return residual_norm_; }
    double step_norm() const { return step_norm_; }

private:
    int iterations_;
    double residual_norm_, step_norm_;
};

}  // namespace affsurf
