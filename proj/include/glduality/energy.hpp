#pragma once

#include "glduality/fields.hpp"

#include <cstdint>
#include <vector>

namespace glduality {

/**
 * Geometry of the full model: Omega nested in Omega_1 and the operators
 * that do not depend on the fields (curl on Omega_1, gradient on Omega).
 * Immutable after construction; share it freely between evaluations.
 */
class GLDomain {
public:
    explicit GLDomain(NestedGrid grid);

    const NestedGrid &grid() const { return grid_; }
    const BoxGrid &omega() const { return grid_.inner(); }
    const BoxGrid &outer() const { return grid_.outer(); }
    const RealOperator &curl() const { return curl_; }
    const RealOperator &inner_gradient() const { return inner_gradient_; }

    /// Components of A on the Omega nodes.
    Components potential_on_omega(const RealVectorField &A) const;

private:
    NestedGrid grid_;
    RealOperator curl_;
    RealOperator inner_gradient_;
};

struct GLEnergyTerms {
    double kinetic = 0.0;       // (gamma/2) int |grad phi - i rho A phi|^2
    double condensation = 0.0;  // (alpha/2) int (|phi|^2 - beta)^2
    double magnetic = 0.0;      // K0 ||curl A - B0||^2 on Omega_1
    double total() const { return kinetic + condensation + magnetic; }
};

GLEnergyTerms gl_energy_terms(const GLDomain &domain, const ComplexScalarField &phi, const RealVectorField &A,
                              const RealVectorField &B0, const GLParams &params);
double gl_energy(const GLDomain &domain, const ComplexScalarField &phi, const RealVectorField &A,
                 const RealVectorField &B0, const GLParams &params);

/// gamma Cov(A) phi + 2 alpha (|phi|^2 - beta) phi: the phi-gradient of gl_energy per unit cell weight.
ComplexScalarField gl_residual_phi(const GLDomain &domain, const ComplexScalarField &phi, const RealVectorField &A,
                                   const GLParams &params);

/// The A-gradient of gl_energy per unit cell weight, on Omega_1.
RealVectorField gl_residual_A(const GLDomain &domain, const ComplexScalarField &phi, const RealVectorField &A,
                              const RealVectorField &B0, const GLParams &params);

/**
 * Supercurrent -2 Re[i rho gamma conj(phi) grad phi] - rho^2 gamma |phi|^2 A
 * on Omega (central differences, one-sided on its faces), extended by zero to Omega_1.
 */
RealVectorField compute_supercurrent(const GLDomain &domain, const ComplexScalarField &phi, const RealVectorField &A,
                                     const GLParams &params);

/// Covariant square with the potential restricted to Omega.
ComplexOperator covariant_square(const GLDomain &domain, const RealVectorField &A, double rho);

// Scalar model on a homogeneous Dirichlet grid (the grid holds the unknowns).

double scalar_energy(const RealScalarField &u, const RealScalarField &f, const GLParams &params);
RealScalarField scalar_residual(const RealScalarField &u, const RealScalarField &f, const GLParams &params);
/// -gamma Lap + diag(6 alpha u^2 - 2 alpha beta), symmetric.
RealOperator scalar_second_variation(const RealScalarField &u, const GLParams &params);

struct ScalarSolveResult {
    RealScalarField u;
    double energy = 0.0;
    double residual = 0.0;  // sup norm of scalar_residual
    int iterations = 0;
    bool converged = false;
};

/// Damped Newton descent from `start`; the Hessian is shifted when not positive definite
/// so every accepted step decreases the energy.
ScalarSolveResult minimize_scalar(const RealScalarField &start, const RealScalarField &f, const GLParams &params,
                                  double tol = 1e-11, int max_iter = 200);

/// Runs minimize_scalar from `starts` random fields (fixed seed) plus the constants
/// +-sqrt(beta) and 0, returning every converged run sorted by energy.
std::vector<ScalarSolveResult> multistart_scalar(const RealScalarField &f, const GLParams &params, int starts,
                                                 std::uint64_t seed);

} // namespace glduality
