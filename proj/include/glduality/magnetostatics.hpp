#pragma once

#include "glduality/energy.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <array>

namespace glduality {

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;  // relative residual reported by the Krylov solver
    bool converged = false;
};

/**
 * -Lap u = s on the interior nodes of a box with u = 0 on its faces.
 * Factors nothing; the 7-point operator is assembled once and reused.
 */
class DirichletPoisson {
public:
    explicit DirichletPoisson(const BoxGrid &grid, double tol = 1e-13);

    /// `rhs` holds one value per node of the full grid; face values are ignored
    /// and the result vanishes on the faces.
    VectorXd solve(const VectorXd &rhs, SolveStats *stats = nullptr) const;
    const BoxGrid &grid() const { return grid_; }

private:
    BoxGrid grid_;
    std::vector<int> interior_;
    SparseReal lap_;
    double tol_;
};

/**
 * Discrete Leray projection onto fields with zero normal trace and zero
 * central-difference divergence at every interior node.
 *
 * Normal components are zeroed on the faces; then psi solves
 * sum_k D_k D_k psi = div A on the interior nodes (D_k central differences
 * with psi extended by zero) and grad psi is removed from the interior
 * values. Since the D_k commute, the interior curl is untouched.
 */
class LerayProjector {
public:
    explicit LerayProjector(const BoxGrid &grid, double tol = 1e-14);

    RealVectorField project(const RealVectorField &A, SolveStats *stats = nullptr) const;
    const BoxGrid &grid() const { return grid_; }

private:
    BoxGrid grid_;
    std::vector<int> interior_;
    std::array<SparseReal, 3> D_;
    SparseReal neg_div_grad_;
    VectorXd null_;  // kernel of the D_k when every interior extent is odd, else empty
    double tol_;
};

RealVectorField leray_project(const RealVectorField &A);

/// Largest |div A| over interior nodes (central differences).
double interior_div_sup(const RealVectorField &A);
/// Largest |A.n| over the faces of the box.
double normal_trace_sup(const RealVectorField &A);
/// Largest |curl A - curl B| over interior nodes.
double interior_curl_change(const RealVectorField &A, const RealVectorField &B);

struct VectorPotentialResult {
    RealVectorField A;
    std::array<SolveStats, 3> poisson;
    SolveStats projection;
    double div_sup = 0.0;
};

/**
 * A-update of the outer iteration: -Lap A_k = (curl B0)_k + J_k / K0 on Omega_1,
 * A = 0 on its faces, followed by the Leray projection. J is the supercurrent
 * of phi with its A-dependence taken from `A_prev`.
 */
class Magnetostatics {
public:
    Magnetostatics(const GLDomain &domain, const GLParams &params);

    VectorPotentialResult solve(const ComplexScalarField &phi, const RealVectorField &A_prev,
                                const RealVectorField &B0) const;
    /// Same solve with an explicit source in place of curl B0 + J / K0.
    VectorPotentialResult solve_source(const RealVectorField &source) const;

private:
    GLDomain domain_;
    GLParams params_;
    DirichletPoisson poisson_;
    LerayProjector projector_;
};

RealVectorField solve_vector_potential(const GLDomain &domain, const ComplexScalarField &phi,
                                       const RealVectorField &A_prev, const RealVectorField &B0,
                                       const GLParams &params);

} // namespace glduality
