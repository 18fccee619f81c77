#pragma once

#include "glduality/energy.hpp"

#include <memory>
#include <vector>

namespace glduality {

/// Snapshot the phi-equation is linearised about.
struct FrozenCoefficients {
    ComplexScalarField phi_hat;  // on Omega
    RealVectorField A0;          // on Omega_1
};

/// Diagonals of the ghost-line maps phi_0 = H1 phi_1 and phi_N = H2 phi_{N-1}.
struct BoundaryMatrices {
    VectorXcd H1;
    VectorXcd H2;
};

/**
 * First-order covariant Neumann ghosts on the two end planes of the line axis:
 * H = I + i rho d diag(A.n) with n the outward normal and A taken on the end plane.
 */
BoundaryMatrices boundary_matrices(const GLDomain &domain, const RealVectorField &A, const GLParams &params);

/// Per-line coefficients of the forward recursion. All a_n, b_n are diagonal.
struct LineRecursion {
    std::vector<VectorXcd> a;  // a[n-1] is a_n, n = 1..N-1
    std::vector<VectorXcd> b;
    double kappa = 0.0;        // K d^2 / gamma
    double spacing = 0.0;
    double max_abs_a = 0.0;    // sup |a_n| over all lines and nodes

    int lines() const { return static_cast<int>(a.size()); }
};

/// a_1 = (2 + kappa - H1)^-1, b_1 = a_1, a_n = (2 - a_{n-1} + kappa)^-1, b_n = a_n (b_{n-1} + 1).
/// Throws with the line index when a resolvent is singular.
LineRecursion forward_sweep(const VectorXcd &H1, double kappa, int lines, double spacing = 1.0);

/// E_1 = 0, E_n = a_n b_{n-1} (tau_{n-1} - tau_n) + a_n E_{n-1}, tau_n = T_n d^2 / gamma.
std::vector<VectorXcd> affine_terms(const LineRecursion &rec, const std::vector<VectorXcd> &tau);

struct MolStats {
    int sweeps = 0;
    double relative_residual = 0.0;  // of the fixed-point equation phi = sweep(phi)
    double line_residual = 0.0;      // sup over lines of line_residuals
    bool converged = false;
};

/**
 * Generalised method of lines for the phi-equation linearised about a frozen
 * snapshot, with lines normal to params.line_axis.
 *
 * Line n solves
 *   phi_{n+1} - 2 phi_n + phi_{n-1} - kappa phi_n + T_n(phi_n) d^2 / gamma = 0,
 * with ghosts from boundary_matrices, kappa = K d^2 / gamma and K the line shift.
 * T_n holds the cross-section part of the covariant square and the frozen
 * nonlinearity implicitly; every other term of the energy gradient sits in the
 * affine part evaluated at the snapshot, so the fixed point of the outer loop is
 * an exact critical point of the discrete energy.
 *
 * A sweep evaluates the T's inside E_n at a guess. Sweeping is affine in the
 * guess; restarted GMRES on its fixed-point equation yields the exact solution
 * of all line equations.
 */
class MethodOfLines {
public:
    MethodOfLines(const GLDomain &domain, const FrozenCoefficients &frozen, const GLParams &params);
    ~MethodOfLines();
    MethodOfLines(const MethodOfLines &) = delete;
    MethodOfLines &operator=(const MethodOfLines &) = delete;

    int lines() const { return static_cast<int>(line_nodes_.size()); }
    int section_size() const { return section_size_; }
    const LineRecursion &recursion() const { return rec_; }
    const BoundaryMatrices &boundary() const { return bnd_; }

    /// T_n(phi_n) for n = 1..N-1.
    VectorXcd assemble_T(int n, const VectorXcd &phi_n) const;

    VectorXcd line_values(const ComplexScalarField &phi, int n) const;

    /// Solves (I - a_{N-1} H2 - b_{N-1} lin T_{N-1}) phi = b_{N-1} aff T_{N-1} + E_{N-1}.
    VectorXcd terminal_solve(const std::vector<VectorXcd> &E) const;
    /// Lines N-2..1 from the terminal line; returns the assembled field.
    ComplexScalarField backward_substitution(const VectorXcd &terminal, const std::vector<VectorXcd> &E) const;

    /// One forward/terminal/backward pass with E_n built from `guess`.
    ComplexScalarField sweep(const ComplexScalarField &guess) const;

    /// GMRES-accelerated sweeps from the snapshot.
    ComplexScalarField solve(MolStats *stats = nullptr) const;

    /// Sup norm of the line equation on each line, ghosts included.
    std::vector<double> line_residuals(const ComplexScalarField &phi) const;

private:
    struct LineSystem;

    const GLDomain &domain_;
    GLParams params_;
    int axis_ = 0;
    int section_size_ = 0;
    double d_ = 0.0;
    double shift_ = 0.0;
    std::vector<std::vector<int>> line_nodes_;  // Omega index of (line, section node)
    BoundaryMatrices bnd_;
    LineRecursion rec_;
    std::vector<SparseComplex> lin_;  // tau_n = lin_n phi_n + aff_n
    std::vector<VectorXcd> aff_;
    std::vector<std::unique_ptr<LineSystem>> systems_;  // lines 1..N-2, then the terminal system
    ComplexScalarField phi_hat_;
};

/// Restarted GMRES for (I - M) x = c given x -> M x + c; returns the final relative residual.
struct GmresResult {
    int iterations = 0;
    double relative_residual = 0.0;
};
template <typename Affine>
GmresResult fixed_point_gmres(Affine &&map, VectorXcd &x, double tol, int max_iter, int restart = 60);

} // namespace glduality

#include "glduality/detail/gmres.hpp"
