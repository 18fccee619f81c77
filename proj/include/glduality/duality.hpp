#pragma once

#include "glduality/energy.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace glduality {

/// A certificate precondition does not hold (the point is not critical, bad shapes).
struct CertificateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Smallest power of two K with 1/alpha > 8 K2^2 / K and 1/alpha > 32 K2^2 / K^3.
double select_K(double alpha, double K2);
/// 1.5 * max(sup |phi|, sqrt(beta)).
double amplitude_bound(double sup_phi, double beta);

struct DualCertificate {
    VectorXcd v1;  // real in the scalar model
    VectorXd v0;
    double K = 0.0;
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;                      // |primal - dual|
    double primal_residual = 0.0;          // sup of the Euler-Lagrange residual at the point
    double stationarity_v1 = 0.0;          // sup of the central-difference gradient of J* in v1, per unit weight
    double stationarity_v0 = 0.0;
    double multiplier_agreement = 0.0;     // scalar: sup |(gamma L + K) u0 - ((K - 2 v0) u0 + f)|
    bool e_box = false;                    // K - 2 v0 > K / 2 at every node
    bool a_plus = true;                    // scalar: u0 f >= 0 at every node
    bool b_plus = false;                   // second variation positive semi-definite (tol 1e-9)
    bool dual_bound = false;               // 1/alpha > 8 K2^2 / K
    bool amplitude_ok = true;              // sup |phi0| <= K2
    double min_second_variation = 0.0;     // GL: modulo the global phase direction
    std::optional<double> min_dual_hessian;  // GL: dense check on small grids, modulo phase
    std::optional<double> min_dual_hessian_full;
};

// Scalar model. The grid holds the unknowns of a homogeneous Dirichlet problem.

/// (w/2) v1^T (gamma L + K)^-1 v1.
double scalar_F_star(const RealScalarField &v1, const GLParams &params);
/// -(w/2) sum (v1 - f)^2 / (2 v0 - K) - (w / 2 alpha) sum v0^2 - beta w sum v0; throws std::domain_error
/// naming the node when K - 2 v0 <= 0.
double scalar_G_star(const RealScalarField &v1, const RealScalarField &v0, const RealScalarField &f,
                     const GLParams &params);
/// -F* + G*.
double scalar_dual(const RealScalarField &v1, const RealScalarField &v0, const RealScalarField &f,
                   const GLParams &params);

/// Builds v0 = alpha (u0^2 - beta) and v1 = (gamma L + K) u0 and evaluates the certificate.
/// Throws CertificateError when the residual at u0 exceeds `residual_tol`.
DualCertificate certify_scalar(const RealScalarField &u0, const RealScalarField &f, const GLParams &params,
                               double residual_tol = 1e-9);

/// u where u f >= 0 and -u where u f < 0.
RealScalarField sign_align(const RealScalarField &u, const RealScalarField &f);

/// Diagnostic form of the second-variation test: pointwise sqrt(6 alpha)|u| against
/// the operator root sqrt(max(0, 2 alpha beta - gamma lambda_min(L))).
struct ScalarHDiagnostic {
    VectorXd pointwise;
    double operator_root = 0.0;
    bool surrogate_positive = false;  // min pointwise >= operator_root
    double min_eigenvalue = 0.0;      // of scalar_second_variation, the authoritative test
    bool b_plus = false;
};
ScalarHDiagnostic scalar_H(const RealScalarField &u, const GLParams &params);

/// Smallest eigenvalue of a symmetric sparse operator (dense below 2000 unknowns,
/// otherwise shifted LDLT inertia bisection to 1e-10).
double min_eigenvalue(const SparseReal &op);

// Full model.

/// (w/2) Re <(gamma Cov(A) + K)^-1 v1, v1>.
double gl_F_star(const GLDomain &domain, const ComplexScalarField &v1, const RealVectorField &A,
                 const GLParams &params);
/// -F*(v1, A) - (w/2) sum |v1|^2 / (2 v0 - K) - (w / 2 alpha) sum v0^2 - beta w sum v0 + magnetic term.
double gl_dual(const GLDomain &domain, const ComplexScalarField &v1, const RealScalarField &v0,
               const RealVectorField &A, const RealVectorField &B0, const GLParams &params);

struct GLCertifyOptions {
    double residual_tol = 1e-6;   // on sup |gl_residual_phi|
    int dense_limit = 343;        // Omega nodes up to which the Hessians are checked densely
    int fd_directions = 24;       // random directions when coordinates are too many
    std::uint64_t seed = 1;
};

/**
 * Certificate at (phi0, A0): v0 = alpha(|phi0|^2 - beta), v1 = (2 v0 - K) phi0.
 * Only criticality in phi at the fixed A0 is required for the zero gap.
 */
DualCertificate certify_gl(const GLDomain &domain, const ComplexScalarField &phi0, const RealVectorField &A0,
                           const RealVectorField &B0, const GLParams &params, const GLCertifyOptions &options = {});

/// Hessian of the discrete energy in (Re phi, Im phi) at fixed A, per unit weight.
Eigen::MatrixXd gl_second_variation_dense(const GLDomain &domain, const ComplexScalarField &phi,
                                          const RealVectorField &A, const GLParams &params);

struct GLMultistartResult {
    std::vector<double> energies;  // one per converged start, ascending
    ComplexScalarField best;
};
/// Descent of gl_energy in phi at fixed A (L-BFGS, then shifted Newton to a residual of 1e-9)
/// from sqrt(beta), 0.5 sqrt(beta) and `starts` random fields.
GLMultistartResult gl_multistart(const GLDomain &domain, const RealVectorField &A, const RealVectorField &B0,
                                 const GLParams &params, int starts, std::uint64_t seed);

// Difference-of-convex layer for the scalar model:
//   J(u) = G_K(u) - F_K(u) - <u, f>,
//   G_K(u) = (alpha/2) w sum (u^2 - beta)^2 + (K_G/2) w |u|^2,
//   F_K(u) = (K_F/2) w |u|^2 - (gamma/2) w u^T L u  with  K_G = K_F = K.

/// sup_t { t s - (alpha/2)(t^2 - beta)^2 - (K/2) t^2 } and its maximiser.
struct PointConjugate {
    double value = 0.0;
    double argmax = 0.0;
};
PointConjugate double_well_conjugate(double s, double alpha, double beta, double K);

/// sum_i w * double_well_conjugate(v_i).value.
double dc_G_star(const RealScalarField &v, const GLParams &params, double K);
/// (w/2) z^T (K - gamma L)^-1 z; throws if K - gamma L is not positive definite.
double dc_F_star(const RealScalarField &z, const GLParams &params, double K);
/// Smallest K making F_K convex on the grid: gamma times the Gershgorin bound 4 dim / d^2, doubled.
double dc_default_K(const BoxGrid &grid, const GLParams &params);

/// -G_K*(v) + F_K*(z) + <u, v - z - f>.
double toland_dual(const RealScalarField &u, const RealScalarField &v, const RealScalarField &z,
                   const RealScalarField &f, const GLParams &params, double K);

struct TolandCertificate {
    RealScalarField v, z;
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
};
/// v = 2 alpha (u^2 - beta) u + K u, z = K u - gamma L u.
TolandCertificate certify_toland(const RealScalarField &u0, const RealScalarField &f, const GLParams &params,
                                 double K);

} // namespace glduality
