#include "glduality/duality.hpp"

#include "glduality/detail/lbfgs.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace glduality {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void same_grid(const BoxGrid &a, const BoxGrid &b, const char *what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": fields live on different grids");
}

SparseReal identity(Eigen::Index n) {
    SparseReal I(n, n);
    I.setIdentity();
    return I;
}

// Count of negative pivots of op - sigma I, or -1 when the factorisation breaks down.
int negative_pivots(const SparseReal &op, double sigma) {
    Eigen::SimplicialLDLT<SparseReal> ldlt(SparseReal(op - sigma * identity(op.rows())));
    if (ldlt.info() != Eigen::Success) return -1;
    return static_cast<int>((ldlt.vectorD().array() < 0.0).count());
}

// Pointwise part of the scalar dual, shared by G* and its callers.
double g_star_sum(const VectorXd &v1, const VectorXd &v0, const VectorXd &f, const GLParams &p, double w) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v1.size(); ++i) {
        const double den = p.K - 2.0 * v0[i];
        if (!(den > 0.0))
            throw std::domain_error("dual guard K - 2 v0 > 0 fails at node " + std::to_string(i));
        const double r = v1[i] - f[i];
        s += 0.5 * r * r / den - v0[i] * v0[i] / (2.0 * p.alpha) - p.beta * v0[i];
    }
    return w * s;
}

// Evaluates the scalar dual repeatedly with one factorisation of gamma L + K.
struct ScalarDualEvaluator {
    const RealScalarField &f;
    const GLParams &p;
    double w;
    Eigen::SimplicialLDLT<SparseReal> solver;

    ScalarDualEvaluator(const RealScalarField &f_, const GLParams &p_) : f(f_), p(p_), w(f_.grid.cell_weight()) {
        const RealOperator L = build_laplacian(f.grid, BoundaryKind::DirichletZero);
        solver.compute(SparseReal(p.gamma * L.matrix + p.K * identity(L.rows())));
        if (solver.info() != Eigen::Success) throw std::runtime_error("scalar dual: factorisation failed");
    }
    double F_star(const VectorXd &v1) const { return 0.5 * w * v1.dot(solver.solve(v1)); }
    double value(const VectorXd &v1, const VectorXd &v0) const {
        return -F_star(v1) + g_star_sum(v1, v0, f.values, p, w);
    }
};

struct GLDualEvaluator {
    const GLDomain &domain;
    const GLParams &p;
    double w;
    double magnetic;
    Eigen::SparseLU<SparseComplex> solver;

    GLDualEvaluator(const GLDomain &d, const RealVectorField &A, const RealVectorField &B0, const GLParams &p_)
        : domain(d), p(p_), w(d.omega().cell_weight()) {
        const VectorXd b = d.curl().matrix * A.stacked() - B0.stacked();
        magnetic = p.magnetic_weight() * d.outer().cell_weight() * b.squaredNorm();
        SparseComplex C = p.gamma * covariant_square(d, A, p.rho).matrix;
        for (int i = 0; i < C.rows(); ++i) C.coeffRef(i, i) += p.K;
        C.makeCompressed();
        solver.compute(C);
        if (solver.info() != Eigen::Success) throw std::runtime_error("GL dual: factorisation failed");
    }
    double F_star(const VectorXcd &v1) const {
        const VectorXcd x = solver.solve(v1);
        return 0.5 * w * v1.dot(x).real();
    }
    double value(const VectorXcd &v1, const VectorXd &v0) const {
        double s = 0.0;
        for (Eigen::Index i = 0; i < v1.size(); ++i) {
            const double den = p.K - 2.0 * v0[i];
            if (!(den > 0.0))
                throw std::domain_error("dual guard K - 2 v0 > 0 fails at node " + std::to_string(i));
            s += 0.5 * std::norm(v1[i]) / den - v0[i] * v0[i] / (2.0 * p.alpha) - p.beta * v0[i];
        }
        return -F_star(v1) + w * s + magnetic;
    }
};

bool e_box(const VectorXd &v0, double K) { return ((K - 2.0 * v0.array()) > 0.5 * K).all(); }

// Real 2n form [[Re H, -Im H], [Im H, Re H]] of a complex matrix.
Eigen::MatrixXd realify(const Eigen::MatrixXcd &H) {
    const Eigen::Index n = H.rows();
    Eigen::MatrixXd R(2 * n, 2 * n);
    R.topLeftCorner(n, n) = H.real();
    R.topRightCorner(n, n) = -H.imag();
    R.bottomLeftCorner(n, n) = H.imag();
    R.bottomRightCorner(n, n) = H.real();
    return R;
}

// Smallest eigenvalue of M on the orthogonal complement of q.
double min_eig_modulo(const Eigen::MatrixXd &M, VectorXd q) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(M, Eigen::EigenvaluesOnly);
    if (q.norm() == 0.0) return full.eigenvalues()[0];
    q.normalize();
    const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(M.rows(), M.cols()) - q * q.transpose();
    const double lift = 2.0 * std::max(1.0, std::abs(full.eigenvalues()[M.rows() - 1]));
    const Eigen::MatrixXd R = P * M * P + lift * q * q.transpose();
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(R, Eigen::EigenvaluesOnly).eigenvalues()[0];
}

VectorXd stack_complex(const VectorXcd &z) {
    VectorXd x(2 * z.size());
    x << z.real(), z.imag();
    return x;
}

// Real form of gamma Cov + diag(2 alpha (|phi|^2 - beta)) + 4 alpha phi phi^T per node.
SparseReal real_second_variation(const SparseComplex &gamma_cov, const VectorXcd &phi, const GLParams &p) {
    const Eigen::Index n = phi.size();
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < gamma_cov.outerSize(); ++k)
        for (SparseComplex::InnerIterator it(gamma_cov, k); it; ++it) {
            const double re = it.value().real(), im = it.value().imag();
            t.emplace_back(it.row(), it.col(), re);
            t.emplace_back(n + it.row(), n + it.col(), re);
            t.emplace_back(it.row(), n + it.col(), -im);
            t.emplace_back(n + it.row(), it.col(), im);
        }
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = phi[i].real(), im = phi[i].imag();
        const double c = 2.0 * p.alpha * (std::norm(phi[i]) - p.beta);
        t.emplace_back(i, i, c + 4.0 * p.alpha * re * re);
        t.emplace_back(n + i, n + i, c + 4.0 * p.alpha * im * im);
        t.emplace_back(i, n + i, 4.0 * p.alpha * re * im);
        t.emplace_back(n + i, i, 4.0 * p.alpha * re * im);
    }
    SparseReal H(2 * n, 2 * n);
    H.setFromTriplets(t.begin(), t.end());
    return H;
}

} // namespace

double select_K(double alpha, double K2) {
    if (!(alpha > 0.0) || !(K2 > 0.0)) throw std::invalid_argument("select_K: alpha and K2 must be positive");
    double K = 1.0;
    while (!(1.0 / alpha > 8.0 * K2 * K2 / K && 1.0 / alpha > 32.0 * K2 * K2 / (K * K * K))) K *= 2.0;
    return K;
}

double amplitude_bound(double sup_phi, double beta) { return 1.5 * std::max(sup_phi, std::sqrt(beta)); }

double scalar_F_star(const RealScalarField &v1, const GLParams &params) {
    require_valid(v1, "v1");
    return ScalarDualEvaluator(v1, params).F_star(v1.values);
}

double scalar_G_star(const RealScalarField &v1, const RealScalarField &v0, const RealScalarField &f,
                     const GLParams &params) {
    require_valid(v1, "v1");
    require_valid(v0, "v0");
    require_valid(f, "f");
    same_grid(v1.grid, v0.grid, "scalar_G_star");
    same_grid(v1.grid, f.grid, "scalar_G_star");
    return g_star_sum(v1.values, v0.values, f.values, params, v1.grid.cell_weight());
}

double scalar_dual(const RealScalarField &v1, const RealScalarField &v0, const RealScalarField &f,
                   const GLParams &params) {
    return -scalar_F_star(v1, params) + scalar_G_star(v1, v0, f, params);
}

double min_eigenvalue(const SparseReal &op) {
    const Eigen::Index n = op.rows();
    if (n <= 2000) {
        return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Eigen::MatrixXd(op), Eigen::EigenvaluesOnly)
            .eigenvalues()[0];
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int c = 0; c < op.outerSize(); ++c) {
        double centre = 0.0, radius = 0.0;
        for (SparseReal::InnerIterator it(op, c); it; ++it)
            (it.row() == c ? centre : radius) += it.row() == c ? it.value() : std::abs(it.value());
        lo = std::min(lo, centre - radius);
        hi = std::max(hi, centre + radius);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(1.0, std::min(std::abs(lo), std::abs(hi))); ++it) {
        const double mid = 0.5 * (lo + hi);
        const int neg = negative_pivots(op, mid);
        if (neg != 0) hi = mid;  // breakdown means mid is (numerically) an eigenvalue
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

DualCertificate certify_scalar(const RealScalarField &u0, const RealScalarField &f, const GLParams &params,
                               double residual_tol) {
    require_valid(u0, "u0");
    require_valid(f, "f");
    same_grid(u0.grid, f.grid, "certify_scalar");
    params.validate();
    DualCertificate c;
    c.K = params.K;
    c.primal_residual = scalar_residual(u0, f, params).values.lpNorm<Eigen::Infinity>();
    if (!(c.primal_residual <= residual_tol))
        throw CertificateError("certify_scalar: u0 is not critical (residual " + std::to_string(c.primal_residual) +
                               ")");

    const double w = u0.grid.cell_weight();
    const RealOperator L = build_laplacian(u0.grid, BoundaryKind::DirichletZero);
    const VectorXd &u = u0.values;
    c.v0 = params.alpha * (u.array().square() - params.beta);
    const VectorXd v1 = params.gamma * (L.matrix * u) + params.K * u;
    const VectorXd alt = (params.K - 2.0 * c.v0.array()) * u.array() + f.values.array();
    c.v1 = v1.cast<Complex>();
    c.multiplier_agreement = (v1 - alt).lpNorm<Eigen::Infinity>();
    c.e_box = e_box(c.v0, params.K);
    c.a_plus = ((u.array() * f.values.array()) >= 0.0).all();
    c.dual_bound = params.satisfies_dual_bound();
    c.amplitude_ok = u.lpNorm<Eigen::Infinity>() <= params.K2;
    c.min_second_variation = min_eigenvalue(scalar_second_variation(u0, params).matrix);
    c.b_plus = c.min_second_variation >= -1e-9;

    c.primal = scalar_energy(u0, f, params);
    if (!((params.K - 2.0 * c.v0.array()) > 0.0).all()) {
        c.dual = c.gap = c.stationarity_v0 = c.stationarity_v1 = kNaN;
        return c;
    }
    const ScalarDualEvaluator ev(f, params);
    c.dual = ev.value(v1, c.v0);
    c.gap = std::abs(c.primal - c.dual);

    const double h = 1e-5;
    VectorXd a = v1, b = c.v0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double s1 = a[i], s0 = b[i];
        a[i] = s1 + h;
        const double p1 = ev.value(a, b);
        a[i] = s1 - h;
        const double m1 = ev.value(a, b);
        a[i] = s1;
        c.stationarity_v1 = std::max(c.stationarity_v1, std::abs(p1 - m1) / (2.0 * h * w));
        b[i] = s0 + h;
        const double p0 = ev.value(a, b);
        b[i] = s0 - h;
        const double m0 = ev.value(a, b);
        b[i] = s0;
        c.stationarity_v0 = std::max(c.stationarity_v0, std::abs(p0 - m0) / (2.0 * h * w));
    }
    return c;
}

RealScalarField sign_align(const RealScalarField &u, const RealScalarField &f) {
    require_valid(u, "u");
    require_valid(f, "f");
    same_grid(u.grid, f.grid, "sign_align");
    RealScalarField out = u;
    for (Eigen::Index i = 0; i < u.values.size(); ++i)
        if (u.values[i] * f.values[i] < 0.0) out.values[i] = -u.values[i];
    return out;
}

ScalarHDiagnostic scalar_H(const RealScalarField &u, const GLParams &params) {
    require_valid(u, "u");
    ScalarHDiagnostic d;
    d.pointwise = std::sqrt(6.0 * params.alpha) * u.values.cwiseAbs();
    const double lmin = min_eigenvalue(build_laplacian(u.grid, BoundaryKind::DirichletZero).matrix);
    d.operator_root = std::sqrt(std::max(0.0, 2.0 * params.alpha * params.beta - params.gamma * lmin));
    d.surrogate_positive = d.pointwise.minCoeff() >= d.operator_root;
    d.min_eigenvalue = min_eigenvalue(scalar_second_variation(u, params).matrix);
    d.b_plus = d.min_eigenvalue >= -1e-9;
    return d;
}

double gl_F_star(const GLDomain &domain, const ComplexScalarField &v1, const RealVectorField &A,
                 const GLParams &params) {
    require_valid(v1, "v1");
    same_grid(v1.grid, domain.omega(), "gl_F_star");
    return GLDualEvaluator(domain, A, RealVectorField::zeros(domain.outer()), params).F_star(v1.values);
}

double gl_dual(const GLDomain &domain, const ComplexScalarField &v1, const RealScalarField &v0,
               const RealVectorField &A, const RealVectorField &B0, const GLParams &params) {
    require_valid(v1, "v1");
    require_valid(v0, "v0");
    same_grid(v1.grid, domain.omega(), "gl_dual");
    same_grid(v0.grid, domain.omega(), "gl_dual");
    return GLDualEvaluator(domain, A, B0, params).value(v1.values, v0.values);
}

Eigen::MatrixXd gl_second_variation_dense(const GLDomain &domain, const ComplexScalarField &phi,
                                          const RealVectorField &A, const GLParams &params) {
    const Eigen::MatrixXcd cov(covariant_square(domain, A, params.rho).matrix);
    Eigen::MatrixXd H = params.gamma * realify(cov);
    const Eigen::Index n = phi.values.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = phi.values[i].real(), im = phi.values[i].imag();
        const double c = 2.0 * params.alpha * (std::norm(phi.values[i]) - params.beta);
        H(i, i) += c + 4.0 * params.alpha * re * re;
        H(n + i, n + i) += c + 4.0 * params.alpha * im * im;
        H(i, n + i) += 4.0 * params.alpha * re * im;
        H(n + i, i) += 4.0 * params.alpha * re * im;
    }
    return H;
}

DualCertificate certify_gl(const GLDomain &domain, const ComplexScalarField &phi0, const RealVectorField &A0,
                           const RealVectorField &B0, const GLParams &params, const GLCertifyOptions &options) {
    require_valid(phi0, "phi0");
    require_valid(A0, "A0");
    require_valid(B0, "B0");
    same_grid(phi0.grid, domain.omega(), "certify_gl");
    params.validate();
    DualCertificate c;
    c.K = params.K;
    c.primal_residual = gl_residual_phi(domain, phi0, A0, params).values.cwiseAbs().maxCoeff();
    if (!(c.primal_residual <= options.residual_tol))
        throw CertificateError("certify_gl: phi0 is not critical at A0 (residual " +
                               std::to_string(c.primal_residual) + ")");

    const double w = domain.omega().cell_weight();
    const VectorXd mod2 = phi0.modulus_squared();
    c.v0 = params.alpha * (mod2.array() - params.beta);
    c.v1 = (2.0 * c.v0.array() - params.K).cast<Complex>() * phi0.values.array();
    c.e_box = e_box(c.v0, params.K);
    c.dual_bound = params.satisfies_dual_bound();
    c.amplitude_ok = std::sqrt(mod2.maxCoeff()) <= params.K2;
    c.primal = gl_energy(domain, phi0, A0, B0, params);
    c.multiplier_agreement = 0.0;

    const Eigen::Index n = phi0.values.size();
    const bool dense = n <= options.dense_limit;
    const VectorXd phase = stack_complex(Complex(0.0, 1.0) * phi0.values);  // the global phase direction
    if (dense) {
        const Eigen::MatrixXd H = gl_second_variation_dense(domain, phi0, A0, params);
        c.min_second_variation = min_eig_modulo(H, phase);

        const SparseComplex cov = covariant_square(domain, A0, params.rho).matrix;
        Eigen::MatrixXd C = params.gamma * realify(Eigen::MatrixXcd(cov));
        C.diagonal().array() += params.K;
        Eigen::MatrixXd Binv = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        bool local_ok = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double s = params.K - 2.0 * c.v0[i];
            Eigen::Matrix2d B = s * Eigen::Matrix2d::Identity();
            const Eigen::Vector2d p(phi0.values[i].real(), phi0.values[i].imag());
            B -= 4.0 * params.alpha * p * p.transpose();
            local_ok = local_ok && (s - 4.0 * params.alpha * mod2[i]) > 0.0;
            const Eigen::Matrix2d Bi = B.inverse();
            Binv(i, i) = Bi(0, 0);
            Binv(i, n + i) = Bi(0, 1);
            Binv(n + i, i) = Bi(1, 0);
            Binv(n + i, n + i) = Bi(1, 1);
        }
        if (local_ok) {
            const Eigen::MatrixXd Hstar = Binv - C.inverse();
            const Eigen::MatrixXd sym = 0.5 * (Hstar + Hstar.transpose());
            c.min_dual_hessian_full =
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues()[0];
            c.min_dual_hessian = min_eig_modulo(sym, C * phase);
        }
    } else {
        // Sparse real form; the phase direction keeps the smallest eigenvalue near zero.
        const SparseReal H = real_second_variation(
            SparseComplex(params.gamma * covariant_square(domain, A0, params.rho).matrix), phi0.values, params);
        c.min_second_variation = min_eigenvalue(H);
    }
    c.b_plus = c.min_second_variation >= -1e-9;

    if (!((params.K - 2.0 * c.v0.array()) > 0.0).all()) {
        c.dual = c.gap = c.stationarity_v0 = c.stationarity_v1 = kNaN;
        return c;
    }
    const GLDualEvaluator ev(domain, A0, B0, params);
    c.dual = ev.value(c.v1, c.v0);
    c.gap = std::abs(c.primal - c.dual);

    const double h = 1e-5;
    VectorXcd a = c.v1;
    VectorXd b = c.v0;
    auto fd_v1 = [&](const VectorXcd &dir) {
        const double p = ev.value(a + h * dir, b), m = ev.value(a - h * dir, b);
        return std::abs(p - m) / (2.0 * h * w);
    };
    auto fd_v0 = [&](const VectorXd &dir) {
        const double p = ev.value(a, b + h * dir), m = ev.value(a, b - h * dir);
        return std::abs(p - m) / (2.0 * h * w);
    };
    if (n <= 1000) {
        for (Eigen::Index i = 0; i < n; ++i) {
            VectorXcd e = VectorXcd::Zero(n);
            e[i] = 1.0;
            c.stationarity_v1 = std::max(c.stationarity_v1, fd_v1(e));
            e[i] = Complex(0.0, 1.0);
            c.stationarity_v1 = std::max(c.stationarity_v1, fd_v1(e));
            VectorXd r = VectorXd::Zero(n);
            r[i] = 1.0;
            c.stationarity_v0 = std::max(c.stationarity_v0, fd_v0(r));
        }
    } else {
        std::mt19937_64 rng(options.seed);
        std::normal_distribution<double> normal;
        for (int k = 0; k < options.fd_directions; ++k) {
            VectorXcd e(n);
            VectorXd r(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                e[i] = Complex(normal(rng), normal(rng));
                r[i] = normal(rng);
            }
            c.stationarity_v1 = std::max(c.stationarity_v1, fd_v1(e / e.cwiseAbs().maxCoeff()));
            c.stationarity_v0 = std::max(c.stationarity_v0, fd_v0(r / r.cwiseAbs().maxCoeff()));
        }
    }
    return c;
}

GLMultistartResult gl_multistart(const GLDomain &domain, const RealVectorField &A, const RealVectorField &B0,
                                 const GLParams &params, int starts, std::uint64_t seed) {
    const BoxGrid &om = domain.omega();
    const Eigen::Index n = om.size();
    const double w = om.cell_weight();
    // A is fixed, so the covariant operator and the magnetic term are assembled once.
    const SparseComplex C = params.gamma * covariant_square(domain, A, params.rho).matrix;
    const double magnetic = gl_energy_terms(domain, ComplexScalarField::zeros(om), A, B0, params).magnetic;
    auto fg = [&](const VectorXd &x, VectorXd &g) {
        VectorXcd phi(n);
        phi.real() = x.head(n);
        phi.imag() = x.tail(n);
        const VectorXcd Cphi = C * phi;
        const VectorXd m = phi.cwiseAbs2().array() - params.beta;
        const VectorXcd r = Cphi.array() + 2.0 * params.alpha * m.array() * phi.array();
        g << w * r.real(), w * r.imag();
        return 0.5 * w * phi.dot(Cphi).real() + 0.5 * params.alpha * w * m.squaredNorm() + magnetic;
    };
    std::vector<VectorXd> inits;
    const double sb = std::sqrt(params.beta);
    inits.push_back(stack_complex(VectorXcd::Constant(n, sb)));
    inits.push_back(stack_complex(VectorXcd::Constant(n, 0.5 * sb)));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sb);
    for (int s = 0; s < starts; ++s) {
        VectorXd x(2 * n);
        for (auto &v : x) v = normal(rng);
        inits.push_back(x);
    }
    auto residual = [&](const VectorXd &x) {
        VectorXd g(2 * n);
        fg(x, g);
        return VectorXd(g / w);
    };
    GLMultistartResult out;
    double best = std::numeric_limits<double>::infinity();
    for (auto &x : inits) {
        // Quasi-Newton for the approach, then shifted Newton: near a minimiser energy
        // differences sink into rounding and only the residual still measures progress.
        detail::lbfgs(fg, x, 1e-4 * w, 5000);
        VectorXd r = residual(x);
        double rn = r.lpNorm<Eigen::Infinity>();
        VectorXd g(2 * n);
        double f = fg(x, g);
        Eigen::SimplicialLDLT<SparseReal> ldlt;
        for (int it = 0; it < 100 && rn > 1e-9; ++it) {
            VectorXcd phi(n);
            phi.real() = x.head(n);
            phi.imag() = x.tail(n);
            const SparseReal H = real_second_variation(C, phi, params);
            double shift = 1e-10;
            for (;;) {
                ldlt.compute(SparseReal(H + shift * identity(H.rows())));
                if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) break;
                shift = std::max(1e-3, 4.0 * shift);
            }
            const VectorXd step = -ldlt.solve(r);
            const double slope = w * r.dot(step);
            bool accepted = false;
            for (double t = 1.0; t > 1e-12; t *= 0.5) {
                const VectorXd xt = x + t * step;
                VectorXd gt(2 * n);
                const double ft = fg(xt, gt);
                const double rt = (gt / w).lpNorm<Eigen::Infinity>();
                if (std::isfinite(ft) && (ft <= f + 1e-4 * t * slope || (shift <= 1e-10 && rt < rn))) {
                    x = xt;
                    f = ft;
                    r = gt / w;
                    rn = rt;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) break;
        }
        if (!(rn <= 1e-9)) continue;
        out.energies.push_back(f);
        if (f < best) {
            best = f;
            out.best = {om, VectorXcd(n)};
            out.best.values.real() = x.head(n);
            out.best.values.imag() = x.tail(n);
        }
    }
    std::sort(out.energies.begin(), out.energies.end());
    return out;
}

PointConjugate double_well_conjugate(double s, double alpha, double beta, double K) {
    if (!(alpha > 0.0) || !std::isfinite(s)) throw std::invalid_argument("double_well_conjugate: bad input");
    // Stationary points solve 2 alpha t^3 + (K - 2 alpha beta) t - s = 0, i.e. t^3 + p t + q = 0.
    const double p = (K - 2.0 * alpha * beta) / (2.0 * alpha);
    const double q = -s / (2.0 * alpha);
    std::vector<double> roots;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        roots.push_back(std::cbrt(-q / 2.0 + r) + std::cbrt(-q / 2.0 - r));
    } else {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double theta = std::acos(std::clamp(3.0 * q / (p * m), -1.0, 1.0)) / 3.0;
        for (int k = 0; k < 3; ++k) roots.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0));
    }
    auto objective = [&](double t) {
        const double d = t * t - beta;
        return t * s - 0.5 * alpha * d * d - 0.5 * K * t * t;
    };
    PointConjugate best{-std::numeric_limits<double>::infinity(), 0.0};
    for (double t : roots) {
        for (int it = 0; it < 3; ++it) {
            const double g = 2.0 * alpha * t * t * t + (K - 2.0 * alpha * beta) * t - s;
            const double dg = 6.0 * alpha * t * t + K - 2.0 * alpha * beta;
            if (dg == 0.0) break;
            t -= g / dg;
        }
        if (!std::isfinite(t)) continue;
        const double v = objective(t);
        if (v > best.value) best = {v, t};
    }
    if (!std::isfinite(best.value)) throw std::runtime_error("double_well_conjugate: no real stationary point");
    return best;
}

double dc_G_star(const RealScalarField &v, const GLParams &params, double K) {
    require_valid(v, "v");
    double s = 0.0;
    for (double x : v.values) s += double_well_conjugate(x, params.alpha, params.beta, K).value;
    return v.grid.cell_weight() * s;
}

double dc_default_K(const BoxGrid &grid, const GLParams &params) {
    const double d = grid.spacing();
    return 2.0 * params.gamma * 4.0 * grid.dim() / (d * d);
}

double dc_F_star(const RealScalarField &z, const GLParams &params, double K) {
    require_valid(z, "z");
    const RealOperator L = build_laplacian(z.grid, BoundaryKind::DirichletZero);
    Eigen::SimplicialLDLT<SparseReal> ldlt(SparseReal(K * identity(L.rows()) - params.gamma * L.matrix));
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all())
        throw std::invalid_argument("dc_F_star: K - gamma L is not positive definite");
    return 0.5 * z.grid.cell_weight() * z.values.dot(ldlt.solve(z.values));
}

double toland_dual(const RealScalarField &u, const RealScalarField &v, const RealScalarField &z,
                   const RealScalarField &f, const GLParams &params, double K) {
    same_grid(u.grid, v.grid, "toland_dual");
    same_grid(u.grid, z.grid, "toland_dual");
    same_grid(u.grid, f.grid, "toland_dual");
    const RealScalarField slack{u.grid, v.values - z.values - f.values};
    return -dc_G_star(v, params, K) + dc_F_star(z, params, K) + inner(u, slack);
}

TolandCertificate certify_toland(const RealScalarField &u0, const RealScalarField &f, const GLParams &params,
                                 double K) {
    require_valid(u0, "u0");
    const RealOperator L = build_laplacian(u0.grid, BoundaryKind::DirichletZero);
    const VectorXd &u = u0.values;
    TolandCertificate c;
    c.v = {u0.grid, VectorXd(2.0 * params.alpha * (u.array().square() - params.beta) * u.array() + K * u.array())};
    c.z = {u0.grid, VectorXd(K * u - params.gamma * (L.matrix * u))};
    c.primal = scalar_energy(u0, f, params);
    c.dual = toland_dual(u0, c.v, c.z, f, params, K);
    c.gap = std::abs(c.primal - c.dual);
    return c;
}

} // namespace glduality
