#include "glduality/mol_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/LU>

#include <cmath>
#include <stdexcept>
#include <string>

namespace glduality {

namespace {

using ComplexTriplet = Eigen::Triplet<Complex>;

constexpr int kDenseLimit = 40 * 40;

// Sub-grid of the Omega nodes with coordinate `i` along `axis`.
BoxGrid section_grid(const BoxGrid &omega, int axis, int i) {
    auto lower = omega.lower();
    auto nodes = omega.nodes();
    lower[axis] = omega.coordinate(axis, i);
    nodes[axis] = 1;
    return BoxGrid(lower, omega.spacing(), nodes);
}

SparseComplex diagonal(const VectorXcd &v) {
    SparseComplex D(v.size(), v.size());
    std::vector<ComplexTriplet> t;
    for (Eigen::Index i = 0; i < v.size(); ++i) t.emplace_back(i, i, v[i]);
    D.setFromTriplets(t.begin(), t.end());
    return D;
}

} // namespace

struct MethodOfLines::LineSystem {
    Eigen::PartialPivLU<Eigen::MatrixXcd> dense;
    SparseComplex sparse;
    Eigen::BiCGSTAB<SparseComplex, Eigen::DiagonalPreconditioner<Complex>> krylov;
    bool use_dense = true;
    int line = 0;
    double tol = 1e-12;

    LineSystem(const SparseComplex &m, int line_index, double tolerance)
        : use_dense(m.rows() < kDenseLimit), line(line_index), tol(tolerance) {
        if (use_dense) {
            dense.compute(Eigen::MatrixXcd(m));
            if (!(std::abs(dense.determinant()) > 0.0))
                throw std::runtime_error("method of lines: singular system on line " + std::to_string(line));
        } else {
            sparse = m;
            krylov.setTolerance(tol);
            krylov.setMaxIterations(10 * static_cast<int>(m.rows()));
            krylov.compute(sparse);
        }
    }

    VectorXcd solve(const VectorXcd &rhs) const {
        if (use_dense) return dense.solve(rhs);
        VectorXcd x = krylov.solve(rhs);
        if (krylov.info() != Eigen::Success)
            throw std::runtime_error("method of lines: BiCGSTAB failed on line " + std::to_string(line) +
                                     " (residual " + std::to_string(krylov.error()) + ")");
        return x;
    }
};

BoundaryMatrices boundary_matrices(const GLDomain &domain, const RealVectorField &A, const GLParams &params) {
    require_valid(A, "A");
    const BoxGrid &om = domain.omega();
    const int axis = params.line_axis;
    const int last = om.nodes()[axis] - 1;
    const Components a = domain.potential_on_omega(A);
    const BoxGrid sec = section_grid(om, axis, 0);
    const double d = om.spacing();
    BoundaryMatrices H{VectorXcd(sec.size()), VectorXcd(sec.size())};
    for (int s = 0; s < sec.size(); ++s) {
        NodeIndex n = sec.node(s);
        n[axis] = 0;
        const double a_first = -a[axis][om.index(n)];  // outward normal is -e_axis
        n[axis] = last;
        const double a_last = a[axis][om.index(n)];
        H.H1[s] = Complex(1.0, params.rho * d * a_first);
        H.H2[s] = Complex(1.0, params.rho * d * a_last);
    }
    return H;
}

LineRecursion forward_sweep(const VectorXcd &H1, double kappa, int lines, double spacing) {
    if (lines < 1) throw std::invalid_argument("forward_sweep: need at least one line");
    LineRecursion rec;
    rec.kappa = kappa;
    rec.spacing = spacing;
    const Eigen::Index m = H1.size();
    auto invert = [&](const VectorXcd &den, int n) {
        for (Eigen::Index s = 0; s < m; ++s)
            if (std::abs(den[s]) < 1e-300)
                throw std::runtime_error("forward_sweep: singular resolvent on line " + std::to_string(n));
        return VectorXcd(den.cwiseInverse());
    };
    rec.a.push_back(invert(VectorXcd::Constant(m, 2.0 + kappa) - H1, 1));
    rec.b.push_back(rec.a.back());
    for (int n = 2; n <= lines; ++n) {
        rec.a.push_back(invert(VectorXcd::Constant(m, 2.0 + kappa) - rec.a.back(), n));
        rec.b.push_back(rec.a.back().cwiseProduct(rec.b.back() + VectorXcd::Ones(m)));
    }
    for (const auto &a : rec.a) rec.max_abs_a = std::max(rec.max_abs_a, a.cwiseAbs().maxCoeff());
    return rec;
}

std::vector<VectorXcd> affine_terms(const LineRecursion &rec, const std::vector<VectorXcd> &tau) {
    if (static_cast<int>(tau.size()) != rec.lines()) throw std::invalid_argument("affine_terms: one tau per line");
    std::vector<VectorXcd> E(tau.size());
    E[0] = VectorXcd::Zero(tau[0].size());
    for (std::size_t n = 1; n < tau.size(); ++n)
        E[n] = rec.a[n].cwiseProduct(rec.b[n - 1].cwiseProduct(tau[n - 1] - tau[n]) + E[n - 1]);
    return E;
}

MethodOfLines::MethodOfLines(const GLDomain &domain, const FrozenCoefficients &frozen, const GLParams &params)
    : domain_(domain), params_(params), axis_(params.line_axis), phi_hat_(frozen.phi_hat) {
    params_.validate();
    require_valid(frozen.phi_hat, "phi_hat");
    require_valid(frozen.A0, "A0");
    if (!(frozen.phi_hat.grid == domain.omega()) || !(frozen.A0.grid == domain.outer()))
        throw std::invalid_argument("MethodOfLines: snapshot does not match the domain");
    const BoxGrid &om = domain.omega();
    if (!om.active(axis_)) throw std::invalid_argument("MethodOfLines: line axis is inactive");

    d_ = om.spacing();
    shift_ = params_.effective_line_shift();
    const double gamma = params_.gamma;
    const int M = om.nodes()[axis_];
    const BoxGrid sec0 = section_grid(om, axis_, 0);
    section_size_ = sec0.size();
    line_nodes_.assign(M, std::vector<int>(section_size_));
    for (int i = 0; i < M; ++i)
        for (int s = 0; s < section_size_; ++s) {
            NodeIndex n = sec0.node(s);
            n[axis_] = i;
            line_nodes_[i][s] = om.index(n);
        }

    bnd_ = boundary_matrices(domain, frozen.A0, params_);
    rec_ = forward_sweep(bnd_.H1, shift_ * d_ * d_ / gamma, M, d_);

    const Components A = domain.potential_on_omega(frozen.A0);
    CovariantParts section_parts;
    section_parts.first_order = false;
    section_parts.axes[axis_] = false;
    const SparseComplex P = build_covariant_square(om, A, params_.rho, section_parts).matrix;
    const SparseComplex cov = build_covariant_square(om, A, params_.rho).matrix;

    // Line-axis second difference with the ghosts eliminated.
    const double inv_h2 = 1.0 / (d_ * d_);
    std::vector<ComplexTriplet> t;
    for (int i = 0; i < M; ++i)
        for (int s = 0; s < section_size_; ++s) {
            const int p = line_nodes_[i][s];
            Complex diag = 2.0 * inv_h2;
            if (i > 0) t.emplace_back(p, line_nodes_[i - 1][s], -inv_h2);
            else diag -= bnd_.H1[s] * inv_h2;
            if (i < M - 1) t.emplace_back(p, line_nodes_[i + 1][s], -inv_h2);
            else diag -= bnd_.H2[s] * inv_h2;
            t.emplace_back(p, p, diag);
        }
    SparseComplex LH(om.size(), om.size());
    LH.setFromTriplets(t.begin(), t.end());

    const SparseComplex rest = cov - LH - P;
    const VectorXcd explicit_part = shift_ * phi_hat_.values - gamma * (rest * phi_hat_.values);
    const VectorXd c = 2.0 * params_.alpha * (phi_hat_.modulus_squared().array() - params_.beta);

    const double scale = d_ * d_ / gamma;
    lin_.resize(M);
    aff_.resize(M);
    for (int i = 0; i < M; ++i) {
        const BoxGrid sec = section_grid(om, axis_, i);
        Components Ai;
        for (int k = 0; k < 3; ++k) {
            Ai[k].resize(section_size_);
            for (int s = 0; s < section_size_; ++s) Ai[k][s] = A[k][line_nodes_[i][s]];
        }
        VectorXcd ci(section_size_);
        aff_[i].resize(section_size_);
        for (int s = 0; s < section_size_; ++s) {
            ci[s] = c[line_nodes_[i][s]];
            aff_[i][s] = scale * explicit_part[line_nodes_[i][s]];
        }
        const SparseComplex Pi = build_covariant_square(sec, Ai, params_.rho, section_parts).matrix;
        lin_[i] = -(d_ * d_) * Pi - scale * diagonal(ci);
    }

    const SparseComplex I = diagonal(VectorXcd::Ones(section_size_));
    for (int i = 0; i < M - 1; ++i)
        systems_.push_back(std::make_unique<LineSystem>(SparseComplex(I - diagonal(rec_.b[i]) * lin_[i]), i + 1,
                                                        params_.linear_tol * 1e-2));
    const SparseComplex terminal = I - diagonal(rec_.a[M - 1].cwiseProduct(bnd_.H2)) - diagonal(rec_.b[M - 1]) * lin_[M - 1];
    systems_.push_back(std::make_unique<LineSystem>(terminal, M, params_.linear_tol * 1e-2));
}

MethodOfLines::~MethodOfLines() = default;

VectorXcd MethodOfLines::line_values(const ComplexScalarField &phi, int n) const {
    if (n < 1 || n > lines()) throw std::out_of_range("line index " + std::to_string(n) + " out of range");
    VectorXcd v(section_size_);
    for (int s = 0; s < section_size_; ++s) v[s] = phi.values[line_nodes_[n - 1][s]];
    return v;
}

VectorXcd MethodOfLines::assemble_T(int n, const VectorXcd &phi_n) const {
    if (n < 1 || n > lines()) throw std::out_of_range("line index " + std::to_string(n) + " out of range");
    if (phi_n.size() != section_size_) throw std::invalid_argument("assemble_T: wrong cross-section size");
    return (params_.gamma / (d_ * d_)) * (lin_[n - 1] * phi_n + aff_[n - 1]);
}

VectorXcd MethodOfLines::terminal_solve(const std::vector<VectorXcd> &E) const {
    const int last = lines() - 1;
    return systems_.back()->solve(rec_.b[last].cwiseProduct(aff_[last]) + E[last]);
}

ComplexScalarField MethodOfLines::backward_substitution(const VectorXcd &terminal,
                                                        const std::vector<VectorXcd> &E) const {
    ComplexScalarField phi = ComplexScalarField::zeros(domain_.omega());
    VectorXcd next = terminal;
    const int M = lines();
    for (int s = 0; s < section_size_; ++s) phi.values[line_nodes_[M - 1][s]] = next[s];
    for (int i = M - 2; i >= 0; --i) {
        const VectorXcd rhs = rec_.a[i].cwiseProduct(next) + rec_.b[i].cwiseProduct(aff_[i]) + E[i];
        next = systems_[i]->solve(rhs);
        for (int s = 0; s < section_size_; ++s) phi.values[line_nodes_[i][s]] = next[s];
    }
    return phi;
}

ComplexScalarField MethodOfLines::sweep(const ComplexScalarField &guess) const {
    std::vector<VectorXcd> tau(lines());
    for (int n = 1; n <= lines(); ++n) tau[n - 1] = lin_[n - 1] * line_values(guess, n) + aff_[n - 1];
    const auto E = affine_terms(rec_, tau);
    return backward_substitution(terminal_solve(E), E);
}

ComplexScalarField MethodOfLines::solve(MolStats *stats) const {
    VectorXcd x = phi_hat_.values;
    ComplexScalarField work = phi_hat_;
    int sweeps = 0;
    auto map = [&](const VectorXcd &v) -> VectorXcd {
        ++sweeps;
        work.values = v;
        return sweep(work).values;
    };
    const GmresResult g = fixed_point_gmres(map, x, params_.linear_tol, params_.max_krylov);
    ComplexScalarField phi{domain_.omega(), x};
    if (stats) {
        stats->sweeps = sweeps;
        stats->relative_residual = g.relative_residual;
        double worst = 0.0;
        for (double r : line_residuals(phi)) worst = std::max(worst, r);
        stats->line_residual = worst;
        stats->converged = g.relative_residual <= params_.linear_tol;
    }
    return phi;
}

std::vector<double> MethodOfLines::line_residuals(const ComplexScalarField &phi) const {
    const int M = lines();
    std::vector<double> out(M);
    for (int n = 1; n <= M; ++n) {
        const VectorXcd cur = line_values(phi, n);
        const VectorXcd prev = n > 1 ? line_values(phi, n - 1) : VectorXcd(bnd_.H1.cwiseProduct(cur));
        const VectorXcd next = n < M ? line_values(phi, n + 1) : VectorXcd(bnd_.H2.cwiseProduct(cur));
        const VectorXcd r =
            next - (2.0 + rec_.kappa) * cur + prev + lin_[n - 1] * cur + aff_[n - 1];
        out[n - 1] = r.cwiseAbs().maxCoeff();
    }
    return out;
}

} // namespace glduality
