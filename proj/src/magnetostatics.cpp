#include "glduality/magnetostatics.hpp"

#include <cmath>
#include <stdexcept>

namespace glduality {

namespace {

using Triplet = Eigen::Triplet<double>;

std::vector<int> interior_nodes(const BoxGrid &g) {
    std::vector<int> out;
    for (int p = 0; p < g.size(); ++p)
        if (!g.on_boundary(p)) out.push_back(p);
    if (out.empty()) throw std::invalid_argument("grid has no interior nodes");
    return out;
}

// Position of every grid node in `interior`, or -1 on the faces.
std::vector<int> slot_map(const BoxGrid &g, const std::vector<int> &interior) {
    std::vector<int> slot(g.size(), -1);
    for (std::size_t s = 0; s < interior.size(); ++s) slot[interior[s]] = static_cast<int>(s);
    return slot;
}

int shifted(const BoxGrid &g, int p, int axis, int step) {
    NodeIndex n = g.node(p);
    n[axis] += step;
    return g.index(n);
}

template <typename Solver>
SolveStats stats_of(const Solver &s) {
    return {static_cast<int>(s.iterations()), s.error(), s.info() == Eigen::Success};
}

} // namespace

DirichletPoisson::DirichletPoisson(const BoxGrid &grid, double tol)
    : grid_(grid), interior_(interior_nodes(grid)), tol_(tol) {
    const auto slot = slot_map(grid_, interior_);
    const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());
    std::vector<Triplet> t;
    for (std::size_t s = 0; s < interior_.size(); ++s) {
        for (int a = 0; a < 3; ++a) {
            if (!grid_.active(a)) continue;
            t.emplace_back(s, s, 2.0 * inv_h2);
            for (int step : {-1, 1})
                if (int q = slot[shifted(grid_, interior_[s], a, step)]; q >= 0) t.emplace_back(s, q, -inv_h2);
        }
    }
    const auto m = static_cast<Eigen::Index>(interior_.size());
    lap_.resize(m, m);
    lap_.setFromTriplets(t.begin(), t.end());
}

VectorXd DirichletPoisson::solve(const VectorXd &rhs, SolveStats *stats) const {
    if (rhs.size() != grid_.size()) throw std::invalid_argument("DirichletPoisson: rhs does not match the grid");
    VectorXd b(interior_.size());
    for (std::size_t s = 0; s < interior_.size(); ++s) b[s] = rhs[interior_[s]];
    VectorXd out = VectorXd::Zero(grid_.size());
    if (b.squaredNorm() == 0.0) {
        if (stats) *stats = {0, 0.0, true};
        return out;
    }
    Eigen::ConjugateGradient<SparseReal, Eigen::Lower | Eigen::Upper> cg(lap_);
    cg.setTolerance(tol_);
    cg.setMaxIterations(10 * static_cast<int>(b.size()));
    const VectorXd x = cg.solve(b);
    if (stats) *stats = stats_of(cg);
    for (std::size_t s = 0; s < interior_.size(); ++s) out[interior_[s]] = x[s];
    return out;
}

LerayProjector::LerayProjector(const BoxGrid &grid, double tol)
    : grid_(grid), interior_(interior_nodes(grid)), tol_(tol) {
    const auto slot = slot_map(grid_, interior_);
    const double c = 0.5 / grid_.spacing();
    const auto m = static_cast<Eigen::Index>(interior_.size());
    for (int a = 0; a < 3; ++a) {
        std::vector<Triplet> t;
        if (grid_.active(a)) {
            for (std::size_t s = 0; s < interior_.size(); ++s) {
                if (int q = slot[shifted(grid_, interior_[s], a, 1)]; q >= 0) t.emplace_back(s, q, c);
                if (int q = slot[shifted(grid_, interior_[s], a, -1)]; q >= 0) t.emplace_back(s, q, -c);
            }
        }
        D_[a].resize(m, m);
        D_[a].setFromTriplets(t.begin(), t.end());
    }
    // Each D_k is skew, so -sum D_k D_k = sum D_k^T D_k is symmetric semi-definite.
    neg_div_grad_ = SparseReal(m, m);
    for (const auto &D : D_) neg_div_grad_ += SparseReal(D.transpose() * D);

    // Central differences with zero extension annihilate 1,0,1,0,...,1 on an odd
    // number of nodes; the tensor product of those spans the kernel.
    bool odd = true;
    for (int a = 0; a < 3; ++a) odd = odd && (!grid_.active(a) || (grid_.nodes()[a] - 2) % 2 == 1);
    if (odd) {
        null_ = VectorXd::Zero(m);
        for (Eigen::Index s = 0; s < m; ++s) {
            const NodeIndex n = grid_.node(interior_[s]);
            bool on = true;
            for (int a = 0; a < 3; ++a) on = on && (!grid_.active(a) || (n[a] - 1) % 2 == 0);
            null_[s] = on ? 1.0 : 0.0;
        }
        null_.normalize();
    }
}

RealVectorField LerayProjector::project(const RealVectorField &A, SolveStats *stats) const {
    require_valid(A, "A");
    if (!(A.grid == grid_)) throw std::invalid_argument("LerayProjector: field lives on another grid");
    RealVectorField out = A;
    for (int p = 0; p < grid_.size(); ++p) {
        const NodeIndex n = grid_.node(p);
        for (int a = 0; a < 3; ++a)
            if (grid_.active(a) && (n[a] == 0 || n[a] == grid_.nodes()[a] - 1)) out.values[a][p] = 0.0;
    }

    const auto m = static_cast<Eigen::Index>(interior_.size());
    std::array<VectorXd, 3> comp;
    VectorXd div = VectorXd::Zero(m);
    for (int a = 0; a < 3; ++a) {
        comp[a].resize(m);
        for (Eigen::Index s = 0; s < m; ++s) comp[a][s] = out.values[a][interior_[s]];
        div += D_[a] * comp[a];
    }
    // Rounding leaves a component along the kernel that CG would chase forever.
    if (null_.size() > 0) div -= null_.dot(div) * null_;
    if (div.squaredNorm() == 0.0) {
        if (stats) *stats = {0, 0.0, true};
        return out;
    }
    // The system is singular but consistent; CG from zero stays in the range.
    Eigen::ConjugateGradient<SparseReal, Eigen::Lower | Eigen::Upper, Eigen::IdentityPreconditioner> cg(
        neg_div_grad_);
    cg.setTolerance(tol_);
    cg.setMaxIterations(20 * static_cast<int>(m));
    const VectorXd psi = cg.solve(-div);
    if (stats) *stats = stats_of(cg);
    for (int a = 0; a < 3; ++a) {
        const VectorXd g = D_[a] * psi;
        for (Eigen::Index s = 0; s < m; ++s) out.values[a][interior_[s]] = comp[a][s] - g[s];
    }
    return out;
}

RealVectorField leray_project(const RealVectorField &A) { return LerayProjector(A.grid).project(A); }

double interior_div_sup(const RealVectorField &A) {
    const VectorXd div = build_div(A.grid).matrix * A.stacked();
    double worst = 0.0;
    for (int p = 0; p < A.grid.size(); ++p)
        if (!A.grid.on_boundary(p)) worst = std::max(worst, std::abs(div[p]));
    return worst;
}

double normal_trace_sup(const RealVectorField &A) {
    const BoxGrid &g = A.grid;
    double worst = 0.0;
    for (int p = 0; p < g.size(); ++p) {
        const NodeIndex n = g.node(p);
        for (int a = 0; a < 3; ++a)
            if (g.active(a) && (n[a] == 0 || n[a] == g.nodes()[a] - 1))
                worst = std::max(worst, std::abs(A.values[a][p]));
    }
    return worst;
}

double interior_curl_change(const RealVectorField &A, const RealVectorField &B) {
    const RealOperator curl = build_curl(A.grid);
    const Components d = unstack(curl.matrix * (A.stacked() - B.stacked()));
    double worst = 0.0;
    for (int p = 0; p < A.grid.size(); ++p)
        if (!A.grid.on_boundary(p))
            for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(d[a][p]));
    return worst;
}

Magnetostatics::Magnetostatics(const GLDomain &domain, const GLParams &params)
    : domain_(domain), params_(params), poisson_(domain.outer()), projector_(domain.outer()) {}

VectorPotentialResult Magnetostatics::solve_source(const RealVectorField &source) const {
    require_valid(source, "source");
    VectorPotentialResult r;
    RealVectorField A = RealVectorField::zeros(domain_.outer());
    for (int a = 0; a < 3; ++a) A.values[a] = poisson_.solve(source.values[a], &r.poisson[a]);
    r.A = projector_.project(A, &r.projection);
    r.div_sup = interior_div_sup(r.A);
    return r;
}

VectorPotentialResult Magnetostatics::solve(const ComplexScalarField &phi, const RealVectorField &A_prev,
                                            const RealVectorField &B0) const {
    require_valid(B0, "B0");
    const RealVectorField J = compute_supercurrent(domain_, phi, A_prev, params_);
    const VectorXd curl_b0 = domain_.curl().matrix * B0.stacked();
    RealVectorField source =
        RealVectorField::from_stacked(domain_.outer(), curl_b0 + J.stacked() / params_.magnetic_weight());
    return solve_source(source);
}

RealVectorField solve_vector_potential(const GLDomain &domain, const ComplexScalarField &phi,
                                       const RealVectorField &A_prev, const RealVectorField &B0,
                                       const GLParams &params) {
    return Magnetostatics(domain, params).solve(phi, A_prev, B0).A;
}

} // namespace glduality
