#include "glduality/fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace glduality {

namespace {

void fail(const char *what, const std::string &why) {
    throw std::invalid_argument(std::string(what) + ": " + why);
}

template <typename Vec>
void require_finite(const Vec &v, Eigen::Index expected, const char *what) {
    if (v.size() != expected) fail(what, "size does not match its grid");
    if (!v.allFinite()) fail(what, "contains non-finite values");
}

FieldNorms norms_from_moduli(const VectorXd &modulus, double w) {
    FieldNorms n;
    if (modulus.size() == 0) return n;
    const VectorXd sq = modulus.cwiseAbs2();
    n.l2 = std::sqrt(w * sq.sum());
    n.l4 = std::pow(w * sq.cwiseAbs2().sum(), 0.25);
    n.sup = modulus.maxCoeff();
    return n;
}

void require_outer(const BoxGrid &grid, const NestedGrid &g) {
    if (!(grid == g.outer())) throw std::invalid_argument("field does not live on the outer grid");
}

void require_inner(const BoxGrid &grid, const NestedGrid &g) {
    if (!(grid == g.inner())) throw std::invalid_argument("field does not live on the inner grid");
}

} // namespace

void require_valid(const RealScalarField &f, const char *what) { require_finite(f.values, f.grid.size(), what); }

void require_valid(const ComplexScalarField &f, const char *what) {
    require_finite(f.values, f.grid.size(), what);
}

void require_valid(const RealVectorField &f, const char *what) {
    for (const auto &c : f.values) require_finite(c, f.grid.size(), what);
}

double GLParams::magnetic_weight() const {
    return magnetic == MagneticNormalization::Gaussian ? 1.0 / (8.0 * std::numbers::pi) : K0;
}

void GLParams::validate(bool certificate) const {
    auto positive = [](double v, const char *name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
    };
    positive(gamma, "gamma");
    positive(alpha, "alpha");
    positive(beta, "beta");
    positive(rho, "rho");
    positive(K0, "K0");
    positive(K, "K");
    positive(K2, "K2");
    positive(linear_tol, "linear_tol");
    positive(outer_tol, "outer_tol");
    if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
    if (max_outer < 1) throw std::invalid_argument("max_outer must be at least 1");
    if (max_krylov < 1) throw std::invalid_argument("max_krylov must be at least 1");
    if (line_axis < 0 || line_axis > 2) throw std::invalid_argument("line_axis must be 0, 1 or 2");
    if (effective_line_shift() <= 2.0 * alpha * beta)
        throw std::invalid_argument("line_shift must exceed 2*alpha*beta");
    if (certificate && !satisfies_dual_bound())
        throw std::invalid_argument("K violates 1/alpha > 8 K2^2 / K");
}

FieldNorms field_norms(const RealScalarField &f) {
    return norms_from_moduli(f.values.cwiseAbs(), f.grid.cell_weight());
}

FieldNorms field_norms(const ComplexScalarField &f) {
    return norms_from_moduli(f.values.cwiseAbs(), f.grid.cell_weight());
}

FieldNorms field_norms(const RealVectorField &f) {
    const VectorXd sq = f.values[0].cwiseAbs2() + f.values[1].cwiseAbs2() + f.values[2].cwiseAbs2();
    return norms_from_moduli(sq.cwiseSqrt(), f.grid.cell_weight());
}

double inner(const RealScalarField &a, const RealScalarField &b) {
    return a.grid.cell_weight() * a.values.dot(b.values);
}

double inner(const ComplexScalarField &a, const ComplexScalarField &b) {
    return a.grid.cell_weight() * a.values.dot(b.values).real();
}

double inner(const RealVectorField &a, const RealVectorField &b) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += a.values[c].dot(b.values[c]);
    return a.grid.cell_weight() * s;
}

RealScalarField restrict_to_inner(const RealScalarField &outer, const NestedGrid &g) {
    require_outer(outer.grid, g);
    RealScalarField r = RealScalarField::zeros(g.inner());
    const auto &map = g.inner_to_outer();
    for (std::size_t p = 0; p < map.size(); ++p) r.values[p] = outer.values[map[p]];
    return r;
}

RealVectorField restrict_to_inner(const RealVectorField &outer, const NestedGrid &g) {
    require_outer(outer.grid, g);
    RealVectorField r = RealVectorField::zeros(g.inner());
    const auto &map = g.inner_to_outer();
    for (int c = 0; c < 3; ++c)
        for (std::size_t p = 0; p < map.size(); ++p) r.values[c][p] = outer.values[c][map[p]];
    return r;
}

RealScalarField extend_by_zero(const RealScalarField &inner, const NestedGrid &g) {
    require_inner(inner.grid, g);
    RealScalarField r = RealScalarField::zeros(g.outer());
    const auto &map = g.inner_to_outer();
    for (std::size_t p = 0; p < map.size(); ++p) r.values[map[p]] = inner.values[p];
    return r;
}

RealVectorField extend_by_zero(const RealVectorField &inner, const NestedGrid &g) {
    require_inner(inner.grid, g);
    RealVectorField r = RealVectorField::zeros(g.outer());
    const auto &map = g.inner_to_outer();
    for (int c = 0; c < 3; ++c)
        for (std::size_t p = 0; p < map.size(); ++p) r.values[c][map[p]] = inner.values[c][p];
    return r;
}

} // namespace glduality
