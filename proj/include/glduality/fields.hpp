#pragma once

#include "glduality/grid.hpp"

#include <cstdint>

namespace glduality {

/// One real value per node of `grid`.
struct RealScalarField {
    BoxGrid grid;
    VectorXd values;

    static RealScalarField zeros(const BoxGrid &g) { return {g, VectorXd::Zero(g.size())}; }
    static RealScalarField constant(const BoxGrid &g, double c) { return {g, VectorXd::Constant(g.size(), c)}; }
};

/// Complex order parameter sampled on the nodes of Omega.
struct ComplexScalarField {
    BoxGrid grid;
    VectorXcd values;

    static ComplexScalarField zeros(const BoxGrid &g) { return {g, VectorXcd::Zero(g.size())}; }
    static ComplexScalarField constant(const BoxGrid &g, Complex c) {
        return {g, VectorXcd::Constant(g.size(), c)};
    }
    VectorXd modulus_squared() const { return values.cwiseAbs2(); }
};

/// Three real components per node (vector potential, applied field, currents).
struct RealVectorField {
    BoxGrid grid;
    Components values;

    static RealVectorField zeros(const BoxGrid &g) {
        return {g, {VectorXd::Zero(g.size()), VectorXd::Zero(g.size()), VectorXd::Zero(g.size())}};
    }
    VectorXd stacked() const { return stack(values); }
    static RealVectorField from_stacked(const BoxGrid &g, const VectorXd &v) { return {g, unstack(v)}; }
};

/// Throws std::invalid_argument naming `what` if a value is NaN/inf or the size is off.
void require_valid(const RealScalarField &f, const char *what);
void require_valid(const ComplexScalarField &f, const char *what);
void require_valid(const RealVectorField &f, const char *what);

/// Weight of the magnetic term ||curl A - B0||^2.
enum class MagneticNormalization { Coupling, Gaussian };

struct GLParams {
    double gamma = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    double rho = 1.0;
    double K0 = 1.0;
    MagneticNormalization magnetic = MagneticNormalization::Coupling;

    double K = 32.0;  // shift of the difference-of-convex split
    double K2 = 1.5;  // bound on |phi| at certified points

    // Shift of the method-of-lines linearisation; <= 0 selects 4*alpha*beta.
    double line_shift = 0.0;
    int line_axis = 0;
    double linear_tol = 1e-10;
    int max_krylov = 400;

    double outer_tol = 1e-7;
    int max_outer = 200;
    double damping = 1.0;

    /// K0, or 1/(8 pi) under the Gaussian normalization.
    double magnetic_weight() const;
    double effective_line_shift() const { return line_shift > 0.0 ? line_shift : 4.0 * alpha * beta; }

    /// Checks the model constants; with `certificate` also requires 1/alpha > 8 K2^2 / K.
    void validate(bool certificate = false) const;
    bool satisfies_dual_bound() const { return 1.0 / alpha > 8.0 * K2 * K2 / K; }

    bool operator==(const GLParams &) const = default;
};

struct FieldNorms {
    double l2 = 0.0;
    double l4 = 0.0;
    double sup = 0.0;
};

/// Rectangle-rule norms with weight d^dim per node; vector fields use the pointwise Euclidean length.
FieldNorms field_norms(const RealScalarField &f);
FieldNorms field_norms(const ComplexScalarField &f);
FieldNorms field_norms(const RealVectorField &f);

/// Rectangle-rule inner products. The complex pairing is Re sum conj(g) h.
double inner(const RealScalarField &a, const RealScalarField &b);
double inner(const ComplexScalarField &a, const ComplexScalarField &b);
double inner(const RealVectorField &a, const RealVectorField &b);

RealScalarField restrict_to_inner(const RealScalarField &outer, const NestedGrid &g);
RealVectorField restrict_to_inner(const RealVectorField &outer, const NestedGrid &g);
RealScalarField extend_by_zero(const RealScalarField &inner, const NestedGrid &g);
RealVectorField extend_by_zero(const RealVectorField &inner, const NestedGrid &g);

} // namespace glduality
