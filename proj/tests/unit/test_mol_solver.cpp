#include "glduality/mol_solver.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace glduality;

namespace {

FrozenCoefficients random_snapshot(const GLDomain &domain, std::uint64_t seed, double a_scale) {
    std::mt19937_64 rng(seed);
    FrozenCoefficients f{{domain.omega(), testsupport::random_complex(domain.omega().size(), rng, 0.5)},
                         testsupport::random_vector_field(domain.outer(), rng, a_scale)};
    return f;
}

} // namespace

TEST_CASE("boundary matrices") {
    GLDomain domain(NestedGrid::centered(4, 8));
    GLParams p;
    const auto zero = RealVectorField::zeros(domain.outer());
    auto H = boundary_matrices(domain, zero, p);
    CHECK((H.H1.array() - 1.0).abs().maxCoeff() == 0.0);
    CHECK((H.H2.array() - 1.0).abs().maxCoeff() == 0.0);

    // A.n = a on both end planes: A_x = -a at the first plane and +a at the last.
    const double a = 0.3;
    p.rho = 1.7;
    auto A = testsupport::sample(domain.outer(), [&](auto x) {
        return std::array<double, 3>{2.0 * a * x[0], 0.0, 0.0};  // x = -1/2 and +1/2 on the end planes
    });
    H = boundary_matrices(domain, A, p);
    const double d = domain.omega().spacing();
    CHECK(std::abs(H.H1[0] - Complex(1.0, p.rho * d * a)) < 1e-15);
    CHECK(std::abs(H.H2[3] - Complex(1.0, p.rho * d * a)) < 1e-15);
    // covariant Neumann ghost: (phi_0 - phi_1)/d - i rho (A.n) phi_1 = 0
    const Complex phi1(0.4, -0.2);
    const Complex phi0 = H.H1[0] * phi1;
    CHECK(std::abs((phi0 - phi1) / d - Complex(0.0, p.rho * a) * phi1) < 1e-14);

    p.rho = 0.0;
    H = boundary_matrices(domain, A, p);
    CHECK((H.H1.array() - 1.0).abs().maxCoeff() == 0.0);
}

TEST_CASE("forward recursion on a scalar surrogate") {
    const VectorXcd H1 = VectorXcd::Zero(1);
    const LineRecursion r = forward_sweep(H1, 0.0, 3);
    CHECK(r.a[0][0] == Complex(0.5, 0.0));
    CHECK(r.b[0][0] == Complex(0.5, 0.0));
    CHECK(std::abs(r.a[1][0] - 2.0 / 3.0) < 1e-15);
    CHECK(std::abs(r.b[1][0] - 1.0) < 1e-15);

    const LineRecursion s = forward_sweep(H1, 1.0, 2);
    CHECK(std::abs(s.a[0][0] - 1.0 / 3.0) < 1e-15);
    CHECK(std::abs(s.a[1][0] - 3.0 / 8.0) < 1e-15);

    // E_2 = a_2 b_1 (tau_1 - tau_2), E_3 = a_3 (b_2 (tau_2 - tau_3) + E_2)
    const std::vector<VectorXcd> tau{VectorXcd::Constant(1, 1.0), VectorXcd::Constant(1, 4.0),
                                     VectorXcd::Constant(1, 2.0)};
    const auto E = affine_terms(r, tau);
    CHECK(E[0][0] == Complex(0.0, 0.0));
    CHECK(std::abs(E[1][0] - (2.0 / 3.0) * 0.5 * (1.0 - 4.0)) < 1e-15);
    const Complex a3 = r.a[2][0];
    CHECK(std::abs(E[2][0] - a3 * (1.0 * (4.0 - 2.0) + E[1][0])) < 1e-15);

    CHECK_THROWS_AS(forward_sweep(VectorXcd::Constant(1, 2.0), 0.0, 2), std::runtime_error);
}

TEST_CASE("T_n reproduces the energy gradient at the snapshot") {
    GLDomain domain(NestedGrid::centered(6, 10));
    GLParams p;
    p.gamma = 0.7;
    p.rho = 1.3;
    const auto frozen = random_snapshot(domain, 31, 0.6);
    const MethodOfLines mol(domain, frozen, p);
    // T_n(phi_hat_n) = K phi_hat_n - res_n + gamma (L^H phi_hat)_n
    const auto res = gl_residual_phi(domain, frozen.phi_hat, frozen.A0, p);
    const double d = domain.omega().spacing();
    const double K = p.effective_line_shift();
    const auto &H = mol.boundary();
    double worst = 0.0;
    for (int n = 1; n <= mol.lines(); ++n) {
        const VectorXcd cur = mol.line_values(frozen.phi_hat, n);
        const VectorXcd prev = n > 1 ? mol.line_values(frozen.phi_hat, n - 1) : VectorXcd(H.H1.cwiseProduct(cur));
        const VectorXcd next =
            n < mol.lines() ? mol.line_values(frozen.phi_hat, n + 1) : VectorXcd(H.H2.cwiseProduct(cur));
        const VectorXcd expected =
            K * cur - mol.line_values(res, n) + p.gamma * (2.0 * cur - prev - next) / (d * d);
        worst = std::max(worst, (mol.assemble_T(n, cur) - expected).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);

    const FrozenCoefficients zero{ComplexScalarField::zeros(domain.omega()), RealVectorField::zeros(domain.outer())};
    const MethodOfLines z(domain, zero, p);
    CHECK(z.assemble_T(2, VectorXcd::Zero(z.section_size())).norm() == 0.0);
    CHECK_THROWS_AS(z.assemble_T(0, VectorXcd::Zero(z.section_size())), std::out_of_range);
}

TEST_CASE("line equations hold after the solve") {
    GLDomain domain(NestedGrid::centered(12, 16));
    GLParams p;
    p.rho = 1.0;
    const auto frozen = random_snapshot(domain, 5, 0.5);
    const MethodOfLines mol(domain, frozen, p);
    MolStats stats;
    const auto phi = mol.solve(&stats);
    CHECK(stats.converged);
    CHECK(stats.line_residual <= 1e-8);
    CHECK(mol.recursion().max_abs_a <= 1.0);
    MESSAGE("sweeps: " << stats.sweeps << ", line residual " << stats.line_residual);

    SUBCASE("fixed point of one more sweep") {
        const auto again = mol.sweep(phi);
        CHECK((again.values - phi.values).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("critical snapshots are reproduced") {
    GLDomain domain(NestedGrid::centered(6, 10));
    GLParams p;
    p.beta = 2.0;
    const FrozenCoefficients f{ComplexScalarField::constant(domain.omega(), std::sqrt(2.0)),
                               RealVectorField::zeros(domain.outer())};
    const auto phi = MethodOfLines(domain, f, p).solve();
    CHECK((phi.values.array() - std::sqrt(2.0)).abs().maxCoeff() < 1e-9);

    // rotating the snapshot's phase rotates the output
    const Complex rot = std::polar(1.0, 0.7);
    const FrozenCoefficients g{{domain.omega(), rot * f.phi_hat.values}, f.A0};
    const auto psi = MethodOfLines(domain, g, p).solve();
    CHECK((psi.values - rot * phi.values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("real data give a real solution") {
    GLDomain domain(NestedGrid::centered(6, 10));
    GLParams p;
    std::mt19937_64 rng(3);
    FrozenCoefficients f{{domain.omega(), VectorXcd(testsupport::random_real(domain.omega().size(), rng).cast<Complex>())},
                         RealVectorField::zeros(domain.outer())};
    const auto phi = MethodOfLines(domain, f, p).solve();
    CHECK(phi.values.imag().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("line axis is configurable") {
    GLDomain domain(NestedGrid::centered(6, 10));
    GLParams p;
    const auto frozen = random_snapshot(domain, 8, 0.4);
    for (int axis : {1, 2}) {
        p.line_axis = axis;
        const MethodOfLines mol(domain, frozen, p);
        MolStats stats;
        mol.solve(&stats);
        CHECK(stats.converged);
        CHECK(stats.line_residual <= 1e-8);
    }
}
