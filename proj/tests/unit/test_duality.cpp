#include "glduality/duality.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace glduality;

namespace {

RealScalarField sine_load(const BoxGrid &g, double amp) {
    RealScalarField f = RealScalarField::zeros(g);
    for (int q = 0; q < g.size(); ++q) f.values[q] = amp * std::sin(std::numbers::pi * g.position(q)[0]);
    return f;
}

} // namespace

TEST_CASE("K selection") {
    CHECK(select_K(1.0, 1.5) == 32.0);
    CHECK(select_K(0.1, 1.5) == 2.0);
    CHECK(amplitude_bound(0.2, 1.0) == doctest::Approx(1.5));
    CHECK(amplitude_bound(2.0, 1.0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(select_K(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("scalar conjugates on three nodes") {
    // Interior nodes 1/4, 1/2, 3/4 (d = w = 1/4); sin(pi x) is an eigenvector of L.
    const BoxGrid g = BoxGrid::dirichlet_interior(1, 0.0, 1.0, 4);
    REQUIRE(g.size() == 3);
    GLParams p;
    p.gamma = 0.5;
    p.K = 4.0;
    const double lambda = 64.0 * std::pow(std::sin(std::numbers::pi / 8.0), 2);
    const RealScalarField v1 = sine_load(g, 3.0);
    const double norm2 = 9.0 * 2.0;  // 9 (1/2 + 1 + 1/2)
    CHECK(scalar_F_star(v1, p) == doctest::Approx(0.125 * norm2 / (p.gamma * lambda + p.K)));

    const RealScalarField c3 = RealScalarField::constant(g, 3.0);
    const RealScalarField v0 = RealScalarField::constant(g, 0.5);
    const RealScalarField f = RealScalarField::constant(g, 1.0);
    // per node: -(1/2)(v1-f)^2/(2v0-K) - v0^2/(2 alpha) - beta v0 with 2 v0 - K = -3
    const double per_node = 0.5 * 4.0 / 3.0 - 0.125 - 0.5;
    CHECK(scalar_G_star(c3, v0, f, p) == doctest::Approx(0.25 * 3.0 * per_node));
    CHECK(scalar_dual(c3, v0, f, p) ==
          doctest::Approx(-scalar_F_star(c3, p) + scalar_G_star(c3, v0, f, p)));

    const RealScalarField bad = RealScalarField::constant(g, 2.0);
    CHECK_THROWS_AS(scalar_G_star(c3, bad, f, p), std::domain_error);
}

TEST_CASE("scalar certificate at the minimiser") {
    GLParams p;
    p.gamma = 0.05;
    const BoxGrid g = BoxGrid::dirichlet_interior(1, 0.0, 1.0, 32);
    REQUIRE(g.size() == 31);
    const RealScalarField f = sine_load(g, 0.1);
    const auto run = minimize_scalar(RealScalarField::constant(g, 1.0), f, p);
    REQUIRE(run.converged);
    p.K2 = amplitude_bound(run.u.values.cwiseAbs().maxCoeff(), p.beta);
    p.K = select_K(p.alpha, p.K2);

    const DualCertificate c = certify_scalar(run.u, f, p);
    CHECK(c.gap <= 1e-8 * (1.0 + std::abs(c.primal)));
    CHECK(c.stationarity_v1 <= 1e-6);
    CHECK(c.stationarity_v0 <= 1e-6);
    CHECK(c.multiplier_agreement <= 1e-8);
    CHECK(c.e_box);
    CHECK(c.dual_bound);
    CHECK(c.amplitude_ok);
    CHECK(c.b_plus);
    CHECK(c.min_second_variation > 0.0);

    RealScalarField off = run.u;
    off.values[5] += 0.1;
    CHECK_THROWS_AS(certify_scalar(off, f, p), CertificateError);
}

TEST_CASE("scalar certificate at the trivial point") {
    GLParams p;
    p.gamma = 0.05;
    const BoxGrid g = BoxGrid::dirichlet_interior(1, 0.0, 1.0, 16);
    const auto zero = RealScalarField::zeros(g);
    const DualCertificate c = certify_scalar(zero, zero, p);
    CHECK(c.primal == doctest::Approx(0.5 * p.alpha * p.beta * p.beta * g.size() * g.cell_weight()));
    CHECK(c.gap <= 1e-12);
    // u = 0 is a local maximum of the double well.
    CHECK_FALSE(c.b_plus);
}

TEST_CASE("sign alignment") {
    const BoxGrid g = BoxGrid::dirichlet_interior(1, 0.0, 1.0, 8);
    std::mt19937_64 rng(3);
    const RealScalarField u{g, testsupport::random_real(g.size(), rng)};
    const RealScalarField f{g, testsupport::random_real(g.size(), rng)};
    const RealScalarField s = sign_align(u, f);
    for (int q = 0; q < g.size(); ++q) {
        CHECK(s.values[q] * f.values[q] >= 0.0);
        CHECK(std::abs(s.values[q]) == std::abs(u.values[q]));
    }
    CHECK(inner(s, f) >= inner(u, f));
    CHECK(sign_align(s, f).values == s.values);
}

TEST_CASE("H diagnostic") {
    GLParams p;
    p.gamma = 0.05;
    const BoxGrid g = BoxGrid::dirichlet_interior(1, 0.0, 1.0, 32);
    const auto big = RealScalarField::constant(g, 1.0);
    const auto d = scalar_H(big, p);
    CHECK(d.pointwise.minCoeff() == doctest::Approx(std::sqrt(6.0)));
    CHECK(d.operator_root <= std::sqrt(2.0));
    CHECK(d.surrogate_positive);
    CHECK(d.b_plus);
    const auto small = scalar_H(RealScalarField::zeros(g), p);
    CHECK_FALSE(small.surrogate_positive);
    CHECK_FALSE(small.b_plus);
    CHECK(small.min_eigenvalue < 0.0);
}

TEST_CASE("sparse minimum eigenvalue by inertia") {
    const BoxGrid g = BoxGrid::dirichlet_interior(1, 0.0, 1.0, 2500);
    const RealOperator L = build_laplacian(g, BoundaryKind::DirichletZero);
    const double d = g.spacing();
    const double exact = 4.0 / (d * d) * std::pow(std::sin(std::numbers::pi * d / 2.0), 2);
    CHECK(min_eigenvalue(L.matrix) == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("GL certificate at the uniform state") {
    GLDomain domain(NestedGrid::centered(4, 8));
    GLParams p;
    const auto phi = ComplexScalarField::constant(domain.omega(), std::polar(1.0, 0.4));
    const auto zero = RealVectorField::zeros(domain.outer());
    const DualCertificate c = certify_gl(domain, phi, zero, zero, p);
    CHECK(c.primal == doctest::Approx(0.0));
    CHECK(c.gap <= 1e-12);
    CHECK(c.stationarity_v1 <= 1e-6);
    CHECK(c.stationarity_v0 <= 1e-6);
    CHECK(c.e_box);
    CHECK(c.b_plus);
    CHECK(c.min_second_variation > 0.0);
    REQUIRE(c.min_dual_hessian);
    CHECK(*c.min_dual_hessian_full <= *c.min_dual_hessian + 1e-12);
}

TEST_CASE("GL certificate at a descended point with a field") {
    GLDomain domain(NestedGrid::centered(4, 8));
    GLParams p;
    p.gamma = 0.2;
    std::mt19937_64 rng(9);
    const auto A = testsupport::random_vector_field(domain.outer(), rng, 0.3);
    const auto B0 = RealVectorField::zeros(domain.outer());
    const auto ms = gl_multistart(domain, A, B0, p, 2, 5);
    REQUIRE_FALSE(ms.energies.empty());
    const DualCertificate c = certify_gl(domain, ms.best, A, B0, p);
    CHECK(c.gap <= 1e-8 * (1.0 + std::abs(c.primal)));
    CHECK(c.stationarity_v1 <= 1e-6);
    CHECK(c.stationarity_v0 <= 1e-6);
    CHECK(c.min_second_variation >= -1e-9);
    // Any other start reaches no lower energy than the certified point.
    CHECK(ms.energies.front() >= c.primal - 1e-9);

    auto off = ms.best;
    off.values[3] += 0.2;
    CHECK_THROWS_AS(certify_gl(domain, off, A, B0, p), CertificateError);
}

TEST_CASE("double well conjugate") {
    const double alpha = 1.3, beta = 0.7;
    for (double K : {0.5, 3.0}) {
        for (double s : {-4.0, -0.3, 0.0, 0.2, 2.5}) {
            const auto pc = double_well_conjugate(s, alpha, beta, K);
            double scan = -1e300;
            for (int i = -200000; i <= 200000; ++i) {
                const double t = 1e-5 * i;
                const double m = t * t - beta;
                scan = std::max(scan, t * s - 0.5 * alpha * m * m - 0.5 * K * t * t);
            }
            CHECK(pc.value == doctest::Approx(scan).epsilon(1e-9));
            CHECK(2.0 * alpha * std::pow(pc.argmax, 3) + (K - 2.0 * alpha * beta) * pc.argmax ==
                  doctest::Approx(s));
        }
    }
}

TEST_CASE("Fenchel-Young for the conjugate pair") {
    const double alpha = 1.0, beta = 1.0, K = 2.0;
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal(0.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        const double t = normal(rng), s = normal(rng);
        const double m = t * t - beta;
        const double g = 0.5 * alpha * m * m + 0.5 * K * t * t;
        CHECK(g + double_well_conjugate(s, alpha, beta, K).value >= t * s - 1e-12);
    }
}

TEST_CASE("difference-of-convex dual has no gap at any point") {
    GLParams p;
    p.gamma = 0.05;
    const BoxGrid g = BoxGrid::dirichlet_interior(1, 0.0, 1.0, 24);
    const double K = dc_default_K(g, p);
    CHECK(K == doctest::Approx(2.0 * p.gamma * 4.0 * 24.0 * 24.0));
    const RealScalarField f = sine_load(g, 0.1);
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 3; ++trial) {
        const RealScalarField u{g, testsupport::random_real(g.size(), rng)};
        const auto c = certify_toland(u, f, p, K);
        CHECK(c.gap <= 1e-9 * (1.0 + std::abs(c.primal)));
        // Perturbed multipliers only lower the dual.
        RealScalarField v = c.v, z = c.z;
        v.values[4] += 0.3;
        z.values[7] -= 0.2;
        CHECK(toland_dual(u, v, c.z, f, p, K) <= c.primal + 1e-12);
        CHECK(toland_dual(u, c.v, z, f, p, K) >= c.primal - 1e-12);
    }
    CHECK_THROWS_AS(dc_F_star(f, p, 1.0), std::invalid_argument);
}
