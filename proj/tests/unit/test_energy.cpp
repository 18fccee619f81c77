#include "glduality/energy.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace glduality;

namespace {

struct Setup {
    GLDomain domain{NestedGrid::centered(4, 8)};
    GLParams params;
    ComplexScalarField phi;
    RealVectorField A, B0;

    explicit Setup(std::uint64_t seed) {
        params.gamma = 0.8;
        params.alpha = 1.3;
        params.beta = 0.9;
        params.rho = 1.1;
        params.K0 = 0.7;
        std::mt19937_64 rng(seed);
        phi = {domain.omega(), testsupport::random_complex(domain.omega().size(), rng)};
        A = testsupport::random_vector_field(domain.outer(), rng, 0.5);
        B0 = testsupport::random_vector_field(domain.outer(), rng, 0.5);
    }
};

} // namespace

TEST_CASE("energy oracles") {
    GLDomain domain(NestedGrid::centered(4, 8));
    GLParams p;
    const auto one = ComplexScalarField::constant(domain.omega(), 1.0);
    auto zero = RealVectorField::zeros(domain.outer());

    CHECK(gl_energy(domain, one, zero, zero, p) == doctest::Approx(0.0));

    SUBCASE("constant potential along x") {
        const double a = 0.6;
        p.rho = 1.5;
        auto A = RealVectorField::zeros(domain.outer());
        A.values[0].setConstant(a);
        // 4 * 5 * 5 edges along x, each with |d_e phi|^2 = rho^2 a^2.
        const double w = domain.omega().cell_weight();
        const GLEnergyTerms t = gl_energy_terms(domain, one, A, zero, p);
        CHECK(t.kinetic == doctest::Approx(0.5 * w * 100.0 * p.rho * p.rho * a * a).epsilon(1e-12));
        CHECK(t.condensation == doctest::Approx(0.0));
        CHECK(t.magnetic == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("magnetic term") {
        p.K0 = 2.0;
        const auto A = testsupport::sample(domain.outer(), [](auto x) { return std::array<double, 3>{0.0, 0.0, x[0]}; });
        const double w1 = domain.outer().cell_weight();
        CHECK(gl_energy_terms(domain, one, A, zero, p).magnetic ==
              doctest::Approx(2.0 * w1 * domain.outer().size()).epsilon(1e-12));
    }

    SUBCASE("condensation of the normal state") {
        const auto z = ComplexScalarField::zeros(domain.omega());
        const double vol = domain.omega().cell_weight() * domain.omega().size();
        CHECK(gl_energy(domain, z, zero, zero, p) == doctest::Approx(0.5 * vol));
    }
}

TEST_CASE("phi residual is the energy gradient") {
    Setup s(5);
    const double w = s.domain.omega().cell_weight();
    const auto r = gl_residual_phi(s.domain, s.phi, s.A, s.params);
    const double h = 1e-6;
    double worst = 0.0;
    for (int p : {0, 17, 62, 124}) {
        for (int part = 0; part < 2; ++part) {
            const Complex dir = part == 0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
            auto plus = s.phi, minus = s.phi;
            plus.values[p] += h * dir;
            minus.values[p] -= h * dir;
            const double fd = (gl_energy(s.domain, plus, s.A, s.B0, s.params) -
                               gl_energy(s.domain, minus, s.A, s.B0, s.params)) / (2.0 * h);
            // d/dt E(phi + t e) = w Re(conj(e) r)
            const double an = w * (std::conj(dir) * r.values[p]).real();
            worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("A residual is the energy gradient") {
    Setup s(9);
    const double w = s.domain.outer().cell_weight();
    const auto r = gl_residual_A(s.domain, s.phi, s.A, s.B0, s.params);
    const double h = 1e-6;
    double worst = 0.0;
    const auto &map = s.domain.grid().inner_to_outer();
    for (int p : {0, map[0], map[31], map[124], 300}) {
        for (int c = 0; c < 3; ++c) {
            auto plus = s.A, minus = s.A;
            plus.values[c][p] += h;
            minus.values[c][p] -= h;
            const double fd = (gl_energy(s.domain, s.phi, plus, s.B0, s.params) -
                               gl_energy(s.domain, s.phi, minus, s.B0, s.params)) / (2.0 * h);
            const double an = w * r.values[c][p];
            worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("energy is nearly gauge invariant") {
    // phi -> exp(i rho c.x) phi, A -> A + c; exact in the continuum, O(d^2) on the grid.
    auto gap = [](int cells) {
        GLDomain domain(NestedGrid::centered(cells, cells + 4));
        GLParams p;
        p.rho = 1.2;
        const std::array<double, 3> c{0.4, -0.3, 0.2};
        ComplexScalarField phi = ComplexScalarField::constant(domain.omega(), 0.9);
        for (int q = 0; q < phi.grid.size(); ++q) {
            const auto x = phi.grid.position(q);
            phi.values[q] *= 1.0 + 0.2 * x[0] * x[1];
        }
        auto A = RealVectorField::zeros(domain.outer());
        auto B0 = RealVectorField::zeros(domain.outer());
        const double e0 = gl_energy(domain, phi, A, B0, p);
        for (int k = 0; k < 3; ++k) A.values[k].setConstant(c[k]);
        for (int q = 0; q < phi.grid.size(); ++q) {
            const auto x = phi.grid.position(q);
            phi.values[q] *= std::polar(1.0, p.rho * (c[0] * x[0] + c[1] * x[1] + c[2] * x[2]));
        }
        return std::abs(gl_energy(domain, phi, A, B0, p) - e0);
    };
    const double coarse = gap(4), fine = gap(8);
    CHECK(coarse < 1e-2);
    CHECK(fine < 0.35 * coarse);
}

TEST_CASE("supercurrent of a plane wave") {
    GLDomain domain(NestedGrid::centered(16, 20));
    GLParams p;
    p.rho = 0.8;
    p.gamma = 1.5;
    const double k = 2.0;
    ComplexScalarField phi = ComplexScalarField::zeros(domain.omega());
    for (int q = 0; q < phi.grid.size(); ++q) phi.values[q] = std::polar(1.0, k * phi.grid.position(q)[0]);
    const auto J = compute_supercurrent(domain, phi, RealVectorField::zeros(domain.outer()), p);
    const auto &map = domain.grid().inner_to_outer();
    const int mid = map[domain.omega().index(8, 8, 8)];
    const double h = domain.omega().spacing();
    CHECK(J.values[0][mid] == doctest::Approx(2.0 * p.rho * p.gamma * std::sin(k * h) / h).epsilon(1e-12));
    CHECK(J.values[0][mid] == doctest::Approx(2.0 * p.rho * p.gamma * k).epsilon(1e-2));
    CHECK(std::abs(J.values[1][mid]) < 1e-12);
    CHECK(J.values[0][0] == 0.0);
}

TEST_CASE("scalar model") {
    GLParams p;
    p.gamma = 0.05;
    const BoxGrid g = BoxGrid::dirichlet_interior(1, 0.0, 1.0, 32);
    RealScalarField f = RealScalarField::zeros(g);
    for (int q = 0; q < g.size(); ++q) f.values[q] = 0.3 * std::sin(3.0 * g.position(q)[0]);

    SUBCASE("residual is the energy gradient") {
        std::mt19937_64 rng(4);
        RealScalarField u{g, testsupport::random_real(g.size(), rng)};
        const auto r = scalar_residual(u, f, p);
        const double h = 1e-6;
        for (int q : {0, 10, 30}) {
            auto a = u, b = u;
            a.values[q] += h;
            b.values[q] -= h;
            const double fd = (scalar_energy(a, f, p) - scalar_energy(b, f, p)) / (2.0 * h);
            CHECK(fd == doctest::Approx(g.cell_weight() * r.values[q]).epsilon(1e-6));
        }
    }

    SUBCASE("newton reaches a critical point and multistart sorts by energy") {
        const auto runs = multistart_scalar(f, p, 4, 123);
        REQUIRE(runs.size() >= 2);
        for (const auto &r : runs) CHECK(r.residual <= 1e-11);
        for (std::size_t i = 1; i < runs.size(); ++i) CHECK(runs[i - 1].energy <= runs[i].energy);
        // The minimiser sits on the well favoured by f > 0.
        const auto &best = runs.front().u;
        CHECK(best.values[g.size() / 2] > 0.5);
    }
}
