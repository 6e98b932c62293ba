#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "support/dense_reference.hpp"
#include "thetacq/fem1d.hpp"

using thetacq::AssembledSpace;
using thetacq::GridFunction;
using thetacq::Mesh1D;
using thetacq::TridiagonalMatrix;

TEST_CASE("assembly produces the standard P1 matrices") {
    SECTION("single element pair on h = 1") {
        const AssembledSpace s = thetacq::assemble(Mesh1D(0.0, 2.0, 1));
        REQUIRE(s.mass.diag.size() == 1);
        CHECK_THAT(s.mass.diag[0], Catch::Matchers::WithinRel(2.0 / 3.0, 1e-15));
        CHECK_THAT(s.stiffness.diag[0], Catch::Matchers::WithinRel(2.0, 1e-15));
    }

    SECTION("M = 3, h = 0.25") {
        const AssembledSpace s = thetacq::assemble(Mesh1D(0.0, 1.0, 3));
        CHECK_THAT(s.mass.diag[1], Catch::Matchers::WithinRel(2.0 * 0.25 / 3.0, 1e-15));
        CHECK_THAT(s.mass.off[0], Catch::Matchers::WithinRel(0.25 / 6.0, 1e-15));
        CHECK_THAT(s.stiffness.diag[2], Catch::Matchers::WithinRel(8.0, 1e-15));
        CHECK_THAT(s.stiffness.off[1], Catch::Matchers::WithinRel(-4.0, 1e-15));
    }

    SECTION("constants are in the kernel of the interior stiffness stencil") {
        const AssembledSpace s = thetacq::assemble(Mesh1D(0.0, 1.0, 9));
        const GridFunction ones(9, 1.0);
        const GridFunction y = s.stiffness.apply(ones);
        for (std::size_t i = 1; i + 1 < y.size(); ++i) CHECK(std::abs(y[i]) < 1e-13);
        CHECK(y.front() > 0.0);  // boundary rows feel the Dirichlet condition
        CHECK(y.back() > 0.0);
    }
}

TEST_CASE("both assembled matrices factor with positive pivots") {
    for (std::size_t m : {1u, 2u, 17u, 256u}) {
        const AssembledSpace s = thetacq::assemble(Mesh1D(-1.0, 3.0, m));
        const GridFunction rhs(m, 1.0);
        CHECK_NOTHROW(thetacq::solve_tridiagonal(s.mass, rhs));
        CHECK_NOTHROW(thetacq::solve_tridiagonal(s.stiffness, rhs));
    }
}

TEST_CASE("thomas solve matches the dense oracle") {
    SECTION("identity maps rhs to itself") {
        TridiagonalMatrix id{std::vector<double>(5, 1.0), std::vector<double>(4, 0.0)};
        const GridFunction rhs{1.0, -2.0, 3.0, 0.5, 4.0};
        CHECK(thetacq::solve_tridiagonal(id, rhs) == rhs);
    }

    SECTION("random diagonally dominant SPD systems") {
        std::mt19937 rng(7u);
        std::uniform_real_distribution<double> off_dist(-1.0, 1.0);
        std::uniform_real_distribution<double> size_dist(0.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t m = 2 + static_cast<std::size_t>(size_dist(rng) * 198);
            TridiagonalMatrix T{std::vector<double>(m), std::vector<double>(m - 1)};
            for (auto& v : T.off) v = off_dist(rng);
            for (std::size_t i = 0; i < m; ++i) {
                double row = 0.0;
                if (i > 0) row += std::abs(T.off[i - 1]);
                if (i + 1 < m) row += std::abs(T.off[i]);
                T.diag[i] = row + 0.5 + size_dist(rng);
            }
            GridFunction rhs(m);
            for (auto& v : rhs) v = off_dist(rng);

            const GridFunction x = thetacq::solve_tridiagonal(T, rhs);
            const GridFunction ref = thetacq::testing::dense_solve_tridiagonal(T, rhs);
            double rel = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                rel = std::max(rel, std::abs(x[i] - ref[i]));
                scale = std::max(scale, std::abs(ref[i]));
            }
            INFO("trial " << trial << " m=" << m);
            REQUIRE(rel <= 1e-12 * std::max(scale, 1.0));
        }
    }

    SECTION("discrete Poisson problem against the dense oracle") {
        const Mesh1D mesh(0.0, 1.0, 3);
        const AssembledSpace s = thetacq::assemble(mesh);
        GridFunction f(3);
        for (std::size_t i = 0; i < 3; ++i) f[i] = std::sin(mesh.node(i));
        const GridFunction rhs = s.mass.apply(f);
        const GridFunction x = thetacq::solve_tridiagonal(s.stiffness, rhs);
        const GridFunction ref = thetacq::testing::dense_solve_tridiagonal(s.stiffness, rhs);
        for (std::size_t i = 0; i < 3; ++i) CHECK_THAT(x[i], Catch::Matchers::WithinRel(ref[i], 1e-12));
    }

    SECTION("an indefinite matrix is rejected") {
        TridiagonalMatrix bad{{1.0, -1.0, 1.0}, {0.0, 0.0}};
        CHECK_THROWS_AS(thetacq::solve_tridiagonal(bad, GridFunction(3, 1.0)), std::domain_error);
    }
}

TEST_CASE("L2 projection") {
    const Mesh1D mesh(0.0, 1.0, 7);

    SECTION("zero projects to zero") {
        const GridFunction x = thetacq::l2_project(mesh, [](double) { return 0.0; });
        for (double v : x) CHECK(std::abs(v) < 1e-15);
    }

    SECTION("members of the space are reproduced (hat function)") {
        const std::size_t k = 3;
        const double h = mesh.h();
        auto hat = [&](double x) {
            const double d = std::abs(x - mesh.node(k));
            return d < h ? 1.0 - d / h : 0.0;
        };
        const GridFunction x = thetacq::l2_project(mesh, hat);
        for (std::size_t i = 0; i < x.size(); ++i) {
            INFO("i=" << i);
            REQUIRE(std::abs(x[i] - (i == k ? 1.0 : 0.0)) < 1e-13);
        }
    }

    SECTION("idempotence on a generic member of the space") {
        std::mt19937 rng(99u);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        GridFunction nodal(mesh.interior);
        for (auto& v : nodal) v = dist(rng);
        const double h = mesh.h();
        auto p1 = [&](double x) {
            const double s = (x - mesh.a) / h;
            const auto e = static_cast<std::size_t>(std::min(s, static_cast<double>(mesh.interior)));
            const double t = s - static_cast<double>(e);
            const double ul = e > 0 ? nodal[e - 1] : 0.0;
            const double ur = e < mesh.interior ? nodal[e] : 0.0;
            return ul * (1.0 - t) + ur * t;
        };
        const GridFunction x = thetacq::l2_project(mesh, p1);
        for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(std::abs(x[i] - nodal[i]) < 1e-12);
    }
}

TEST_CASE("indicator projection uses exact piecewise loads") {
    const Mesh1D mesh(0.0, 1.0, 7);  // h = 1/8, the jump at 1/2 sits on node 3
    const AssembledSpace s = thetacq::assemble(mesh);
    const GridFunction x = thetacq::l2_project_indicator(mesh, 0.0, 0.5);
    const GridFunction load = s.mass.apply(x);
    const double h = mesh.h();
    const std::vector<double> expected = {h, h, h, h / 2.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < expected.size(); ++i) {
        INFO("i=" << i);
        REQUIRE_THAT(load[i], Catch::Matchers::WithinAbs(expected[i], 1e-15));
    }

    SECTION("jump inside an element splits the load exactly") {
        const GridFunction y = thetacq::l2_project_indicator(mesh, 0.0, 0.4375);  // 3.5 h
        const GridFunction l2 = s.mass.apply(y);
        // element (3h,4h) is half covered: ascending hat of node 2 integrates to
        // h/2 * (0.5+1)/2 ... computed by hand with the trapezoid on [3h, 3.5h]
        CHECK_THAT(l2[2], Catch::Matchers::WithinAbs(h + 0.5 * h * 0.5 * (1.0 + 0.5), 1e-15));
        CHECK_THAT(l2[3], Catch::Matchers::WithinAbs(0.5 * h * 0.5 * (0.0 + 0.5), 1e-15));
    }

    CHECK_THROWS_AS(thetacq::l2_project_indicator(mesh, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("Ritz projection") {
    SECTION("members of the space are reproduced") {
        const Mesh1D mesh(0.0, 1.0, 7);
        // continuous piecewise linear spike around node 3
        const double h = mesh.h();
        auto dv = [&](double x) {
            if (x < mesh.node(2) || x > mesh.node(4)) return 0.0;
            return x < mesh.node(3) ? 1.0 / h : -1.0 / h;
        };
        const GridFunction x = thetacq::ritz_project(mesh, dv);
        for (std::size_t i = 0; i < x.size(); ++i) {
            INFO("i=" << i);
            REQUIRE(std::abs(x[i] - (i == 3 ? 1.0 : 0.0)) < 1e-12);
        }
    }

    SECTION("zero maps to zero") {
        const Mesh1D mesh(0.0, 1.0, 5);
        const GridFunction x = thetacq::ritz_project(mesh, [](double) { return 0.0; });
        for (double v : x) CHECK(std::abs(v) < 1e-15);
    }

    SECTION("sine on (0, pi): nodally exact, L2 error falls at second order") {
        double prev_l2 = 0.0;
        for (std::size_t m : {31u, 63u, 127u}) {
            const Mesh1D mesh(0.0, std::numbers::pi, m);
            const GridFunction x = thetacq::ritz_project(mesh, [](double t) { return std::cos(t); });
            double nodal_dev = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                nodal_dev = std::max(nodal_dev, std::abs(x[i] - std::sin(mesh.node(i))));
            // the 1D Ritz projection interpolates at the nodes; only quadrature
            // and solver noise remains, far below the O(h^2) scale
            CHECK(nodal_dev < 1e-10);

            const double l2 = thetacq::l2_error(mesh, x, [](double t) { return std::sin(t); });
            if (prev_l2 > 0.0) CHECK_THAT(prev_l2 / l2, Catch::Matchers::WithinAbs(4.0, 0.4));
            prev_l2 = l2;
        }
    }

    SECTION("Galerkin orthogonality at quadrature level") {
        const Mesh1D mesh(0.0, std::numbers::pi, 63);
        const AssembledSpace s = thetacq::assemble(mesh);
        const GridFunction x = thetacq::ritz_project(mesh, [](double t) { return std::cos(t); });
        // b_i - (A x)_i = \int (v - v_h)' phi_i'
        const double h = mesh.h();
        GridFunction b(mesh.interior, 0.0);
        for (std::size_t e = 0; e < mesh.elements(); ++e) {
            const double xl = mesh.a + static_cast<double>(e) * h;
            double integral = 0.0;
            for (int q = 0; q < 4; ++q)
                integral += thetacq::quadrature::weights[q] * 0.5 * h *
                            std::cos(xl + 0.5 * h * (1.0 + thetacq::quadrature::nodes[q]));
            if (e > 0) b[e - 1] -= integral / h;
            if (e < mesh.interior) b[e] += integral / h;
        }
        const GridFunction ax = s.stiffness.apply(x);
        for (std::size_t i = 0; i < b.size(); ++i) REQUIRE(std::abs(b[i] - ax[i]) <= 1e-10);
    }
}

TEST_CASE("l2_error semantics") {
    const Mesh1D mesh(0.0, std::numbers::pi, 63);

    SECTION("interpolant of a piecewise linear function is exact") {
        // tent over the whole interval; its kink at pi/2 sits on a node
        GridFunction u(mesh.interior);
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double x = mesh.node(i);
            u[i] = std::min(x - mesh.a, mesh.b - x);
        }
        auto tent = [&](double x) { return std::min(x - mesh.a, mesh.b - x); };
        CHECK(thetacq::l2_error(mesh, u, tent) < 1e-14);
    }

    SECTION("zero against sin has norm sqrt(pi/2)") {
        const GridFunction zero(mesh.interior, 0.0);
        const double err = thetacq::l2_error(mesh, zero, [](double x) { return std::sin(x); });
        CHECK_THAT(err, Catch::Matchers::WithinRel(std::sqrt(std::numbers::pi / 2.0), 1e-10));
        CHECK_THAT(err, Catch::Matchers::WithinAbs(1.2533, 1e-4));
    }

    SECTION("homogeneity") {
        GridFunction u(mesh.interior);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::cos(mesh.node(i));
        auto f = [](double x) { return std::sin(2.0 * x); };
        auto f2 = [](double x) { return 2.0 * std::sin(2.0 * x); };
        GridFunction u2 = u;
        for (double& v : u2) v *= 2.0;
        CHECK_THAT(thetacq::l2_error(mesh, u2, f2),
                   Catch::Matchers::WithinRel(2.0 * thetacq::l2_error(mesh, u, f), 1e-13));
    }
}

TEST_CASE("mass norm agrees with the quadrature L2 norm for P1 data") {
    const Mesh1D mesh(0.0, 1.0, 31);
    const AssembledSpace s = thetacq::assemble(mesh);
    GridFunction u(mesh.interior);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(3.0 * mesh.node(i));
    const double via_mass = thetacq::mass_norm(s.mass, u);
    const double via_quadrature = thetacq::l2_error(mesh, u, [](double) { return 0.0; });
    CHECK_THAT(via_mass, Catch::Matchers::WithinRel(via_quadrature, 1e-12));
}

TEST_CASE("discrete sine eigenvalue matches the assembled matrices") {
    const Mesh1D mesh(0.0, std::numbers::pi, 127);
    const AssembledSpace s = thetacq::assemble(mesh);
    GridFunction sine(mesh.interior);
    for (std::size_t i = 0; i < sine.size(); ++i) sine[i] = std::sin(mesh.node(i));
    const double lambda = thetacq::discrete_sine_eigenvalue(mesh);
    const GridFunction a = s.stiffness.apply(sine);
    const GridFunction mb = s.mass.apply(sine);
    for (std::size_t i = 0; i < sine.size(); ++i) {
        INFO("i=" << i);
        REQUIRE_THAT(a[i], Catch::Matchers::WithinRel(lambda * mb[i], 1e-11));
    }
    CHECK_THAT(lambda, Catch::Matchers::WithinAbs(1.0, 1e-4));
}

TEST_CASE("mesh validation") {
    CHECK_THROWS_AS(Mesh1D(1.0, 0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(Mesh1D(0.0, 1.0, 0), std::invalid_argument);
}
