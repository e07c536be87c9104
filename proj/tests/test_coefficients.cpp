#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>

#include <curlfem/coefficients.hpp>
#include <curlfem/quadrature.hpp>

using namespace curlfem;
using Catch::Approx;

TEST_CASE("purely imaginary mu with unit kappa", "[coefficients]") {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    const MaterialParams p = estimate_params(CoefficientField::constant({0.0, 1.0}), CoefficientField::constant(1.0),
                                             *mesh, mesh->diameter());
    CHECK(p.theta == Approx(-kPi / 4.0));
    CHECK(p.mu_lower == Approx(std::sqrt(0.5)));
    CHECK(p.kappa_lower == Approx(std::sqrt(0.5)));
    CHECK(p.policy == ThetaPolicy::ArgumentRange);
}

TEST_CASE("unit coefficients", "[coefficients]") {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    const Real ell = mesh->diameter();
    const MaterialParams p =
        estimate_params(CoefficientField::constant(1.0), CoefficientField::constant(1.0), *mesh, ell);
    CHECK(p.theta == 0.0);
    CHECK(p.mu_lower == 1.0);
    CHECK(p.kappa_lower == 1.0);
    CHECK(p.mu_upper == 1.0);
    CHECK(p.reynolds == Approx(ell * ell));
    CHECK(p.reynolds_hat == Approx(3.0));
}

TEST_CASE("collinear opposite coefficients are not coercive", "[coefficients]") {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    CHECK_THROWS_AS(estimate_params(CoefficientField::constant(-1.0), CoefficientField::constant(1.0), *mesh,
                                    mesh->diameter()),
                    NonCoerciveError);
    CHECK_THROWS_AS(estimate_params(CoefficientField::constant(-2.0 * kPi * kPi), CoefficientField::constant(1.0),
                                    *mesh, mesh->diameter()),
                    NonCoerciveError);
    CHECK_THROWS_AS(estimate_params(CoefficientField::constant({0.0, 1.0}), CoefficientField::constant({0.0, -1.0}),
                                    *mesh, mesh->diameter()),
                    NonCoerciveError);
}

TEST_CASE("two-octant mu uses the argument-range angle", "[coefficients]") {
    // Arguments of mu span [0, pi/4], so theta = -(pi/8) * pi / (2 pi - pi/4) = -pi/14.
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    CoefficientField mu;
    mu.set_fallback([](const Vec3&) { return Complex(2.0); });
    mu.set_piece(0, [](const Vec3&) { return Complex(1.0, 1.0); });
    const MaterialParams p = estimate_params(mu, CoefficientField::constant(1.0), *mesh, mesh->diameter());
    CHECK(p.theta == Approx(-kPi / 14.0));
    CHECK(p.mu_upper == Approx(2.0));
    const Real expected_lower = std::min(std::sqrt(2.0) * std::cos(5.0 * kPi / 28.0), 2.0 * std::cos(kPi / 14.0));
    CHECK(p.mu_lower == Approx(expected_lower));
    CHECK(p.kappa_lower == Approx(std::cos(kPi / 14.0)));
}

TEST_CASE("complex kappa falls back to maximizing the worst rotated real part", "[coefficients]") {
    // Arguments {pi/3 (mu), -pi/6 (kappa)}: the covering arc is centred at pi/12.
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    const MaterialParams p = estimate_params(CoefficientField::constant(std::polar(2.0, kPi / 3.0)),
                                             CoefficientField::constant(std::polar(1.0, -kPi / 6.0)), *mesh,
                                             mesh->diameter());
    CHECK(p.policy == ThetaPolicy::Maximization);
    CHECK(p.theta == Approx(-kPi / 12.0));
    CHECK(p.mu_lower == Approx(2.0 * std::cos(kPi / 4.0)));
    CHECK(p.kappa_lower == Approx(std::cos(kPi / 4.0)));
}

TEST_CASE("rotated bounds hold at every quadrature point", "[coefficients]") {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(4));
    CoefficientField mu;
    mu.set_fallback([](const Vec3& x) { return Complex(1.0 + x.x(), 0.5 * x.y() + 0.2); });
    CoefficientField kappa = CoefficientField::checkerboard(Complex(1.0, 0.3), Complex(3.0, -0.5));
    const MaterialParams p = estimate_params(mu, kappa, *mesh, mesh->diameter());
    CHECK(p.mu_lower <= p.mu_upper);
    CHECK(p.kappa_lower <= p.kappa_upper);
    const Complex rot = std::polar(1.0, p.theta);
    const TetQuadrature rule = tet_rule(6);
    for (int c = 0; c < mesh->num_cells(); ++c) {
        for (const Vec3& q : rule.points) {
            CHECK((rot * eval_coeff(mu, *mesh, c, q)).real() >= p.mu_lower - 1e-12);
            CHECK((rot * eval_coeff(kappa, *mesh, c, q)).real() >= p.kappa_lower - 1e-12);
        }
    }
}

TEST_CASE("checkerboard contrast", "[coefficients]") {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    const CoefficientField kappa = CoefficientField::checkerboard(1.0, 100.0);
    const MaterialParams p = estimate_params(CoefficientField::constant(1.0), kappa, *mesh, mesh->diameter());
    CHECK(p.kappa_ratio == Approx(100.0));
    CHECK(p.kappa_upper == Approx(100.0));
    CHECK(p.reynolds == Approx(3.0 / 100.0));
    CHECK(p.reynolds_hat == 1.0);
    for (int c = 0; c < mesh->num_cells(); ++c) {
        const int parity = std::popcount(static_cast<unsigned>(mesh->cell_tag(c))) % 2;
        CHECK(eval_coeff(kappa, *mesh, c, Vec3(0.25, 0.25, 0.25)) == Complex(parity == 0 ? 1.0 : 100.0));
    }
}

TEST_CASE("layered preset splits the box at mid height", "[coefficients]") {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(4));
    const CoefficientField f = make_preset("layered", 1.0, 5.0);
    for (int c = 0; c < mesh->num_cells(); ++c) {
        const Vec3 x = mesh->transform(c).map(Vec3(0.25, 0.25, 0.25));
        CHECK(eval_coeff(f, *mesh, c, Vec3(0.25, 0.25, 0.25)) == Complex(x.z() > 0.5 ? 5.0 : 1.0));
    }
}

TEST_CASE("coefficient validation", "[coefficients]") {
    const auto odd = build_box_mesh(BoxMeshSpec::unit_cube(3));
    CHECK_THROWS_AS(CoefficientField::checkerboard(1.0, 2.0).validate(*odd), InvalidArgument);
    CHECK_NOTHROW(CoefficientField::constant(1.0).validate(*odd));

    CoefficientField partial;
    partial.set_piece(0, [](const Vec3&) { return Complex(1.0); });
    const auto even = build_box_mesh(BoxMeshSpec::unit_cube(2));
    CHECK_THROWS_AS(partial.validate(*even), InvalidArgument);
    CHECK_THROWS_AS(partial(3, Vec3::Zero()), InvalidArgument);
    CHECK_THROWS_AS(make_preset("stripes", 1.0, 2.0), InvalidArgument);
    CHECK_THROWS_AS(estimate_params(CoefficientField::constant(1.0), CoefficientField::constant(1.0), *even, 0.0),
                    InvalidArgument);
    CHECK_THROWS_AS(estimate_params(CoefficientField::constant(0.0), CoefficientField::constant(1.0), *even, 1.0),
                    NonCoerciveError);
}
