#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <curlfem/helmholtz.hpp>
#include <curlfem/interpolation.hpp>

#include "support.hpp"

using namespace curlfem;

namespace {

DiscreteField random_edge_field(const std::shared_ptr<const FeSpace>& c, std::mt19937_64& rng) {
    return DiscreteField(c, testing::random_complex_vector(c->num_dofs(), rng));
}

CoefficientField complex_checkerboard() { return CoefficientField::checkerboard(Complex(1.0, 1.0), Complex(4.0, 0.5)); }

VectorField sine_mode() {
    VectorField f;
    f.value = [](const Vec3& x) { return CVec3(0.0, 0.0, std::sin(kPi * x.x()) * std::sin(kPi * x.y())); };
    f.curl = [](const Vec3& x) {
        return CVec3(kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()),
                     -kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y()), 0.0);
    };
    return f;
}

}  // namespace

TEST_CASE("pure gradients have no divergence-free part", "[helmholtz]") {
    std::mt19937_64 rng(7);
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(3));
    const auto g = build_space(mesh, Family::H1, BoundaryCondition::Essential);
    const auto c = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
    const Eigen::VectorXcd p = testing::random_complex_vector(g->num_dofs(), rng);
    const DiscreteField b(c, gradient_matrix(*g, *c).cast<Complex>() * p);
    const HelmholtzSplit s = helmholtz_split(b, CoefficientField::constant(1.0));
    CHECK(s.divergence_free.coefficients().cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((s.potential.coefficients() - p).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("the sine mode is already divergence free", "[helmholtz]") {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(4));
    const auto c = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
    const DiscreteField b = interp(c, sine_mode());
    const HelmholtzSplit s = helmholtz_split(b, CoefficientField::constant(1.0));
    CHECK(l2_norm(s.divergence_free) > 0.1);
    CHECK(s.constraint_residual <= 1e-9);
    CHECK(s.solve_residual <= 1e-10);
}

TEST_CASE("split reconstructs, is idempotent and linear", "[helmholtz]") {
    std::mt19937_64 rng(11);
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(4));
    const auto c = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
    const auto g = build_space(mesh, Family::H1, BoundaryCondition::Essential);
    const CoefficientField mu = complex_checkerboard();
    const DiscreteField b1 = random_edge_field(c, rng);
    const DiscreteField b2 = random_edge_field(c, rng);
    const HelmholtzSplit s1 = helmholtz_split(b1, mu);
    const HelmholtzSplit s2 = helmholtz_split(b2, mu);

    const Eigen::SparseMatrix<Complex> grad = gradient_matrix(*g, *c).cast<Complex>();
    const Eigen::VectorXcd rebuilt = s1.divergence_free.coefficients() + grad * s1.potential.coefficients();
    CHECK((rebuilt - b1.coefficients()).cwiseAbs().maxCoeff() <= 1e-12 * b1.coefficients().cwiseAbs().maxCoeff());
    CHECK(s1.constraint_residual <= 1e-9);

    const HelmholtzSplit again = helmholtz_split(s1.divergence_free, mu);
    CHECK(again.potential.coefficients().norm() <= 1e-10 * s1.potential.coefficients().norm());

    const Complex alpha(0.3, -1.2);
    const DiscreteField combo(c, b1.coefficients() + alpha * b2.coefficients());
    const HelmholtzSplit sc = helmholtz_split(combo, mu);
    const Eigen::VectorXcd expected = s1.potential.coefficients() + alpha * s2.potential.coefficients();
    CHECK((sc.potential.coefficients() - expected).norm() <= 1e-10 * expected.norm());
}

TEST_CASE("weak divergence of a gradient", "[helmholtz]") {
    std::mt19937_64 rng(13);
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(3));
    const auto g = build_space(mesh, Family::H1, BoundaryCondition::Essential);
    const auto c = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
    const CoefficientField one = CoefficientField::constant(1.0);
    DiscreteField p(g, testing::random_complex_vector(g->num_dofs(), rng));
    p.coefficients() /= derivative_l2_norm(p);
    const DiscreteField b(c, gradient_matrix(*g, *c).cast<Complex>() * p.coefficients());
    const Eigen::VectorXcd action = assemble_stiffness(g, one).matrix * p.coefficients();
    CHECK(weak_div_residual(b, one) == Catch::Approx(action.cwiseAbs().maxCoeff() / l2_norm(b)).epsilon(1e-10));
    CHECK(weak_div_residual(b, one) > 0.0);
    CHECK(weak_div_residual(DiscreteField(c), one) == 0.0);
}

TEST_CASE("splitting rejects non-coercive weights and foreign spaces", "[helmholtz]") {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    const auto c = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
    const auto free = build_space(mesh, Family::HCurl);
    CHECK_THROWS_AS(helmholtz_split(DiscreteField(c), CoefficientField::checkerboard(1.0, -1.0)), NonCoerciveError);
    CHECK_THROWS_AS(helmholtz_split(DiscreteField(free), CoefficientField::constant(1.0)), InvalidArgument);
}

TEST_CASE("direct-sum dimension identity", "[helmholtz]") {
    for (int n : {2, 3}) {
        const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(n));
        const HelmholtzDimensions d = helmholtz_dimensions(mesh, CoefficientField::constant({1.0, 2.0}));
        INFO("resolution " << n);
        CHECK(d.coupling_rank == d.vertex_dofs);
        CHECK(d.identity_holds());
    }
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(4));
    const HelmholtzDimensions d = helmholtz_dimensions(mesh, complex_checkerboard());
    // Interior counts from the Kuhn enumeration oracle at resolution 4.
    CHECK(d.edge_dofs == 316);
    CHECK(d.vertex_dofs == 27);
    CHECK(d.divergence_free_dim == 289);
    CHECK(d.identity_holds());
}

TEST_CASE("constrained eigenvalue bounds the Rayleigh quotient from below", "[helmholtz][ps]") {
    std::mt19937_64 rng(17);
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(3));
    const CoefficientField one = CoefficientField::constant(1.0);
    const PsEstimate ps = ps_constant(mesh, one, mesh->diameter());
    REQUIRE(ps.eigenvector.has_value());
    CHECK(ps.lambda_min > 0.0);
    CHECK(ps.constraint_residual <= 1e-8);
    CHECK(ps.eigen_residual <= 1e-8);
    CHECK(ps.c_p == Catch::Approx(std::sqrt(3.0 * ps.lambda_min)));
    CHECK(rayleigh_quotient(*ps.eigenvector) == Catch::Approx(ps.lambda_min).epsilon(1e-9));

    const auto c = ps.eigenvector->space_ptr();
    Real lowest = std::numeric_limits<Real>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
        const HelmholtzSplit s = helmholtz_split(random_edge_field(c, rng), one);
        lowest = std::min(lowest, rayleigh_quotient(s.divergence_free));
    }
    CHECK(lowest >= ps.lambda_min - 1e-8);
}

TEST_CASE("constrained spectrum approaches the cavity value", "[helmholtz][ps]") {
    const CoefficientField one = CoefficientField::constant(1.0);
    const Real target = 2.0 * kPi * kPi;
    Real previous_gap = std::numeric_limits<Real>::infinity();
    for (int n : {2, 4}) {
        const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(n));
        const PsEstimate ps = ps_constant(mesh, one, mesh->diameter());
        const Real gap = std::abs(ps.lambda_min - target);
        CHECK(gap < previous_gap);
        previous_gap = gap;
    }
}

TEST_CASE("weighted mass and custom shift keep the eigenvalue", "[helmholtz][ps]") {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    const PsEstimate base = ps_constant(mesh, CoefficientField::constant(1.0), mesh->diameter());
    PsOptions opts;
    opts.shift = 5.0;
    const PsEstimate shifted = ps_constant(mesh, CoefficientField::constant(1.0), mesh->diameter(), opts);
    CHECK(shifted.lambda_min == Catch::Approx(base.lambda_min).epsilon(1e-9));
    // |μ̃| = 2 everywhere halves the eigenvalue of the weighted problem.
    opts.weighted_mass = true;
    const PsEstimate weighted = ps_constant(mesh, CoefficientField::constant({0.0, 2.0}), mesh->diameter(), opts);
    CHECK(weighted.lambda_min == Catch::Approx(base.lambda_min / 2.0).epsilon(1e-9));
    CHECK_THROWS_AS(ps_constant(mesh, CoefficientField::constant(1.0), 0.0), InvalidArgument);
}

TEST_CASE("lifting distance vanishes for discretely curl-free input", "[helmholtz][lifting]") {
    std::mt19937_64 rng(19);
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    const auto c = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
    const CoefficientField one = CoefficientField::constant(1.0);
    CHECK_THROWS_AS(lift_curl_preserving(DiscreteField(c), one, 1), InvalidArgument);

    const LiftingResult zero = lift_curl_preserving(DiscreteField(c), one, 2);
    CHECK(zero.distance == 0.0);
    CHECK(zero.ratio == 0.0);

    // A coarse gradient is also a fine gradient, so the lifting recovers it exactly
    // and the distance equals its norm.
    const auto g = build_space(mesh, Family::H1, BoundaryCondition::Essential);
    const DiscreteField grad(c, gradient_matrix(*g, *c).cast<Complex>() *
                                    testing::random_complex_vector(g->num_dofs(), rng));
    const LiftingResult r = lift_curl_preserving(grad, one, 2);
    CHECK(r.distance == Catch::Approx(l2_norm(grad)).epsilon(1e-9));
    CHECK(r.curl_norm <= 1e-12 * r.distance);
}

TEST_CASE("lifting of the sine mode shrinks under refinement", "[helmholtz][lifting]") {
    const CoefficientField one = CoefficientField::constant(1.0);
    Real previous = std::numeric_limits<Real>::infinity();
    for (int n : {2, 4}) {
        const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(n));
        const auto c = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
        const HelmholtzSplit s = helmholtz_split(interp(c, sine_mode()), one);
        const LiftingResult r = lift_curl_preserving(s.divergence_free, one, 2);
        CHECK(r.ratio > 0.0);
        CHECK(r.ratio < previous);
        previous = r.ratio;
    }
}

TEST_CASE("lifting distance decreases for a checkerboard weight", "[helmholtz][lifting]") {
    const CoefficientField mu = complex_checkerboard();
    Real previous = std::numeric_limits<Real>::infinity();
    for (int n : {2, 4, 8}) {
        const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(n));
        const auto c = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
        const HelmholtzSplit s = helmholtz_split(interp(c, sine_mode()), mu);
        const LiftingResult r = lift_curl_preserving(s.divergence_free, mu, 2);
        CHECK(r.distance < previous);
        previous = r.distance;
    }
}
