#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <curlfem/interpolation.hpp>
#include <curlfem/polynomial.hpp>

#include "support.hpp"

using namespace curlfem;
using Catch::Approx;

namespace {

std::vector<Vec3> sample_points(std::mt19937_64& rng, int n) {
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i) {
        pts.push_back(0.8 * testing::random_point(rng) + Vec3::Constant(0.1));
    }
    return pts;
}

}  // namespace

TEST_CASE("affine scalars are reproduced by the vertex interpolant", "[interpolation]") {
    std::mt19937_64 rng(41);
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(3));
    const Complex c0(0.3, -1.0);
    const CVec3 slope(Complex(1.0, 2.0), Complex(-0.5, 0.0), Complex(2.0, -1.0));
    ScalarField f;
    f.value = [&](const Vec3& x) { return c0 + slope.x() * x.x() + slope.y() * x.y() + slope.z() * x.z(); };
    const DiscreteField p = interp(build_space(mesh, Family::H1), f);
    for (const Vec3& x : sample_points(rng, 200)) {
        CHECK(std::abs(std::get<Complex>(eval_at(p, x)) - f.value(x)) < 1e-12);
    }
}

TEST_CASE("constant fields are reproduced by the face and cell interpolants", "[interpolation]") {
    std::mt19937_64 rng(43);
    const auto mesh = build_box_mesh({Vec3::Zero(), Vec3(2.0, 1.0, 1.0), {3, 2, 2}, {}});
    const CVec3 c0(Complex(1.0, 1.0), Complex(-2.0, 0.5), Complex(0.0, 3.0));
    VectorField g;
    g.value = [c0](const Vec3&) { return c0; };
    const DiscreteField d = interp(build_space(mesh, Family::HDiv), g);
    ScalarField s;
    s.value = [](const Vec3&) { return Complex(2.0, -1.0); };
    const DiscreteField b = interp(build_space(mesh, Family::L2), s);
    for (const Vec3& x : sample_points(rng, 100)) {
        CHECK((std::get<CVec3>(eval_at(d, 2.0 * x.cwiseProduct(Vec3(1.0, 0.5, 0.5)))) - c0).norm() < 1e-12);
        CHECK(std::abs(std::get<Complex>(eval_at(b, x)) - Complex(2.0, -1.0)) < 1e-12);
    }
}

TEST_CASE("interpolating a discrete field returns its coefficients", "[interpolation]") {
    std::mt19937_64 rng(47);
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    for (Family family : {Family::H1, Family::HCurl, Family::HDiv, Family::L2}) {
        for (BoundaryCondition bc : {BoundaryCondition::None, BoundaryCondition::Essential}) {
            if (family == Family::L2 && bc == BoundaryCondition::Essential) {
                continue;
            }
            const auto space = build_space(mesh, family, bc);
            const DiscreteField f(space, testing::random_complex_vector(space->num_dofs(), rng));
            const DiscreteField again = is_vector_family(family) ? interp(space, as_vector_field(f))
                                                                 : interp(space, as_scalar_field(f));
            const Real scale = f.coefficients().cwiseAbs().maxCoeff();
            CHECK((again.coefficients() - f.coefficients()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
        }
    }
}

TEST_CASE("vertex interpolation error of x*y converges at second order", "[interpolation]") {
    ScalarField f;
    f.value = [](const Vec3& x) { return Complex(x.x() * x.y()); };
    std::vector<Real> errors;
    for (int n : {2, 4, 8}) {
        const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(n));
        const DiscreteField p = interp(build_space(mesh, Family::H1), f);
        const TetQuadrature rule = tet_rule(6);
        Real sum = 0.0;
        for (int c = 0; c < mesh->num_cells(); ++c) {
            const CellTransform& t = mesh->transform(c);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                sum += rule.weights[q] * t.det *
                       std::norm(eval_scalar(p, c, rule.points[q]) - f.value(t.map(rule.points[q])));
            }
        }
        errors.push_back(std::sqrt(sum));
    }
    for (std::size_t i = 1; i < errors.size(); ++i) {
        CHECK(std::log2(errors[i - 1] / errors[i]) == Approx(2.0).margin(0.15));
    }
}

TEST_CASE("commuting diagram holds for random cubic inputs", "[interpolation]") {
    std::mt19937_64 rng(53);
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    const InterpolationOptions exact{3};
    for (int trial = 0; trial < 3; ++trial) {
        const Polynomial p(3, rng);
        const auto g = random_vector_polynomial(3, rng);
        CHECK(diagram_residual(mesh, scalar_polynomial(p), BoundaryCondition::None, exact) <= 1e-11);
        CHECK(diagram_residual(mesh, vector_polynomial(g), DiagramStage::Curl, BoundaryCondition::None, exact) <=
              1e-11);
        CHECK(diagram_residual(mesh, vector_polynomial(g), DiagramStage::Div, BoundaryCondition::None, exact) <=
              1e-11);
    }
}

TEST_CASE("commuting diagram holds on the essential spaces for inputs vanishing on the boundary",
          "[interpolation]") {
    std::mt19937_64 rng(59);
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    const Polynomial bx = Polynomial::bubble(0);
    const Polynomial by = Polynomial::bubble(1);
    const Polynomial bz = Polynomial::bubble(2);
    const InterpolationOptions exact{9};
    const Polynomial f = bx * by * bz * Polynomial(3, rng);
    CHECK(diagram_residual(mesh, scalar_polynomial(f), BoundaryCondition::Essential, exact) <= 1e-11);
    const std::array<Polynomial, 3> tangential_free{by * bz * Polynomial(3, rng), bx * bz * Polynomial(3, rng),
                                                    bx * by * Polynomial(3, rng)};
    CHECK(diagram_residual(mesh, vector_polynomial(tangential_free), DiagramStage::Curl,
                           BoundaryCondition::Essential, exact) <= 1e-11);
    const std::array<Polynomial, 3> normal_free{bx * Polynomial(3, rng), by * Polynomial(3, rng),
                                                bz * Polynomial(3, rng)};
    CHECK(diagram_residual(mesh, vector_polynomial(normal_free), DiagramStage::Div, BoundaryCondition::Essential,
                           exact) <= 1e-11);
}

TEST_CASE("interpolated derivatives are exactly annihilated downstream", "[interpolation]") {
    std::mt19937_64 rng(61);
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(3));
    const ScalarField f = scalar_polynomial(Polynomial(3, rng));
    VectorField grad_f;
    grad_f.value = f.gradient;
    const auto c = build_space(mesh, Family::HCurl);
    const auto d = build_space(mesh, Family::HDiv);
    const auto b = build_space(mesh, Family::L2);
    const Eigen::VectorXcd curl_of_grad =
        curl_matrix(*c, *d).cast<Complex>() * interp(c, grad_f, {3}).coefficients();
    CHECK(curl_of_grad.cwiseAbs().maxCoeff() < 1e-12);

    const VectorField g = vector_polynomial(random_vector_polynomial(3, rng));
    VectorField curl_g;
    curl_g.value = g.curl;
    const Eigen::VectorXcd div_of_curl =
        divergence_matrix(*d, *b).cast<Complex>() * interp(d, curl_g, {3}).coefficients();
    CHECK(div_of_curl.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("diagram residual needs the analytic derivative", "[interpolation]") {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(1));
    ScalarField f;
    f.value = [](const Vec3& x) { return Complex(x.x()); };
    CHECK_THROWS_AS(diagram_residual(mesh, f, BoundaryCondition::None), InvalidArgument);
    VectorField g;
    g.value = [](const Vec3& x) { return CVec3(x.cast<Complex>()); };
    CHECK_THROWS_AS(diagram_residual(mesh, g, DiagramStage::Curl, BoundaryCondition::None), InvalidArgument);
    CHECK_THROWS_AS(diagram_residual(mesh, g, DiagramStage::Div, BoundaryCondition::None), InvalidArgument);
    CHECK_THROWS_AS(diagram_residual(mesh, g, DiagramStage::Grad, BoundaryCondition::None), InvalidArgument);
}

TEST_CASE("analytic polynomial derivatives match finite differences", "[interpolation]") {
    std::mt19937_64 rng(67);
    const auto pts = sample_points(rng, 20);
    CHECK(derivative_mismatch(scalar_polynomial(Polynomial(3, rng)), pts) < 1e-6);
    CHECK(derivative_mismatch(vector_polynomial(random_vector_polynomial(3, rng)), pts) < 1e-6);
    VectorField wrong = vector_polynomial(random_vector_polynomial(2, rng));
    wrong.divergence = [](const Vec3&) { return Complex(100.0); };
    CHECK(derivative_mismatch(wrong, pts) > 1.0);
}
