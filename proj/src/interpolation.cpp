#include "curlfem/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "curlfem/quadrature.hpp"

namespace curlfem {

namespace {

Complex dot(const CVec3& a, const Vec3& b) { return a.x() * b.x() + a.y() * b.y() + a.z() * b.z(); }

// Columns j of the finite-difference Jacobian d v_i / d x_j.
Eigen::Matrix3cd fd_jacobian(const std::function<CVec3(const Vec3&)>& v, const Vec3& x, Real step) {
    Eigen::Matrix3cd jac;
    for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e[j] = step;
        jac.col(j) = (v(x + e) - v(x - e)) / (2.0 * step);
    }
    return jac;
}

}  // namespace

Real derivative_mismatch(const ScalarField& f, std::span<const Vec3> points, Real step) {
    Real worst = 0.0;
    if (!f.gradient) {
        return worst;
    }
    for (const Vec3& x : points) {
        CVec3 fd;
        for (int j = 0; j < 3; ++j) {
            Vec3 e = Vec3::Zero();
            e[j] = step;
            fd[j] = (f.value(x + e) - f.value(x - e)) / (2.0 * step);
        }
        worst = std::max(worst, (fd - f.gradient(x)).norm());
    }
    return worst;
}

Real derivative_mismatch(const VectorField& f, std::span<const Vec3> points, Real step) {
    Real worst = 0.0;
    for (const Vec3& x : points) {
        const Eigen::Matrix3cd jac = fd_jacobian(f.value, x, step);
        if (f.curl) {
            const CVec3 curl(jac(2, 1) - jac(1, 2), jac(0, 2) - jac(2, 0), jac(1, 0) - jac(0, 1));
            worst = std::max(worst, (curl - f.curl(x)).norm());
        }
        if (f.divergence) {
            worst = std::max(worst, std::abs(jac.trace() - f.divergence(x)));
        }
    }
    return worst;
}

DiscreteField interp(std::shared_ptr<const FeSpace> space, const ScalarField& f, const InterpolationOptions& options) {
    const FeSpace& s = *space;
    const Mesh& mesh = s.mesh();
    DiscreteField out(space);
    auto& coeffs = out.coefficients();
    switch (s.family()) {
    case Family::H1:
        for (int dof = 0; dof < s.num_dofs(); ++dof) {
            coeffs[dof] = f.value(mesh.vertex(s.dof_entity(dof)));
        }
        break;
    case Family::L2: {
        const TetQuadrature rule = tet_rule(options.quad_degree);
        for (int dof = 0; dof < s.num_dofs(); ++dof) {
            const int cell = s.dof_entity(dof);
            const CellTransform& t = mesh.transform(cell);
            Complex sum{0.0};
            for (std::size_t q = 0; q < rule.size(); ++q) {
                sum += rule.weights[q] * t.det * f.value(t.map(rule.points[q]));
            }
            coeffs[dof] = sum;
        }
        break;
    }
    default: throw InvalidArgument("scalar interpolation targets the H1 or L2 family");
    }
    return out;
}

DiscreteField interp(std::shared_ptr<const FeSpace> space, const VectorField& f, const InterpolationOptions& options) {
    const FeSpace& s = *space;
    const Mesh& mesh = s.mesh();
    DiscreteField out(space);
    auto& coeffs = out.coefficients();
    switch (s.family()) {
    case Family::HCurl: {
        const LineRule rule = line_rule(options.quad_degree);
        for (int dof = 0; dof < s.num_dofs(); ++dof) {
            const auto& e = mesh.edges()[static_cast<std::size_t>(s.dof_entity(dof))];
            const Vec3& a = mesh.vertex(e[0]);
            const Vec3 tangent = mesh.vertex(e[1]) - a;
            Complex sum{0.0};
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                sum += rule.weights[q] * dot(f.value(a + rule.points[q] * tangent), tangent);
            }
            coeffs[dof] = sum;
        }
        break;
    }
    case Family::HDiv: {
        const TriangleRule rule = triangle_rule(options.quad_degree);
        for (int dof = 0; dof < s.num_dofs(); ++dof) {
            const auto& fv = mesh.faces()[static_cast<std::size_t>(s.dof_entity(dof))];
            const Vec3& p = mesh.vertex(fv[0]);
            const Vec3 u = mesh.vertex(fv[1]) - p;
            const Vec3 w = mesh.vertex(fv[2]) - p;
            const Vec3 area_normal = u.cross(w);
            Complex sum{0.0};
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const Vec3 x = p + rule.points[q].x() * u + rule.points[q].y() * w;
                sum += rule.weights[q] * dot(f.value(x), area_normal);
            }
            coeffs[dof] = sum;
        }
        break;
    }
    default: throw InvalidArgument("vector interpolation targets the HCurl or HDiv family");
    }
    return out;
}

ScalarField as_scalar_field(const DiscreteField& field) {
    if (is_vector_family(field.space().family())) {
        throw InvalidArgument("as_scalar_field requires a scalar family");
    }
    ScalarField f;
    f.value = [field](const Vec3& x) { return std::get<Complex>(eval_at(field, x)); };
    if (field.space().family() == Family::H1) {
        f.gradient = [field](const Vec3& x) { return std::get<CVec3>(eval_deriv_at(field, x)); };
        f.smoothness = Smoothness::Continuous;
    }
    return f;
}

VectorField as_vector_field(const DiscreteField& field) {
    if (!is_vector_family(field.space().family())) {
        throw InvalidArgument("as_vector_field requires a vector family");
    }
    VectorField f;
    f.smoothness = Smoothness::Continuous;
    f.value = [field](const Vec3& x) { return std::get<CVec3>(eval_at(field, x)); };
    if (field.space().family() == Family::HCurl) {
        f.curl = [field](const Vec3& x) { return std::get<CVec3>(eval_deriv_at(field, x)); };
    } else {
        f.divergence = [field](const Vec3& x) { return std::get<Complex>(eval_deriv_at(field, x)); };
    }
    return f;
}

Real diagram_residual(const std::shared_ptr<const Mesh>& mesh, const ScalarField& f, BoundaryCondition bc,
                      const InterpolationOptions& options) {
    if (!f.gradient) {
        throw InvalidArgument("the grad square of the diagram needs an analytic gradient");
    }
    const auto h1 = build_space(mesh, Family::H1, bc);
    const auto hcurl = build_space(mesh, Family::HCurl, bc);
    VectorField grad_f;
    grad_f.value = f.gradient;
    const DiscreteField lhs = interp(hcurl, grad_f, options);
    const Eigen::VectorXcd rhs = gradient_matrix(*h1, *hcurl).cast<Complex>() * interp(h1, f, options).coefficients();
    return l2_norm(DiscreteField(hcurl, lhs.coefficients() - rhs));
}

Real diagram_residual(const std::shared_ptr<const Mesh>& mesh, const VectorField& g, DiagramStage stage,
                      BoundaryCondition bc, const InterpolationOptions& options) {
    switch (stage) {
    case DiagramStage::Grad:
        throw InvalidArgument("the grad square takes a scalar field");
    case DiagramStage::Curl: {
        if (!g.curl) {
            throw InvalidArgument("the curl square of the diagram needs an analytic curl");
        }
        const auto hcurl = build_space(mesh, Family::HCurl, bc);
        const auto hdiv = build_space(mesh, Family::HDiv, bc);
        VectorField curl_g;
        curl_g.value = g.curl;
        const DiscreteField lhs = interp(hdiv, curl_g, options);
        const Eigen::VectorXcd rhs =
            curl_matrix(*hcurl, *hdiv).cast<Complex>() * interp(hcurl, g, options).coefficients();
        return l2_norm(DiscreteField(hdiv, lhs.coefficients() - rhs));
    }
    case DiagramStage::Div: {
        if (!g.divergence) {
            throw InvalidArgument("the div square of the diagram needs an analytic divergence");
        }
        const auto hdiv = build_space(mesh, Family::HDiv, bc);
        const auto l2 = build_space(mesh, Family::L2, BoundaryCondition::None);
        ScalarField div_g;
        div_g.value = g.divergence;
        const DiscreteField lhs = interp(l2, div_g, options);
        const Eigen::VectorXcd rhs =
            divergence_matrix(*hdiv, *l2).cast<Complex>() * interp(hdiv, g, options).coefficients();
        return l2_norm(DiscreteField(l2, lhs.coefficients() - rhs));
    }
    }
    throw InvalidArgument("unknown diagram stage");
}

}  // namespace curlfem
