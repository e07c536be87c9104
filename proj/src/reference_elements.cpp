#include "curlfem/reference_elements.hpp"

#include <string>

#include "curlfem/quadrature.hpp"

namespace curlfem {

namespace {

// Gradients of the barycentric coordinates on the reference cell.
const std::array<Vec3, 4>& barycentric_gradients() {
    static const std::array<Vec3, 4> grads{Vec3(-1.0, -1.0, -1.0), Vec3(1.0, 0.0, 0.0),
                                           Vec3(0.0, 1.0, 0.0), Vec3(0.0, 0.0, 1.0)};
    return grads;
}

std::array<Real, 4> barycentric(const Vec3& ref) {
    return {1.0 - ref.x() - ref.y() - ref.z(), ref.x(), ref.y(), ref.z()};
}

}  // namespace

char family_code(Family family) {
    switch (family) {
    case Family::H1: return 'g';
    case Family::HCurl: return 'c';
    case Family::HDiv: return 'd';
    case Family::L2: return 'b';
    }
    throw InvalidArgument("unknown element family");
}

Family family_from_code(char code) {
    switch (code) {
    case 'g': return Family::H1;
    case 'c': return Family::HCurl;
    case 'd': return Family::HDiv;
    case 'b': return Family::L2;
    default: break;
    }
    throw InvalidArgument(std::string("unknown element family code '") + code + "'");
}

std::string_view family_name(Family family) {
    switch (family) {
    case Family::H1: return "P1";
    case Family::HCurl: return "N0";
    case Family::HDiv: return "RT0";
    case Family::L2: return "P0";
    }
    throw InvalidArgument("unknown element family");
}

int local_dof_count(Family family) {
    switch (family) {
    case Family::H1: return 4;
    case Family::HCurl: return 6;
    case Family::HDiv: return 4;
    case Family::L2: return 1;
    }
    throw InvalidArgument("unknown element family");
}

bool is_vector_family(Family family) { return family == Family::HCurl || family == Family::HDiv; }

const std::array<Vec3, 4>& reference_vertices() {
    static const std::array<Vec3, 4> verts{Vec3(0.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0),
                                           Vec3(0.0, 1.0, 0.0), Vec3(0.0, 0.0, 1.0)};
    return verts;
}

CellTransform CellTransform::from_jacobian(const Mat3& jacobian, const Vec3& offset) {
    CellTransform t;
    t.jacobian = jacobian;
    t.offset = offset;
    t.det = jacobian.determinant();
    if (!(t.det > 0.0)) {
        throw InvalidArgument("cell transform has non-positive Jacobian determinant " +
                              std::to_string(t.det));
    }
    t.inverse = jacobian.inverse();
    t.inverse_transpose = t.inverse.transpose();
    return t;
}

CellTransform CellTransform::from_vertices(const std::array<Vec3, 4>& v) {
    Mat3 jac;
    jac.col(0) = v[1] - v[0];
    jac.col(1) = v[2] - v[0];
    jac.col(2) = v[3] - v[0];
    return from_jacobian(jac, v[0]);
}

ShapeSet eval_basis(Family family, const Vec3& ref) {
    const auto& g = barycentric_gradients();
    const auto lam = barycentric(ref);
    ShapeSet set;
    set.count = local_dof_count(family);
    auto& out = set.samples;
    switch (family) {
    case Family::H1:
        for (std::size_t i = 0; i < 4; ++i) {
            out[i].scalar = lam[i];
            out[i].derivative = g[i];
        }
        break;
    case Family::HCurl:
        for (std::size_t k = 0; k < 6; ++k) {
            const auto a = static_cast<std::size_t>(kLocalEdges[k][0]);
            const auto b = static_cast<std::size_t>(kLocalEdges[k][1]);
            out[k].vector = lam[a] * g[b] - lam[b] * g[a];
            out[k].derivative = 2.0 * g[a].cross(g[b]);
        }
        break;
    case Family::HDiv:
        for (std::size_t k = 0; k < 4; ++k) {
            const auto a = static_cast<std::size_t>(kLocalFaces[k][0]);
            const auto b = static_cast<std::size_t>(kLocalFaces[k][1]);
            const auto c = static_cast<std::size_t>(kLocalFaces[k][2]);
            out[k].vector = 2.0 * (lam[a] * g[b].cross(g[c]) + lam[b] * g[c].cross(g[a]) +
                                   lam[c] * g[a].cross(g[b]));
            out[k].divergence = 6.0 * g[a].dot(g[b].cross(g[c]));
        }
        break;
    case Family::L2:
        out[0].scalar = 1.0 / kReferenceVolume;
        break;
    }
    return set;
}

ShapeSample pushforward(Family family, const CellTransform& t, const ShapeSample& ref) {
    ShapeSample phys;
    switch (family) {
    case Family::H1:
        phys.scalar = ref.scalar;
        phys.derivative = t.inverse_transpose * ref.derivative;
        break;
    case Family::HCurl:
        phys.vector = t.inverse_transpose * ref.vector;
        phys.derivative = t.jacobian * ref.derivative / t.det;
        break;
    case Family::HDiv:
        phys.vector = t.jacobian * ref.vector / t.det;
        phys.divergence = ref.divergence / t.det;
        break;
    case Family::L2:
        phys.scalar = ref.scalar / t.det;
        break;
    }
    return phys;
}

ShapeSet pushforward(Family family, const CellTransform& t, const ShapeSet& ref) {
    ShapeSet out;
    out.count = ref.count;
    for (int i = 0; i < ref.count; ++i) {
        out[i] = pushforward(family, t, ref[i]);
    }
    return out;
}

ShapeSet eval_physical_basis(Family family, const CellTransform& t, const Vec3& ref) {
    return pushforward(family, t, eval_basis(family, ref));
}

std::vector<Real> apply_reference_dofs(Family family, const ReferenceFunction& f, int quad_degree) {
    const auto& v = reference_vertices();
    std::vector<Real> dofs(static_cast<std::size_t>(local_dof_count(family)), 0.0);
    switch (family) {
    case Family::H1:
        for (std::size_t i = 0; i < 4; ++i) {
            dofs[i] = f(v[i]).scalar;
        }
        break;
    case Family::HCurl: {
        const LineRule rule = line_rule(quad_degree);
        for (std::size_t k = 0; k < 6; ++k) {
            const Vec3& a = v[static_cast<std::size_t>(kLocalEdges[k][0])];
            const Vec3& b = v[static_cast<std::size_t>(kLocalEdges[k][1])];
            const Vec3 tangent = b - a;
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                dofs[k] += rule.weights[q] * f(a + rule.points[q] * tangent).vector.dot(tangent);
            }
        }
        break;
    }
    case Family::HDiv: {
        const TriangleRule rule = triangle_rule(quad_degree);
        for (std::size_t k = 0; k < 4; ++k) {
            const Vec3& a = v[static_cast<std::size_t>(kLocalFaces[k][0])];
            const Vec3& b = v[static_cast<std::size_t>(kLocalFaces[k][1])];
            const Vec3& c = v[static_cast<std::size_t>(kLocalFaces[k][2])];
            const Vec3 area_normal = (b - a).cross(c - a);
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const Vec3 x = a + rule.points[q].x() * (b - a) + rule.points[q].y() * (c - a);
                dofs[k] += rule.weights[q] * f(x).vector.dot(area_normal);
            }
        }
        break;
    }
    case Family::L2: {
        const TetQuadrature rule = tet_rule(quad_degree);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            dofs[0] += rule.weights[q] * f(rule.points[q]).scalar;
        }
        break;
    }
    }
    return dofs;
}

Eigen::MatrixXd dof_matrix(Family family, int quad_degree) {
    const int n = local_dof_count(family);
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j) {
        const auto column = apply_reference_dofs(
            family, [&](const Vec3& x) { return eval_basis(family, x)[j]; },
            quad_degree);
        for (int i = 0; i < n; ++i) {
            m(i, j) = column[static_cast<std::size_t>(i)];
        }
    }
    return m;
}

}  // namespace curlfem
