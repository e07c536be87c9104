#include "curlfem/fe_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace curlfem {

namespace {

CVec3 complex_vec(const Vec3& v) { return v.cast<Complex>(); }

// Bilinear (non-conjugating) dot product.
Complex dot(const CVec3& a, const Vec3& b) { return a.x() * b.x() + a.y() * b.y() + a.z() * b.z(); }

CVec3 cross(const CVec3& a, const Vec3& b) { return a.cross(complex_vec(b)); }

void require_family(const DiscreteField& field, Family family, const char* what) {
    if (field.space().family() != family) {
        throw InvalidArgument(std::string(what) + " requires a " + std::string(family_name(family)) +
                              " field, got " + std::string(family_name(field.space().family())));
    }
}

void require_compatible(const FeSpace& a, const FeSpace& b) {
    if (&a.mesh() != &b.mesh()) {
        throw InvalidArgument("spaces live on different meshes");
    }
    if (a.bc() != b.bc()) {
        throw InvalidArgument("spaces carry different boundary conditions");
    }
}

Vec3 face_point(const Mesh& mesh, int face, const Eigen::Vector2d& st) {
    const auto& f = mesh.faces()[static_cast<std::size_t>(face)];
    const Vec3& p = mesh.vertex(f[0]);
    const Vec3& q = mesh.vertex(f[1]);
    const Vec3& r = mesh.vertex(f[2]);
    return p + st.x() * (q - p) + st.y() * (r - p);
}

}  // namespace

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, Family family, BoundaryCondition bc)
    : mesh_(std::move(mesh)), family_(family), bc_(bc), local_count_(local_dof_count(family)) {
    if (!mesh_) {
        throw InvalidArgument("FeSpace requires a mesh");
    }
    if (family_ == Family::L2 && bc_ == BoundaryCondition::Essential) {
        throw InvalidArgument("the L2 family admits no essential boundary condition");
    }
    const Mesh& m = *mesh_;
    int entities = 0;
    switch (family_) {
    case Family::H1: entities = m.num_vertices(); break;
    case Family::HCurl: entities = m.num_edges(); break;
    case Family::HDiv: entities = m.num_faces(); break;
    case Family::L2: entities = m.num_cells(); break;
    }
    auto on_boundary = [&](int e) {
        switch (family_) {
        case Family::H1: return m.is_boundary_vertex(e);
        case Family::HCurl: return m.is_boundary_edge(e);
        case Family::HDiv: return m.is_boundary_face(e);
        case Family::L2: return false;
        }
        return false;
    };
    entity_dof_.assign(static_cast<std::size_t>(entities), -1);
    for (int e = 0; e < entities; ++e) {
        if (has_bc() && on_boundary(e)) {
            constrained_.push_back(e);
            continue;
        }
        entity_dof_[static_cast<std::size_t>(e)] = static_cast<int>(dof_entity_.size());
        dof_entity_.push_back(e);
    }

    const auto ncells = static_cast<std::size_t>(m.num_cells());
    const auto lc = static_cast<std::size_t>(local_count_);
    cell_dofs_.resize(ncells * lc);
    cell_signs_.resize(ncells * lc);
    for (int c = 0; c < m.num_cells(); ++c) {
        const std::size_t base = static_cast<std::size_t>(c) * lc;
        for (std::size_t k = 0; k < lc; ++k) {
            int entity = 0;
            std::int8_t sign = 1;
            switch (family_) {
            case Family::H1: entity = m.cells()[static_cast<std::size_t>(c)][k]; break;
            case Family::HCurl:
                entity = m.cell_edges(c)[k];
                sign = m.cell_edge_signs(c)[k];
                break;
            case Family::HDiv:
                entity = m.cell_faces(c)[k];
                sign = m.cell_face_signs(c)[k];
                break;
            case Family::L2: entity = c; break;
            }
            cell_dofs_[base + k] = entity_dof_[static_cast<std::size_t>(entity)];
            cell_signs_[base + k] = sign;
        }
    }
}

std::span<const int> FeSpace::cell_dofs(int cell) const {
    return {cell_dofs_.data() + static_cast<std::size_t>(cell) * static_cast<std::size_t>(local_count_),
            static_cast<std::size_t>(local_count_)};
}

std::span<const std::int8_t> FeSpace::cell_signs(int cell) const {
    return {cell_signs_.data() + static_cast<std::size_t>(cell) * static_cast<std::size_t>(local_count_),
            static_cast<std::size_t>(local_count_)};
}

std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const Mesh> mesh, Family family, BoundaryCondition bc) {
    return std::make_shared<const FeSpace>(std::move(mesh), family, bc);
}

DiscreteField::DiscreteField(std::shared_ptr<const FeSpace> space)
    : space_(std::move(space)), coefficients_(Eigen::VectorXcd::Zero(space_ ? space_->num_dofs() : 0)) {
    if (!space_) {
        throw InvalidArgument("DiscreteField requires a space");
    }
}

DiscreteField::DiscreteField(std::shared_ptr<const FeSpace> space, Eigen::VectorXcd coefficients)
    : space_(std::move(space)), coefficients_(std::move(coefficients)) {
    if (!space_) {
        throw InvalidArgument("DiscreteField requires a space");
    }
    if (coefficients_.size() != space_->num_dofs()) {
        throw InvalidArgument("coefficient count " + std::to_string(coefficients_.size()) +
                              " does not match the free DOF count " + std::to_string(space_->num_dofs()));
    }
}

std::array<Complex, 6> local_coefficients(const DiscreteField& field, int cell) {
    std::array<Complex, 6> local{};
    const auto dofs = field.space().cell_dofs(cell);
    const auto signs = field.space().cell_signs(cell);
    for (std::size_t k = 0; k < dofs.size(); ++k) {
        if (dofs[k] >= 0) {
            local[k] = static_cast<Real>(signs[k]) * field.coefficients()[dofs[k]];
        }
    }
    return local;
}

FieldSample eval(const DiscreteField& field, int cell, const Vec3& ref) {
    const Family family = field.space().family();
    const auto local = local_coefficients(field, cell);
    const ShapeSet phi = eval_physical_basis(family, field.space().mesh().transform(cell), ref);
    if (is_vector_family(family)) {
        CVec3 v = CVec3::Zero();
        for (int k = 0; k < phi.count; ++k) {
            v += local[static_cast<std::size_t>(k)] * complex_vec(phi[k].vector);
        }
        return v;
    }
    Complex s{0.0};
    for (int k = 0; k < phi.count; ++k) {
        s += local[static_cast<std::size_t>(k)] * phi[k].scalar;
    }
    return s;
}

FieldSample eval_deriv(const DiscreteField& field, int cell, const Vec3& ref) {
    const Family family = field.space().family();
    if (family == Family::L2) {
        return Complex{0.0};
    }
    const auto local = local_coefficients(field, cell);
    const ShapeSet phi = eval_physical_basis(family, field.space().mesh().transform(cell), ref);
    if (family == Family::HDiv) {
        Complex s{0.0};
        for (int k = 0; k < phi.count; ++k) {
            s += local[static_cast<std::size_t>(k)] * phi[k].divergence;
        }
        return s;
    }
    CVec3 v = CVec3::Zero();
    for (int k = 0; k < phi.count; ++k) {
        v += local[static_cast<std::size_t>(k)] * complex_vec(phi[k].derivative);
    }
    return v;
}

Complex eval_scalar(const DiscreteField& field, int cell, const Vec3& ref) {
    if (is_vector_family(field.space().family())) {
        throw InvalidArgument("eval_scalar requires a scalar family");
    }
    return std::get<Complex>(eval(field, cell, ref));
}

CVec3 eval_vector(const DiscreteField& field, int cell, const Vec3& ref) {
    if (!is_vector_family(field.space().family())) {
        throw InvalidArgument("eval_vector requires a vector family");
    }
    return std::get<CVec3>(eval(field, cell, ref));
}

CVec3 eval_gradient(const DiscreteField& field, int cell, const Vec3& ref) {
    require_family(field, Family::H1, "eval_gradient");
    return std::get<CVec3>(eval_deriv(field, cell, ref));
}

CVec3 eval_curl(const DiscreteField& field, int cell, const Vec3& ref) {
    require_family(field, Family::HCurl, "eval_curl");
    return std::get<CVec3>(eval_deriv(field, cell, ref));
}

Complex eval_divergence(const DiscreteField& field, int cell, const Vec3& ref) {
    require_family(field, Family::HDiv, "eval_divergence");
    return std::get<Complex>(eval_deriv(field, cell, ref));
}

FieldSample eval_at(const DiscreteField& field, const Vec3& x) {
    const auto loc = field.space().mesh().locate(x);
    if (!loc) {
        throw InvalidArgument("evaluation point lies outside the mesh");
    }
    return eval(field, loc->cell, loc->ref);
}

FieldSample eval_deriv_at(const DiscreteField& field, const Vec3& x) {
    const auto loc = field.space().mesh().locate(x);
    if (!loc) {
        throw InvalidArgument("evaluation point lies outside the mesh");
    }
    return eval_deriv(field, loc->cell, loc->ref);
}

Real magnitude(const FieldSample& sample) {
    if (const auto* s = std::get_if<Complex>(&sample)) {
        return std::abs(*s);
    }
    return std::get<CVec3>(sample).norm();
}

FieldSample operator-(const FieldSample& a, const FieldSample& b) {
    if (a.index() != b.index()) {
        throw InvalidArgument("cannot subtract a scalar and a vector sample");
    }
    if (const auto* s = std::get_if<Complex>(&a)) {
        return *s - std::get<Complex>(b);
    }
    return CVec3(std::get<CVec3>(a) - std::get<CVec3>(b));
}

std::vector<FieldSample> jump(const DiscreteField& field, int face, const TriangleRule& rule) {
    const Mesh& mesh = field.space().mesh();
    const Family family = field.space().family();
    if (family == Family::L2) {
        throw InvalidArgument("jumps are not defined for the L2 family");
    }
    if (mesh.classify_face(face) == FaceKind::Boundary) {
        throw InvalidArgument("jump requested on boundary face " + std::to_string(face));
    }
    const auto [left, right] = mesh.face_cells(face);
    const Vec3& n = mesh.face_normal(face);
    std::vector<FieldSample> out;
    out.reserve(rule.points.size());
    for (const auto& st : rule.points) {
        const Vec3 x = face_point(mesh, face, st);
        const FieldSample diff = eval(field, left, mesh.transform(left).pull_back(x)) -
                                 eval(field, right, mesh.transform(right).pull_back(x));
        switch (family) {
        case Family::H1: out.push_back(diff); break;
        case Family::HCurl: out.emplace_back(cross(std::get<CVec3>(diff), n)); break;
        case Family::HDiv: out.emplace_back(dot(std::get<CVec3>(diff), n)); break;
        case Family::L2: break;
        }
    }
    return out;
}

Real max_jump(const DiscreteField& field, int quad_degree) {
    const Mesh& mesh = field.space().mesh();
    const TriangleRule rule = triangle_rule(quad_degree);
    Real worst = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (mesh.is_boundary_face(f)) {
            continue;
        }
        for (const auto& s : jump(field, f, rule)) {
            worst = std::max(worst, magnitude(s));
        }
    }
    return worst;
}

Real max_boundary_trace(const DiscreteField& field, int quad_degree) {
    const Mesh& mesh = field.space().mesh();
    const Family family = field.space().family();
    const TriangleRule rule = triangle_rule(quad_degree);
    Real worst = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (!mesh.is_boundary_face(f)) {
            continue;
        }
        const auto [left, right] = mesh.face_cells(f);
        const int cell = left >= 0 ? left : right;
        const Vec3& n = mesh.face_normal(f);
        for (const auto& st : rule.points) {
            const Vec3 x = face_point(mesh, f, st);
            const FieldSample v = eval(field, cell, mesh.transform(cell).pull_back(x));
            Real trace = 0.0;
            switch (family) {
            case Family::HCurl: trace = cross(std::get<CVec3>(v), n).norm(); break;
            case Family::HDiv: trace = std::abs(dot(std::get<CVec3>(v), n)); break;
            default: trace = magnitude(v); break;
            }
            worst = std::max(worst, trace);
        }
    }
    return worst;
}

Eigen::SparseMatrix<Real> gradient_matrix(const FeSpace& h1, const FeSpace& hcurl) {
    if (h1.family() != Family::H1 || hcurl.family() != Family::HCurl) {
        throw InvalidArgument("gradient_matrix maps H1 to HCurl");
    }
    require_compatible(h1, hcurl);
    const Mesh& mesh = h1.mesh();
    std::vector<Eigen::Triplet<Real>> triplets;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const int row = hcurl.entity_dof(e);
        if (row < 0) {
            continue;
        }
        const auto& ev = mesh.edges()[static_cast<std::size_t>(e)];
        if (const int lo = h1.entity_dof(ev[0]); lo >= 0) {
            triplets.emplace_back(row, lo, -1.0);
        }
        if (const int hi = h1.entity_dof(ev[1]); hi >= 0) {
            triplets.emplace_back(row, hi, 1.0);
        }
    }
    Eigen::SparseMatrix<Real> g(hcurl.num_dofs(), h1.num_dofs());
    g.setFromTriplets(triplets.begin(), triplets.end());
    return g;
}

Eigen::SparseMatrix<Real> curl_matrix(const FeSpace& hcurl, const FeSpace& hdiv) {
    if (hcurl.family() != Family::HCurl || hdiv.family() != Family::HDiv) {
        throw InvalidArgument("curl_matrix maps HCurl to HDiv");
    }
    require_compatible(hcurl, hdiv);
    const Mesh& mesh = hcurl.mesh();
    std::vector<Eigen::Triplet<Real>> triplets;
    constexpr std::array<Real, 3> orientation{1.0, 1.0, -1.0};
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const int row = hdiv.entity_dof(f);
        if (row < 0) {
            continue;
        }
        const auto& fe = mesh.face_edges(f);
        for (std::size_t k = 0; k < 3; ++k) {
            if (const int col = hcurl.entity_dof(fe[k]); col >= 0) {
                triplets.emplace_back(row, col, orientation[k]);
            }
        }
    }
    Eigen::SparseMatrix<Real> c(hdiv.num_dofs(), hcurl.num_dofs());
    c.setFromTriplets(triplets.begin(), triplets.end());
    return c;
}

Eigen::SparseMatrix<Real> divergence_matrix(const FeSpace& hdiv, const FeSpace& l2) {
    if (hdiv.family() != Family::HDiv || l2.family() != Family::L2) {
        throw InvalidArgument("divergence_matrix maps HDiv to L2");
    }
    if (&hdiv.mesh() != &l2.mesh()) {
        throw InvalidArgument("spaces live on different meshes");
    }
    const Mesh& mesh = hdiv.mesh();
    std::vector<Eigen::Triplet<Real>> triplets;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const int row = l2.entity_dof(c);
        for (int f : mesh.cell_faces(c)) {
            if (const int col = hdiv.entity_dof(f); col >= 0) {
                triplets.emplace_back(row, col, mesh.face_cells(f)[0] == c ? 1.0 : -1.0);
            }
        }
    }
    Eigen::SparseMatrix<Real> d(l2.num_dofs(), hdiv.num_dofs());
    d.setFromTriplets(triplets.begin(), triplets.end());
    return d;
}

namespace {

Real integrate_squared(const DiscreteField& field, int quad_degree, bool derivative) {
    const Mesh& mesh = field.space().mesh();
    const TetQuadrature rule = tet_rule(quad_degree);
    Real sum = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const Real det = mesh.transform(c).det;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const FieldSample s = derivative ? eval_deriv(field, c, rule.points[q]) : eval(field, c, rule.points[q]);
            const Real m = magnitude(s);
            sum += rule.weights[q] * det * m * m;
        }
    }
    return sum;
}

}  // namespace

Real l2_norm(const DiscreteField& field, int quad_degree) {
    return std::sqrt(integrate_squared(field, quad_degree, false));
}

Real derivative_l2_norm(const DiscreteField& field, int quad_degree) {
    return std::sqrt(integrate_squared(field, quad_degree, true));
}

}  // namespace curlfem
