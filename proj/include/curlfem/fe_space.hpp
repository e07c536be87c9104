#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "curlfem/mesh.hpp"
#include "curlfem/quadrature.hpp"
#include "curlfem/reference_elements.hpp"
#include "curlfem/types.hpp"

namespace curlfem {

enum class BoundaryCondition {
    None,
    Essential,  ///< homogeneous essential condition, eliminated from the DOF set
};

/// Global conforming space of one family on a mesh.
///
/// DOFs are attached to vertices (H1), edges (HCurl), faces (HDiv) or cells
/// (L2). With an essential condition the DOFs on boundary entities are
/// dropped; the remaining ("free") DOFs are numbered in entity order.
class FeSpace {
public:
    FeSpace(std::shared_ptr<const Mesh> mesh, Family family, BoundaryCondition bc);

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    Family family() const { return family_; }
    BoundaryCondition bc() const { return bc_; }
    bool has_bc() const { return bc_ == BoundaryCondition::Essential; }

    /// Number of free DOFs.
    int num_dofs() const { return static_cast<int>(dof_entity_.size()); }
    int num_entities() const { return static_cast<int>(entity_dof_.size()); }
    int local_count() const { return local_count_; }

    /// Free DOF index per local DOF of `cell`; -1 marks a constrained DOF.
    std::span<const int> cell_dofs(int cell) const;
    /// Orientation sign (+1/-1) per local DOF of `cell`.
    std::span<const std::int8_t> cell_signs(int cell) const;

    int entity_dof(int entity) const { return entity_dof_[static_cast<std::size_t>(entity)]; }
    int dof_entity(int dof) const { return dof_entity_[static_cast<std::size_t>(dof)]; }
    const std::vector<int>& constrained_entities() const { return constrained_; }

private:
    std::shared_ptr<const Mesh> mesh_;
    Family family_;
    BoundaryCondition bc_;
    int local_count_;
    std::vector<int> entity_dof_;
    std::vector<int> dof_entity_;
    std::vector<int> constrained_;
    std::vector<int> cell_dofs_;
    std::vector<std::int8_t> cell_signs_;
};

/// Throws InvalidArgument when an essential condition is requested for L2.
std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const Mesh> mesh, Family family,
                                           BoundaryCondition bc = BoundaryCondition::None);

/// Complex coefficient vector over the free DOFs of a space.
class DiscreteField {
public:
    explicit DiscreteField(std::shared_ptr<const FeSpace> space);
    DiscreteField(std::shared_ptr<const FeSpace> space, Eigen::VectorXcd coefficients);

    const FeSpace& space() const { return *space_; }
    const std::shared_ptr<const FeSpace>& space_ptr() const { return space_; }
    const Eigen::VectorXcd& coefficients() const { return coefficients_; }
    Eigen::VectorXcd& coefficients() { return coefficients_; }

private:
    std::shared_ptr<const FeSpace> space_;
    Eigen::VectorXcd coefficients_;
};

/// Scalar value (H1, L2, divergence) or vector value (HCurl, HDiv, gradient, curl).
using FieldSample = std::variant<Complex, CVec3>;

/// Signed local coefficients of `cell` (constrained DOFs contribute zero).
std::array<Complex, 6> local_coefficients(const DiscreteField& field, int cell);

FieldSample eval(const DiscreteField& field, int cell, const Vec3& ref);
/// Gradient (H1), curl (HCurl), divergence (HDiv); zero scalar for L2.
FieldSample eval_deriv(const DiscreteField& field, int cell, const Vec3& ref);

Complex eval_scalar(const DiscreteField& field, int cell, const Vec3& ref);
CVec3 eval_vector(const DiscreteField& field, int cell, const Vec3& ref);
CVec3 eval_gradient(const DiscreteField& field, int cell, const Vec3& ref);
CVec3 eval_curl(const DiscreteField& field, int cell, const Vec3& ref);
Complex eval_divergence(const DiscreteField& field, int cell, const Vec3& ref);

/// Evaluates at a physical point by locating its cell.
FieldSample eval_at(const DiscreteField& field, const Vec3& x);
FieldSample eval_deriv_at(const DiscreteField& field, const Vec3& x);

/// Jump across an interior face, v|K_l - v|K_r, sampled at the physical images
/// of `rule` on the face: full jump (H1), [v] x n_F (HCurl), [v]·n_F (HDiv).
/// Throws InvalidArgument for boundary faces or L2 fields.
std::vector<FieldSample> jump(const DiscreteField& field, int face, const TriangleRule& rule);

/// Largest jump magnitude over all interior faces.
Real max_jump(const DiscreteField& field, int quad_degree = 4);

/// Largest tangential (HCurl) or normal (HDiv) trace magnitude, or value
/// magnitude (H1), over boundary-face quadrature points.
Real max_boundary_trace(const DiscreteField& field, int quad_degree = 4);

/// Exact coefficient maps of the discrete sequence. Both spaces must live on
/// the same mesh with the same boundary condition.
Eigen::SparseMatrix<Real> gradient_matrix(const FeSpace& h1, const FeSpace& hcurl);
Eigen::SparseMatrix<Real> curl_matrix(const FeSpace& hcurl, const FeSpace& hdiv);
Eigen::SparseMatrix<Real> divergence_matrix(const FeSpace& hdiv, const FeSpace& l2);

/// L² norm of a field's value, and of its derivative, by cellwise quadrature.
Real l2_norm(const DiscreteField& field, int quad_degree = 4);
Real derivative_l2_norm(const DiscreteField& field, int quad_degree = 4);

Real magnitude(const FieldSample& sample);
FieldSample operator-(const FieldSample& a, const FieldSample& b);

}  // namespace curlfem
