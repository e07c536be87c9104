#pragma once

// Lowest-order reference elements of the discrete de Rham sequence on the unit
// tetrahedron with vertices (0,0,0), (1,0,0), (0,1,0), (0,0,1):
//
//   P1 Lagrange --grad--> Nedelec N0 --curl--> Raviart-Thomas RT0 --div--> P0
//
// All degrees of freedom are integral functionals (vertex values, edge
// circulations, face fluxes, cell integrals), so the canonical interpolants
// commute with the differential operators without scaling factors.

#include <array>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "curlfem/types.hpp"

namespace curlfem {

/// The four families, named after the operator they are conforming for.
enum class Family {
    H1,     ///< P1 Lagrange (g)
    HCurl,  ///< Nedelec first kind, lowest order (c)
    HDiv,   ///< Raviart-Thomas, lowest order (d)
    L2,     ///< piecewise constants (b)
};

/// Single-letter family code: 'g', 'c', 'd' or 'b'.
char family_code(Family family);
Family family_from_code(char code);
std::string_view family_name(Family family);

/// Number of local shape functions (4, 6, 4, 1).
int local_dof_count(Family family);

bool is_vector_family(Family family);

/// Local edge k joins local vertices kLocalEdges[k][0] -> kLocalEdges[k][1].
inline constexpr std::array<std::array<int, 2>, 6> kLocalEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Local face k is opposite local vertex k; its vertex order (a,b,c) defines the
/// orientation (x_b - x_a) x (x_c - x_a).
inline constexpr std::array<std::array<int, 3>, 4> kLocalFaces{
    {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

/// Reference vertex coordinates.
const std::array<Vec3, 4>& reference_vertices();

/// Reference tetrahedron volume (1/6).
inline constexpr Real kReferenceVolume = 1.0 / 6.0;

/// Affine map T(x̂) = B x̂ + b of a cell.
struct CellTransform {
    Mat3 jacobian = Mat3::Identity();
    Vec3 offset = Vec3::Zero();
    Real det = 1.0;
    Mat3 inverse = Mat3::Identity();
    Mat3 inverse_transpose = Mat3::Identity();

    /// Builds the transform mapping the reference vertices onto `v`.
    /// Throws InvalidArgument when det B <= 0.
    static CellTransform from_vertices(const std::array<Vec3, 4>& v);
    static CellTransform from_jacobian(const Mat3& jacobian, const Vec3& offset);

    Vec3 map(const Vec3& ref) const { return jacobian * ref + offset; }
    Vec3 pull_back(const Vec3& x) const { return inverse * (x - offset); }
    Real volume() const { return det * kReferenceVolume; }
};

/// Value and first derivative of one shape function at one point.
///
/// Scalar families use `scalar` and vector families use `vector`. The
/// derivative is the gradient (H1) or curl (HCurl) in `derivative`, and the
/// divergence (HDiv) in `divergence`. L2 shape functions have no derivative.
struct ShapeSample {
    Real scalar = 0.0;
    Vec3 vector = Vec3::Zero();
    Vec3 derivative = Vec3::Zero();
    Real divergence = 0.0;
};

/// Shape function values of one family at one point (at most six).
struct ShapeSet {
    std::array<ShapeSample, 6> samples{};
    int count = 0;

    const ShapeSample& operator[](int i) const { return samples[static_cast<std::size_t>(i)]; }
    ShapeSample& operator[](int i) { return samples[static_cast<std::size_t>(i)]; }
    auto begin() const { return samples.begin(); }
    auto end() const { return samples.begin() + count; }
};

/// Reference shape functions of `family` at the reference point `ref`.
ShapeSet eval_basis(Family family, const Vec3& ref);

/// Maps reference samples to a physical cell (inverse of the pullbacks
/// v∘T, Bᵀ(v∘T), det(B)B⁻¹(v∘T), det(B)(v∘T)).
ShapeSample pushforward(Family family, const CellTransform& transform, const ShapeSample& ref);
ShapeSet pushforward(Family family, const CellTransform& transform, const ShapeSet& ref);

/// Physical shape functions on a cell: pushforward(eval_basis(ref)).
ShapeSet eval_physical_basis(Family family, const CellTransform& transform, const Vec3& ref);

/// Reference point callable used by the DOF functionals.
using ReferenceFunction = std::function<ShapeSample(const Vec3&)>;

/// Applies the reference DOF functionals of `family` to `f` using Gauss rules of
/// the given exactness degree on edges/faces/cells.
std::vector<Real> apply_reference_dofs(Family family, const ReferenceFunction& f, int quad_degree);

/// Matrix (σ_i(φ_j)) of DOF functionals applied to the shape functions.
Eigen::MatrixXd dof_matrix(Family family, int quad_degree);

}  // namespace curlfem
