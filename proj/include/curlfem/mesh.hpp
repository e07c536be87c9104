#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "curlfem/reference_elements.hpp"
#include "curlfem/types.hpp"

namespace curlfem {

/// Maps a cell barycenter to a subdomain tag.
using SubdomainRule = std::function<int(const Vec3&)>;

/// Tags the eight octants of the box [lower, upper] as ix + 2 iy + 4 iz, where
/// i* is 1 on the upper half of the corresponding axis.
SubdomainRule octant_rule(const Vec3& lower, const Vec3& upper);

struct BoxMeshSpec {
    Vec3 lower = Vec3::Zero();
    Vec3 upper = Vec3::Ones();
    std::array<int, 3> resolution{1, 1, 1};
    /// Defaults to octant_rule(lower, upper) when empty.
    SubdomainRule subdomain_rule;

    static BoxMeshSpec unit_cube(int n);
};

enum class FaceKind { Interior, Boundary };

/// Cell containing a point together with its reference coordinates.
struct PointLocation {
    int cell = -1;
    Vec3 ref = Vec3::Zero();
};

/// Matching tetrahedral mesh of an axis-aligned box built by Kuhn subdivision.
///
/// Entity orientation is global: edge e runs from edges()[e][0] to
/// edges()[e][1] (increasing vertex id), and face f carries the unit normal
/// (x_q - x_p) x (x_r - x_p) / |.| for its sorted vertex triple (p, q, r).
/// face_cells(f) = {left, right} with the normal pointing left -> right; a
/// missing neighbour is -1. Per-cell signs compare the local orientation of
/// kLocalEdges / kLocalFaces with the global one.
///
/// Immutable after construction.
class Mesh {
public:
    explicit Mesh(const BoxMeshSpec& spec);

    const BoxMeshSpec& spec() const { return spec_; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 4>>& cells() const { return cells_; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    const std::vector<std::array<int, 3>>& faces() const { return faces_; }

    const Vec3& vertex(int v) const { return vertices_[idx(v)]; }
    std::array<Vec3, 4> cell_vertices(int cell) const;

    const std::array<int, 6>& cell_edges(int cell) const { return cell_edges_[idx(cell)]; }
    const std::array<std::int8_t, 6>& cell_edge_signs(int cell) const { return cell_edge_signs_[idx(cell)]; }
    const std::array<int, 4>& cell_faces(int cell) const { return cell_faces_[idx(cell)]; }
    const std::array<std::int8_t, 4>& cell_face_signs(int cell) const { return cell_face_signs_[idx(cell)]; }

    const std::array<int, 2>& face_cells(int face) const { return face_cells_[idx(face)]; }
    const Vec3& face_normal(int face) const { return face_normals_[idx(face)]; }
    /// Edges (p,q), (q,r), (p,r) of the face with sorted vertices (p,q,r).
    const std::array<int, 3>& face_edges(int face) const { return face_edges_[idx(face)]; }

    bool is_boundary_vertex(int v) const { return boundary_vertex_[idx(v)] != 0; }
    bool is_boundary_edge(int e) const { return boundary_edge_[idx(e)] != 0; }
    bool is_boundary_face(int f) const { return face_cells_[idx(f)][1] < 0 || face_cells_[idx(f)][0] < 0; }

    int cell_tag(int cell) const { return cell_tags_[idx(cell)]; }
    /// Sorted distinct tags present in the mesh.
    std::vector<int> tags() const;

    const CellTransform& transform(int cell) const { return transforms_[idx(cell)]; }

    /// ℓ_D: length of the box diagonal.
    Real diameter() const;
    /// h: maximum cell diameter.
    Real mesh_size() const;

    /// Subdomain tag of a point; throws InvalidArgument outside the box.
    int classify_point(const Vec3& x) const;
    /// Throws InvalidArgument for a face id out of range.
    FaceKind classify_face(int face) const;

    /// Cell containing x (closed cells, ties broken deterministically), or
    /// nullopt when x lies outside the box by more than `tolerance`.
    std::optional<PointLocation> locate(const Vec3& x, Real tolerance = 1e-12) const;

private:
    static std::size_t idx(int i) { return static_cast<std::size_t>(i); }

    BoxMeshSpec spec_;
    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 4>> cells_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<std::array<int, 6>> cell_edges_;
    std::vector<std::array<std::int8_t, 6>> cell_edge_signs_;
    std::vector<std::array<int, 4>> cell_faces_;
    std::vector<std::array<std::int8_t, 4>> cell_face_signs_;
    std::vector<std::array<int, 2>> face_cells_;
    std::vector<Vec3> face_normals_;
    std::vector<std::array<int, 3>> face_edges_;
    std::vector<char> boundary_vertex_;
    std::vector<char> boundary_edge_;
    std::vector<int> cell_tags_;
    std::vector<CellTransform> transforms_;
    Real mesh_size_ = 0.0;
};

/// Builds a shared, immutable Kuhn mesh. Throws InvalidArgument on a degenerate
/// box or a non-positive resolution.
std::shared_ptr<const Mesh> build_box_mesh(const BoxMeshSpec& spec);

}  // namespace curlfem
