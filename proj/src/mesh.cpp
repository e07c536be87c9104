#include "curlfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_map>

namespace curlfem {

namespace {

// Axis orders of the six Kuhn simplices of a unit cube, in lexicographic order.
constexpr std::array<std::array<int, 3>, 6> kKuhnPermutations{
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

bool is_odd(const std::array<int, 3>& p) {
    int inversions = 0;
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            inversions += p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(j)] ? 1 : 0;
        }
    }
    return inversions % 2 == 1;
}

int permutation_index(const std::array<int, 3>& p) {
    for (std::size_t i = 0; i < kKuhnPermutations.size(); ++i) {
        if (kKuhnPermutations[i] == p) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

std::uint64_t edge_key(int a, int b) {
    return (static_cast<std::uint64_t>(a) << 32U) | static_cast<std::uint64_t>(b);
}

struct FaceKeyHash {
    std::size_t operator()(const std::array<int, 3>& f) const {
        std::uint64_t h = static_cast<std::uint64_t>(f[0]);
        h = h * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(f[1]);
        h = h * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(f[2]);
        return static_cast<std::size_t>(h ^ (h >> 29U));
    }
};

void validate(const BoxMeshSpec& spec) {
    for (int d = 0; d < 3; ++d) {
        if (!(spec.upper[d] > spec.lower[d])) {
            throw InvalidArgument("degenerate box: upper corner must exceed lower corner along axis " +
                                  std::to_string(d));
        }
        if (spec.resolution[static_cast<std::size_t>(d)] < 1) {
            throw InvalidArgument("box resolution must be >= 1 along axis " + std::to_string(d));
        }
    }
}

}  // namespace

SubdomainRule octant_rule(const Vec3& lower, const Vec3& upper) {
    const Vec3 mid = 0.5 * (lower + upper);
    return [mid](const Vec3& x) {
        return (x.x() >= mid.x() ? 1 : 0) + (x.y() >= mid.y() ? 2 : 0) + (x.z() >= mid.z() ? 4 : 0);
    };
}

BoxMeshSpec BoxMeshSpec::unit_cube(int n) {
    BoxMeshSpec spec;
    spec.resolution = {n, n, n};
    return spec;
}

Mesh::Mesh(const BoxMeshSpec& spec) : spec_(spec) {
    validate(spec_);
    if (!spec_.subdomain_rule) {
        spec_.subdomain_rule = octant_rule(spec_.lower, spec_.upper);
    }
    const int nx = spec_.resolution[0];
    const int ny = spec_.resolution[1];
    const int nz = spec_.resolution[2];
    const Vec3 step((spec_.upper.x() - spec_.lower.x()) / nx, (spec_.upper.y() - spec_.lower.y()) / ny,
                    (spec_.upper.z() - spec_.lower.z()) / nz);

    auto vertex_id = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

    vertices_.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)));
    boundary_vertex_.reserve(vertices_.capacity());
    std::vector<std::array<int, 3>> grid_index;
    grid_index.reserve(vertices_.capacity());
    for (int k = 0; k <= nz; ++k) {
        for (int j = 0; j <= ny; ++j) {
            for (int i = 0; i <= nx; ++i) {
                // Snap the far corner exactly onto the upper bound.
                Vec3 x = spec_.lower + Vec3(i * step.x(), j * step.y(), k * step.z());
                if (i == nx) x.x() = spec_.upper.x();
                if (j == ny) x.y() = spec_.upper.y();
                if (k == nz) x.z() = spec_.upper.z();
                vertices_.push_back(x);
                grid_index.push_back({i, j, k});
                const bool on_boundary = i == 0 || j == 0 || k == 0 || i == nx || j == ny || k == nz;
                boundary_vertex_.push_back(on_boundary ? 1 : 0);
            }
        }
    }

    const std::array<int, 3> res{nx, ny, nz};
    auto shares_boundary_plane = [&](const std::vector<int>& verts) {
        for (std::size_t d = 0; d < 3; ++d) {
            for (int plane : {0, res[d]}) {
                const bool all = std::all_of(verts.begin(), verts.end(), [&](int v) {
                    return grid_index[static_cast<std::size_t>(v)][d] == plane;
                });
                if (all) {
                    return true;
                }
            }
        }
        return false;
    };

    const std::size_t ncells = static_cast<std::size_t>(6 * nx * ny * nz);
    cells_.reserve(ncells);
    cell_edges_.reserve(ncells);
    cell_edge_signs_.reserve(ncells);
    cell_faces_.reserve(ncells);
    cell_face_signs_.reserve(ncells);
    cell_tags_.reserve(ncells);
    transforms_.reserve(ncells);

    std::unordered_map<std::uint64_t, int> edge_ids;
    std::unordered_map<std::array<int, 3>, int, FaceKeyHash> face_ids;

    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                for (const auto& perm : kKuhnPermutations) {
                    std::array<int, 3> pos{i, j, k};
                    std::array<int, 4> tet{};
                    tet[0] = vertex_id(pos[0], pos[1], pos[2]);
                    for (std::size_t s = 0; s < 3; ++s) {
                        ++pos[static_cast<std::size_t>(perm[s])];
                        tet[s + 1] = vertex_id(pos[0], pos[1], pos[2]);
                    }
                    if (is_odd(perm)) {
                        std::swap(tet[2], tet[3]);
                    }
                    cells_.push_back(tet);
                }
            }
        }
    }

    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const auto& tet = cells_[c];
        std::array<Vec3, 4> xv;
        for (std::size_t a = 0; a < 4; ++a) {
            xv[a] = vertices_[static_cast<std::size_t>(tet[a])];
        }
        transforms_.push_back(CellTransform::from_vertices(xv));
        const Vec3 centroid = 0.25 * (xv[0] + xv[1] + xv[2] + xv[3]);
        cell_tags_.push_back(spec_.subdomain_rule(centroid));

        std::array<int, 6> ce{};
        std::array<std::int8_t, 6> cs{};
        for (std::size_t e = 0; e < 6; ++e) {
            const int va = tet[static_cast<std::size_t>(kLocalEdges[e][0])];
            const int vb = tet[static_cast<std::size_t>(kLocalEdges[e][1])];
            const int lo = std::min(va, vb);
            const int hi = std::max(va, vb);
            auto [it, inserted] = edge_ids.try_emplace(edge_key(lo, hi), static_cast<int>(edges_.size()));
            if (inserted) {
                edges_.push_back({lo, hi});
                boundary_edge_.push_back(shares_boundary_plane({lo, hi}) ? 1 : 0);
            }
            ce[e] = it->second;
            cs[e] = va < vb ? 1 : -1;
        }
        cell_edges_.push_back(ce);
        cell_edge_signs_.push_back(cs);

        std::array<int, 4> cf{};
        std::array<std::int8_t, 4> fs{};
        for (std::size_t f = 0; f < 4; ++f) {
            std::array<int, 3> local{};
            for (std::size_t m = 0; m < 3; ++m) {
                local[m] = tet[static_cast<std::size_t>(kLocalFaces[f][m])];
            }
            std::array<int, 3> sorted = local;
            std::sort(sorted.begin(), sorted.end());
            auto [it, inserted] = face_ids.try_emplace(sorted, static_cast<int>(faces_.size()));
            if (inserted) {
                faces_.push_back(sorted);
                const Vec3& p = vertices_[static_cast<std::size_t>(sorted[0])];
                const Vec3& q = vertices_[static_cast<std::size_t>(sorted[1])];
                const Vec3& r = vertices_[static_cast<std::size_t>(sorted[2])];
                face_normals_.push_back((q - p).cross(r - p).normalized());
                face_cells_.push_back({-1, -1});
                face_edges_.push_back({edge_ids.at(edge_key(sorted[0], sorted[1])),
                                       edge_ids.at(edge_key(sorted[1], sorted[2])),
                                       edge_ids.at(edge_key(sorted[0], sorted[2]))});
            }
            const int fid = it->second;
            const Vec3& n = face_normals_[static_cast<std::size_t>(fid)];
            const Vec3& a = vertices_[static_cast<std::size_t>(local[0])];
            const Vec3& b = vertices_[static_cast<std::size_t>(local[1])];
            const Vec3& cc = vertices_[static_cast<std::size_t>(local[2])];
            cf[f] = fid;
            fs[f] = (b - a).cross(cc - a).dot(n) > 0.0 ? 1 : -1;

            const Vec3 face_centroid = (a + b + cc) / 3.0;
            const bool outward = n.dot(face_centroid - centroid) > 0.0;
            auto& adj = face_cells_[static_cast<std::size_t>(fid)];
            auto& slot = outward ? adj[0] : adj[1];
            if (slot >= 0) {
                throw Error("mesh construction produced a non-matching face");
            }
            slot = static_cast<int>(c);
        }
        cell_faces_.push_back(cf);
        cell_face_signs_.push_back(fs);

        for (std::size_t a = 0; a < 4; ++a) {
            for (std::size_t b = a + 1; b < 4; ++b) {
                mesh_size_ = std::max(mesh_size_, (xv[a] - xv[b]).norm());
            }
        }
    }
}

std::array<Vec3, 4> Mesh::cell_vertices(int cell) const {
    const auto& tet = cells_[idx(cell)];
    return {vertices_[idx(tet[0])], vertices_[idx(tet[1])], vertices_[idx(tet[2])], vertices_[idx(tet[3])]};
}

std::vector<int> Mesh::tags() const {
    std::set<int> unique(cell_tags_.begin(), cell_tags_.end());
    return {unique.begin(), unique.end()};
}

Real Mesh::diameter() const { return (spec_.upper - spec_.lower).norm(); }

Real Mesh::mesh_size() const { return mesh_size_; }

int Mesh::classify_point(const Vec3& x) const {
    for (int d = 0; d < 3; ++d) {
        if (x[d] < spec_.lower[d] || x[d] > spec_.upper[d]) {
            throw InvalidArgument("point lies outside the mesh");
        }
    }
    return spec_.subdomain_rule(x);
}

FaceKind Mesh::classify_face(int face) const {
    if (face < 0 || face >= num_faces()) {
        throw InvalidArgument("face id " + std::to_string(face) + " is not part of the mesh");
    }
    return is_boundary_face(face) ? FaceKind::Boundary : FaceKind::Interior;
}

std::optional<PointLocation> Mesh::locate(const Vec3& x, Real tolerance) const {
    std::array<int, 3> cube{};
    Vec3 u;
    for (int d = 0; d < 3; ++d) {
        const Real extent = spec_.upper[d] - spec_.lower[d];
        const Real t = (x[d] - spec_.lower[d]) / extent;
        if (t < -tolerance || t > 1.0 + tolerance) {
            return std::nullopt;
        }
        const int n = spec_.resolution[static_cast<std::size_t>(d)];
        const Real s = std::clamp(t, 0.0, 1.0) * n;
        const int c = std::clamp(static_cast<int>(std::floor(s)), 0, n - 1);
        cube[static_cast<std::size_t>(d)] = c;
        u[d] = s - c;
    }
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return u[a] > u[b]; });
    const int nx = spec_.resolution[0];
    const int ny = spec_.resolution[1];
    const int cube_id = cube[0] + nx * (cube[1] + ny * cube[2]);
    PointLocation loc;
    loc.cell = 6 * cube_id + permutation_index(order);
    loc.ref = transforms_[idx(loc.cell)].pull_back(x);
    return loc;
}

std::shared_ptr<const Mesh> build_box_mesh(const BoxMeshSpec& spec) { return std::make_shared<const Mesh>(spec); }

}  // namespace curlfem
