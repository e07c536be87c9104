#pragma once

#include <functional>
#include <iosfwd>
#include <memory>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "curlfem/coefficients.hpp"
#include "curlfem/fe_space.hpp"
#include "curlfem/interpolation.hpp"
#include "curlfem/quadrature.hpp"
#include "curlfem/types.hpp"

namespace curlfem {

using SparseMatrixC = Eigen::SparseMatrix<Complex>;

/// Sparse complex operator between the free DOFs of two spaces.
struct SystemMatrix {
    SparseMatrixC matrix;
    std::shared_ptr<const FeSpace> row_space;
    std::shared_ptr<const FeSpace> col_space;
    /// Set when the assembled form is complex symmetric (Aᵀ = A, not Hermitian).
    bool symmetric = false;

    int rows() const { return static_cast<int>(matrix.rows()); }
    int cols() const { return static_cast<int>(matrix.cols()); }

    /// max|A - Aᵀ| / max|A| (0 for a zero matrix). Throws for non-square matrices.
    Real symmetry_defect() const;
};

struct AssemblyOptions {
    int quad_degree = 4;
    /// Worker threads for the cell-local kernels. Results do not depend on it:
    /// local matrices are merged in cell order.
    int threads = 1;
};

/// Cell-local N₀ matrices in the reference-local edge orientation:
/// mass(i,j) = ∫ μ φ_j·φ_i and curl_curl(i,j) = ∫ κ curl φ_j·curl φ_i.
struct ElementMatrices {
    Eigen::Matrix<Complex, 6, 6> mass;
    Eigen::Matrix<Complex, 6, 6> curl_curl;
};

using PointCoefficient = std::function<Complex(const Vec3&)>;

ElementMatrices element_matrices(const CellTransform& transform, const PointCoefficient& mu,
                                 const PointCoefficient& kappa, const TetQuadrature& rule);

/// ∫ (μ̃ φ_j·φ_i + κ curl φ_j·curl φ_i) over an HCurl space.
SystemMatrix assemble_a(std::shared_ptr<const FeSpace> space, const CoefficientField& mu,
                        const CoefficientField& kappa, const AssemblyOptions& options = {});

/// Weighted mass matrix ∫ w u_j u_i (scalar families) or ∫ w u_j·u_i (vector families).
SystemMatrix assemble_mass(std::shared_ptr<const FeSpace> space, const CoefficientField& weight,
                           const AssemblyOptions& options = {});

/// ∫ w curl φ_j·curl φ_i over an HCurl space.
SystemMatrix assemble_curl_curl(std::shared_ptr<const FeSpace> space, const CoefficientField& weight,
                                const AssemblyOptions& options = {});

/// ∫ w ∇ψ_p·∇ψ_m over an H1 space.
SystemMatrix assemble_stiffness(std::shared_ptr<const FeSpace> space, const CoefficientField& weight,
                                const AssemblyOptions& options = {});

/// Rectangular coupling with entry (m, b) = ∫ μ̃ φ_b·∇ψ_m. Rows follow the H1
/// space and columns the HCurl space; both must share mesh and condition.
SystemMatrix assemble_grad_coupling(std::shared_ptr<const FeSpace> h1, std::shared_ptr<const FeSpace> hcurl,
                                    const CoefficientField& mu, const AssemblyOptions& options = {});

/// Matrix of the scaled H(curl) norm: mass + ℓ_D² curl-curl (unit weights).
SystemMatrix hcurl_norm_matrix(std::shared_ptr<const FeSpace> space, Real ell_d,
                               const AssemblyOptions& options = {});

/// Load vector ∫ f·φ_i over an HCurl or HDiv space.
Eigen::VectorXcd assemble_l(const FeSpace& space, const VectorField& f, const AssemblyOptions& options = {});

/// x* A y with the conjugate on the left argument.
Complex sesquilinear(const SparseMatrixC& a, const Eigen::VectorXcd& x, const Eigen::VectorXcd& y);

/// Coordinate dump: a "rows cols nnz" header, then one "row col re im" line per
/// stored entry (0-based indices, column-major order, 17 significant digits).
void write_matrix_coo(std::ostream& out, const SparseMatrixC& matrix);

}  // namespace curlfem
