#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "curlfem/assembly.hpp"
#include "curlfem/coefficients.hpp"
#include "curlfem/fe_space.hpp"
#include "curlfem/types.hpp"

namespace curlfem {

/// b_h = x_h + grad p_h with x_h weakly μ̃-divergence free.
struct HelmholtzSplit {
    DiscreteField divergence_free;
    DiscreteField potential;
    /// weak_div_residual of the divergence-free part.
    Real constraint_residual = 0.0;
    /// Relative residual of the potential solve.
    Real solve_residual = 0.0;
};

/// Splits an HCurl field with essential condition. The potential solves
/// (μ̃ ∇p, ∇q) = (μ̃ b, ∇q) for all q in the H1 space with essential condition.
/// Throws NonCoerciveError when μ̃ admits no rotation making it uniformly
/// positive, InvalidArgument for a field of the wrong space.
HelmholtzSplit helmholtz_split(const DiscreteField& b, const CoefficientField& mu,
                               const AssemblyOptions& options = {});

/// max over H1 basis functions m of |(μ̃ b, ∇m)|, divided by ‖b‖ (0 for b = 0).
Real weak_div_residual(const DiscreteField& b, const CoefficientField& mu, const AssemblyOptions& options = {});

/// Dimension bookkeeping of the discrete decomposition with essential conditions.
struct HelmholtzDimensions {
    int edge_dofs = 0;
    int vertex_dofs = 0;
    /// Numerical rank of the gradient coupling (μ̃ φ_b, ∇ψ_m).
    int coupling_rank = 0;
    /// dim X = rank of the curl map on the edge space.
    int divergence_free_dim = 0;

    bool identity_holds() const {
        return coupling_rank == vertex_dofs && edge_dofs == vertex_dofs + divergence_free_dim;
    }
};

/// Dense rank computations; meant for meshes with a few thousand edges.
HelmholtzDimensions helmholtz_dimensions(const std::shared_ptr<const Mesh>& mesh, const CoefficientField& mu,
                                         const AssemblyOptions& options = {});

struct PsOptions {
    int block_size = 6;
    int max_iterations = 100;
    /// Relative change of the smallest Ritz value that ends the iteration.
    Real tolerance = 1e-11;
    /// The iteration also waits until eigen_residual falls below this value.
    Real residual_tolerance = 1e-8;
    /// Shift σ of the saddle operator; defaults to ℓ_D⁻².
    std::optional<Real> shift;
    /// Weights the L² mass by |μ̃| instead of 1.
    bool weighted_mass = false;
    unsigned seed = 1;
    AssemblyOptions assembly;
};

struct PsEstimate {
    Real h = 0.0;
    Real lambda_min = 0.0;
    /// ℓ_D √λ_min
    Real c_p = 0.0;
    int iterations = 0;
    /// weak_div_residual of the eigenvector.
    Real constraint_residual = 0.0;
    /// ‖K x - λ M x + Bᴴ ℓ‖ / (λ ‖M x‖) with the least-squares multiplier ℓ.
    Real eigen_residual = 0.0;
    std::vector<Real> ritz_values;
    std::optional<DiscreteField> eigenvector;
};

/// Smallest λ with K x = λ M x subject to (μ̃ x, ∇m) = 0, by block shift-invert
/// subspace iteration on [[K + σM, Bᴴ], [B, 0]]. Throws ConvergenceError when
/// the iteration budget runs out before both stopping tests pass.
PsEstimate ps_constant(const std::shared_ptr<const Mesh>& mesh, const CoefficientField& mu, Real ell_d,
                       const PsOptions& options = {});

/// ‖curl x‖² / ‖x‖² of an HCurl field.
Real rayleigh_quotient(const DiscreteField& x, int quad_degree = 4);

struct LiftingResult {
    /// ‖ξ - x_h‖ = ‖∇φ‖ on the refined mesh.
    Real distance = 0.0;
    Real curl_norm = 0.0;
    /// distance / curl_norm (0 when curl_norm = 0).
    Real ratio = 0.0;
    int refinement_factor = 0;
    std::optional<DiscreteField> potential;
};

/// Curl-preserving lifting oracle: solves (μ̃ ∇φ, ∇m) = (μ̃ x_h, ∇m) on the
/// mesh refined `factor` times (H1 with essential condition) and reports the
/// distance ‖∇φ‖. Throws InvalidArgument for factor < 2.
LiftingResult lift_curl_preserving(const DiscreteField& x, const CoefficientField& mu, int factor,
                                   const AssemblyOptions& options = {});

}  // namespace curlfem
