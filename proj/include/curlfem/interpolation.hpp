#pragma once

#include <functional>
#include <memory>
#include <span>

#include "curlfem/fe_space.hpp"
#include "curlfem/mesh.hpp"
#include "curlfem/types.hpp"

namespace curlfem {

enum class Smoothness { Continuous, ContinuouslyDifferentiable };

/// Complex scalar function of physical position with an optional analytic gradient.
struct ScalarField {
    std::function<Complex(const Vec3&)> value;
    std::function<CVec3(const Vec3&)> gradient;
    Smoothness smoothness = Smoothness::ContinuouslyDifferentiable;
};

/// Complex vector function of physical position with optional analytic curl and divergence.
struct VectorField {
    std::function<CVec3(const Vec3&)> value;
    std::function<CVec3(const Vec3&)> curl;
    std::function<Complex(const Vec3&)> divergence;
    Smoothness smoothness = Smoothness::ContinuouslyDifferentiable;
};

/// Largest deviation between the analytic derivatives of a field and central
/// finite differences with the given step, over `points`. Missing derivatives
/// are skipped.
Real derivative_mismatch(const ScalarField& f, std::span<const Vec3> points, Real step = 1e-6);
Real derivative_mismatch(const VectorField& f, std::span<const Vec3> points, Real step = 1e-6);

struct InterpolationOptions {
    /// Exactness degree of the edge, face and cell rules behind the DOFs.
    int quad_degree = 4;
};

/// Canonical interpolants: vertex values (H1), cell integrals (L2).
DiscreteField interp(std::shared_ptr<const FeSpace> space, const ScalarField& f,
                     const InterpolationOptions& options = {});
/// Canonical interpolants: edge circulations (HCurl), face fluxes (HDiv).
DiscreteField interp(std::shared_ptr<const FeSpace> space, const VectorField& f,
                     const InterpolationOptions& options = {});

/// Views a discrete field as a smooth field by point location. Derivatives are
/// attached where the family has one.
ScalarField as_scalar_field(const DiscreteField& field);
VectorField as_vector_field(const DiscreteField& field);

enum class DiagramStage { Grad, Curl, Div };

/// L² norm of I(D f) - D(I f) for one square of the commuting diagram, with D
/// realized by the exact coefficient maps. Throws InvalidArgument when the
/// analytic derivative needed by the stage is missing.
Real diagram_residual(const std::shared_ptr<const Mesh>& mesh, const ScalarField& f, BoundaryCondition bc,
                      const InterpolationOptions& options = {});
Real diagram_residual(const std::shared_ptr<const Mesh>& mesh, const VectorField& g, DiagramStage stage,
                      BoundaryCondition bc, const InterpolationOptions& options = {});

}  // namespace curlfem
