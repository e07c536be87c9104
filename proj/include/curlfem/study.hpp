#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curlfem/assembly.hpp"
#include "curlfem/coefficients.hpp"
#include "curlfem/helmholtz.hpp"
#include "curlfem/interpolation.hpp"
#include "curlfem/linear_solver.hpp"

namespace curlfem {

/// Exact solution and data of μ̃ A + curl(κ curl A) = f on the unit cube.
struct ManufacturedCase {
    std::string name;
    Complex mu0;
    Complex kappa0;
    CoefficientField mu;
    CoefficientField kappa;
    /// A with its curl and divergence.
    VectorField exact;
    VectorField source;
    /// A × n = 0 on every face of the cube.
    bool tangential_trace_vanishes = false;
    /// div f = 0.
    bool source_divergence_free = false;
};

/// A = (0, 0, sin πx sin πy) with constant coefficients, so f = (μ̃₀ + 2π²κ₀) A.
ManufacturedCase manufactured_smooth(Complex mu0, Complex kappa0);

/// Same coefficients with A = 0 and f = 0.
ManufacturedCase manufactured_zero(Complex mu0, Complex kappa0);

struct ErrorNorms {
    Real l2 = 0.0;
    /// ‖curl(A - A_h)‖, unscaled.
    Real curl = 0.0;
    /// sqrt(l2² + ℓ_D² curl²)
    Real hcurl = 0.0;
};

/// Errors of a discrete HCurl field against closed-form fields, integrated cell by cell.
ErrorNorms error_norms(const DiscreteField& approx, const VectorField& exact, Real ell_d, int quad_degree = 6);

/// Same norms for two closed-form fields on the cells of `mesh`. Used for the
/// point-location cross-check via as_vector_field.
ErrorNorms error_norms(const VectorField& approx, const VectorField& exact, const Mesh& mesh, Real ell_d,
                       int quad_degree = 6);

/// Distance between HCurl fields on nested meshes, integrated on the finer mesh
/// of `fine`. `coarse` must live on a mesh whose cells are unions of fine cells.
ErrorNorms field_distance(const DiscreteField& coarse, const DiscreteField& fine, Real ell_d, int quad_degree = 6);

struct StudyOptions {
    AssemblyOptions assembly;
    int error_quad_degree = 6;
    SolveOptions solve;
};

struct ModelSolution {
    DiscreteField field;
    MaterialParams params;
    SolveResult report;
    /// weak_div_residual of the solution with weight μ̃.
    Real weak_div_residual = 0.0;
    double seconds = 0.0;
};

/// Assembles and solves the discrete problem on the HCurl space with
/// essential condition. estimate_params runs first and throws
/// NonCoerciveError for coefficients outside the rotated-positive regime.
ModelSolution solve_model_problem(const std::shared_ptr<const Mesh>& mesh, const CoefficientField& mu,
                                  const CoefficientField& kappa, const VectorField& source,
                                  const StudyOptions& options = {});

struct LevelResult {
    int resolution = 0;
    Real h = 0.0;
    int dofs = 0;
    ErrorNorms error;
    /// Errors of the canonical interpolant; empty without a closed-form solution.
    std::optional<ErrorNorms> interpolation_error;
    /// error.hcurl / interpolation_error.hcurl
    std::optional<Real> c_obs;
    Real relative_residual = 0.0;
    Real weak_div_residual = 0.0;
    SolveMethod method = SolveMethod::Lu;
    double seconds = 0.0;
};

struct Rates {
    Real l2 = 0.0;
    Real curl = 0.0;
    Real hcurl = 0.0;
};

struct ConvergenceReport {
    /// "smooth" or "heterogeneous".
    std::string study;
    std::string mu_label;
    std::string kappa_label;
    int quad_degree = 0;
    int error_quad_degree = 0;
    Real ell_d = 0.0;
    std::optional<MaterialParams> params;
    std::vector<LevelResult> levels;
    /// log(e_i / e_{i+1}) / log(h_i / h_{i+1}) for consecutive levels.
    std::vector<Rates> rates;
    /// Least-squares slope of log e against log h, without the coarsest level
    /// when three or more levels are present.
    std::optional<Rates> fitted;
    /// Heterogeneous runs only: the oracle resolution and factor.
    std::optional<int> reference_resolution;
    std::optional<int> reference_factor;
    /// Rates carry no analytic target.
    bool observed_only = false;
    bool complete = true;
    std::string failure;
    double wall_seconds = 0.0;
};

/// Solves the manufactured case on each resolution in order. A failing level
/// ends the run; the report then holds the finished levels, complete = false
/// and the failure message.
ConvergenceReport run_convergence(const ManufacturedCase& problem, const std::vector<int>& resolutions,
                                  const StudyOptions& options = {});

/// Errors against a reference solution on max(resolutions) * reference_factor.
/// A failing reference solve throws; failing levels end the run as above.
ConvergenceReport run_heterogeneous(const CoefficientField& mu, const CoefficientField& kappa,
                                    const VectorField& source, const std::vector<int>& resolutions,
                                    int reference_factor, const StudyOptions& options = {});

/// Rates of a geometric sequence of (h, value) pairs.
Real observed_rate(Real h_coarse, Real e_coarse, Real h_fine, Real e_fine);
Real fitted_rate(const std::vector<Real>& h, const std::vector<Real>& e);

struct LiftingLevel {
    int resolution = 0;
    Real h = 0.0;
    LiftingResult lifting;
};

struct LiftingStudy {
    int refinement_factor = 0;
    std::vector<LiftingLevel> levels;
    /// Pairwise rates of the ratio distance / ‖curl x_h‖.
    std::vector<Real> rates;
    Real fitted = 0.0;
};

/// Solves the manufactured case, projects A_h onto the discretely μ̃-divergence
/// free fields and runs the curl-preserving lifting on each level.
LiftingStudy run_lifting(const ManufacturedCase& problem, const std::vector<int>& resolutions, int factor,
                         const StudyOptions& options = {});

struct DiagramCheck {
    DiagramStage stage = DiagramStage::Grad;
    BoundaryCondition bc = BoundaryCondition::None;
    int trials = 0;
    Real max_residual = 0.0;
};

/// Commuting-diagram residuals for random polynomial inputs. Without boundary
/// condition the inputs have degree 3 and the rules are exact of degree 3;
/// with it, the inputs are degree-3 polynomials times coordinate bubbles that
/// vanish where the dropped DOFs live, and the rules are exact of degree 9.
std::vector<DiagramCheck> run_diagram_check(const std::shared_ptr<const Mesh>& mesh, int trials, unsigned seed);

}  // namespace curlfem
