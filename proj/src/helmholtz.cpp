#include "curlfem/helmholtz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "curlfem/linear_solver.hpp"
#include "curlfem/quadrature.hpp"

namespace curlfem {

namespace {

void require_edge_space_with_bc(const FeSpace& space, const char* what) {
    if (space.family() != Family::HCurl || !space.has_bc()) {
        throw InvalidArgument(std::string(what) + " expects a field of the HCurl space with essential condition");
    }
}

void require_rotated_positive(const CoefficientField& mu, const Mesh& mesh, const char* what) {
    try {
        estimate_params(mu, mu, mesh, mesh.diameter());
    } catch (const NonCoerciveError& e) {
        throw NonCoerciveError(std::string(what) + ": the potential problem is not coercive (" + e.what() + ")");
    }
}

Eigen::VectorXcd coupling_action(const DiscreteField& b, const CoefficientField& mu, const AssemblyOptions& options) {
    const auto& hcurl = b.space_ptr();
    const auto h1 = build_space(hcurl->mesh_ptr(), Family::H1, hcurl->bc());
    return assemble_grad_coupling(h1, hcurl, mu, options).matrix * b.coefficients();
}

int numerical_rank(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) {
        return 0;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(m);
    qr.setThreshold(1e-10);
    return static_cast<int>(qr.rank());
}

SparseMatrixC stack_saddle(const SparseMatrixC& top_left, const SparseMatrixC& b) {
    const auto nc = top_left.rows();
    const auto ng = b.rows();
    std::vector<Eigen::Triplet<Complex>> t;
    t.reserve(static_cast<std::size_t>(top_left.nonZeros() + 2 * b.nonZeros()));
    for (int k = 0; k < top_left.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(top_left, k); it; ++it) {
            t.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (int k = 0; k < b.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(b, k); it; ++it) {
            t.emplace_back(nc + it.row(), it.col(), it.value());
            t.emplace_back(it.col(), nc + it.row(), std::conj(it.value()));
        }
    }
    SparseMatrixC s(nc + ng, nc + ng);
    s.setFromTriplets(t.begin(), t.end());
    s.makeCompressed();
    return s;
}

}  // namespace

Real weak_div_residual(const DiscreteField& b, const CoefficientField& mu, const AssemblyOptions& options) {
    require_edge_space_with_bc(b.space(), "weak_div_residual");
    const Real norm = l2_norm(b, options.quad_degree);
    if (norm == 0.0) {
        return 0.0;
    }
    const Eigen::VectorXcd r = coupling_action(b, mu, options);
    return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff() / norm;
}

HelmholtzSplit helmholtz_split(const DiscreteField& b, const CoefficientField& mu, const AssemblyOptions& options) {
    require_edge_space_with_bc(b.space(), "helmholtz_split");
    const auto hcurl = b.space_ptr();
    const auto& mesh = hcurl->mesh_ptr();
    require_rotated_positive(mu, *mesh, "helmholtz_split");

    const auto h1 = build_space(mesh, Family::H1, BoundaryCondition::Essential);
    const SystemMatrix coupling = assemble_grad_coupling(h1, hcurl, mu, options);
    const SystemMatrix stiffness = assemble_stiffness(h1, mu, options);
    const Eigen::VectorXcd rhs = coupling.matrix * b.coefficients();

    HelmholtzSplit out{DiscreteField(hcurl), DiscreteField(h1), 0.0, 0.0};
    if (h1->num_dofs() > 0) {
        SolveResult r;
        out.potential = solve(stiffness, rhs, &r);
        out.solve_residual = r.relative_residual;
    }
    const Eigen::VectorXcd grad_p = gradient_matrix(*h1, *hcurl).cast<Complex>() * out.potential.coefficients();
    out.divergence_free = DiscreteField(hcurl, b.coefficients() - grad_p);
    out.constraint_residual = weak_div_residual(out.divergence_free, mu, options);
    return out;
}

HelmholtzDimensions helmholtz_dimensions(const std::shared_ptr<const Mesh>& mesh, const CoefficientField& mu,
                                         const AssemblyOptions& options) {
    const auto h1 = build_space(mesh, Family::H1, BoundaryCondition::Essential);
    const auto hcurl = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
    const auto hdiv = build_space(mesh, Family::HDiv, BoundaryCondition::Essential);
    HelmholtzDimensions d;
    d.edge_dofs = hcurl->num_dofs();
    d.vertex_dofs = h1->num_dofs();
    d.coupling_rank = numerical_rank(Eigen::MatrixXcd(assemble_grad_coupling(h1, hcurl, mu, options).matrix));
    d.divergence_free_dim = numerical_rank(Eigen::MatrixXd(curl_matrix(*hcurl, *hdiv)).cast<Complex>());
    return d;
}

Real rayleigh_quotient(const DiscreteField& x, int quad_degree) {
    const Real v = l2_norm(x, quad_degree);
    const Real c = derivative_l2_norm(x, quad_degree);
    if (v == 0.0) {
        throw InvalidArgument("Rayleigh quotient of the zero field");
    }
    return (c * c) / (v * v);
}

PsEstimate ps_constant(const std::shared_ptr<const Mesh>& mesh, const CoefficientField& mu, Real ell_d,
                       const PsOptions& options) {
    if (!(ell_d > 0.0)) {
        throw InvalidArgument("ps_constant needs a positive length scale");
    }
    require_rotated_positive(mu, *mesh, "ps_constant");
    const auto hcurl = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
    const auto h1 = build_space(mesh, Family::H1, BoundaryCondition::Essential);
    const int nc = hcurl->num_dofs();
    const int ng = h1->num_dofs();
    const int dim_x = nc - ng;
    if (dim_x <= 0) {
        throw InvalidArgument("mesh too coarse: the constrained edge space is empty");
    }

    CoefficientField mass_weight = CoefficientField::constant(1.0);
    if (options.weighted_mass) {
        mass_weight = CoefficientField();
        mass_weight.set_fallback([](const Vec3&) { return Complex(0.0); });
        for (int tag : mesh->tags()) {
            mass_weight.set_piece(tag, [&mu, tag](const Vec3& x) { return Complex(std::abs(mu(tag, x))); });
        }
    }
    const SparseMatrixC k = assemble_curl_curl(hcurl, CoefficientField::constant(1.0), options.assembly).matrix;
    const SparseMatrixC m = assemble_mass(hcurl, mass_weight, options.assembly).matrix;
    const SparseMatrixC b = assemble_grad_coupling(h1, hcurl, mu, options.assembly).matrix;
    const Real sigma = options.shift.value_or(1.0 / (ell_d * ell_d));
    const SparseLu saddle(stack_saddle(SparseMatrixC(k + sigma * m), b));

    const int p = std::max(1, std::min(options.block_size, dim_x));
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<Real> gauss;
    Eigen::MatrixXcd x(nc, p);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x.data()[i] = Complex(gauss(rng), gauss(rng));
    }

    std::optional<SparseLu> multiplier;
    if (ng > 0) {
        multiplier.emplace(SparseMatrixC(b * SparseMatrixC(b.adjoint())));
    }
    // Residual of the pair (lambda, v) after removing the best multiplier term.
    const auto pair_residual = [&](Real lambda, const Eigen::VectorXcd& v) {
        const Eigen::VectorXcd mv = m * v;
        Eigen::VectorXcd r = k * v - lambda * mv;
        if (multiplier) {
            r += b.adjoint() * multiplier->solve(-(b * r));
        }
        return r.norm() / (lambda * mv.norm());
    };

    PsEstimate out;
    out.h = mesh->mesh_size();
    Real previous = std::numeric_limits<Real>::infinity();
    bool converged = false;
    Eigen::VectorXd evals;
    for (int it = 1; it <= options.max_iterations && !converged; ++it) {
        Eigen::MatrixXcd y(nc, p);
        for (int j = 0; j < p; ++j) {
            Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(nc + ng);
            rhs.head(nc) = m * x.col(j);
            y.col(j) = saddle.solve(rhs).head(nc);
        }
        const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(y).householderQ() *
                                   Eigen::MatrixXcd::Identity(nc, p);
        Eigen::MatrixXcd kr = q.adjoint() * (k * q);
        Eigen::MatrixXcd mr = q.adjoint() * (m * q);
        kr = (0.5 * (kr + kr.adjoint())).eval();
        mr = (0.5 * (mr + mr.adjoint())).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(kr, mr);
        if (ges.info() != Eigen::Success) {
            throw ConvergenceError("Rayleigh-Ritz step failed in ps_constant");
        }
        evals = ges.eigenvalues();
        x = q * ges.eigenvectors();
        out.iterations = it;
        if (std::abs(evals[0] - previous) <= options.tolerance * std::abs(evals[0])) {
            out.eigen_residual = pair_residual(evals[0], x.col(0));
            converged = out.eigen_residual <= options.residual_tolerance;
        }
        previous = evals[0];
    }

    out.lambda_min = evals[0];
    out.ritz_values.assign(evals.data(), evals.data() + evals.size());
    Eigen::VectorXcd v = x.col(0);
    v /= std::sqrt(v.dot(m * v).real());
    out.eigen_residual = pair_residual(out.lambda_min, v);
    const DiscreteField field(hcurl, v);
    out.constraint_residual = weak_div_residual(field, mu, options.assembly);
    out.c_p = ell_d * std::sqrt(out.lambda_min);
    out.eigenvector = field;
    if (!converged) {
        std::ostringstream msg;
        msg << "ps_constant did not converge in " << options.max_iterations << " iterations (lambda_min "
            << out.lambda_min << ", eigen residual " << out.eigen_residual << ")";
        throw ConvergenceError(msg.str());
    }
    return out;
}

LiftingResult lift_curl_preserving(const DiscreteField& x, const CoefficientField& mu, int factor,
                                   const AssemblyOptions& options) {
    require_edge_space_with_bc(x.space(), "lift_curl_preserving");
    if (factor < 2) {
        throw InvalidArgument("lift_curl_preserving needs a refinement factor of at least 2");
    }
    const Mesh& coarse = x.space().mesh();
    require_rotated_positive(mu, coarse, "lift_curl_preserving");
    BoxMeshSpec spec = coarse.spec();
    for (int& n : spec.resolution) {
        n *= factor;
    }
    const auto fine = build_box_mesh(spec);
    const auto h1 = build_space(fine, Family::H1, BoundaryCondition::Essential);

    const TetQuadrature rule = tet_rule(options.quad_degree);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(h1->num_dofs());
    for (int cell = 0; cell < fine->num_cells(); ++cell) {
        const CellTransform& t = fine->transform(cell);
        const auto host = coarse.locate(t.map(Vec3::Constant(0.25)));
        const CellTransform& tc = coarse.transform(host->cell);
        const auto dofs = h1->cell_dofs(cell);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec3 xq = t.map(rule.points[q]);
            const CVec3 v = eval_vector(x, host->cell, tc.pull_back(xq)) *
                            (eval_coeff(mu, *fine, cell, rule.points[q]) * rule.weights[q] * t.det);
            const ShapeSet psi = eval_physical_basis(Family::H1, t, rule.points[q]);
            for (int i = 0; i < 4; ++i) {
                if (dofs[static_cast<std::size_t>(i)] >= 0) {
                    const Vec3& g = psi[i].derivative;
                    rhs[dofs[static_cast<std::size_t>(i)]] += v.x() * g.x() + v.y() * g.y() + v.z() * g.z();
                }
            }
        }
    }

    LiftingResult out;
    out.refinement_factor = factor;
    DiscreteField phi(h1);
    if (h1->num_dofs() > 0) {
        phi = solve(assemble_stiffness(h1, mu, options), rhs);
    }
    out.distance = derivative_l2_norm(phi, options.quad_degree);
    out.curl_norm = derivative_l2_norm(x, options.quad_degree);
    out.ratio = out.curl_norm > 0.0 ? out.distance / out.curl_norm : 0.0;
    out.potential = std::move(phi);
    return out;
}

}  // namespace curlfem
