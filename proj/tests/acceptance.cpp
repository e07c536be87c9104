// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
// Each criterion records the quantities it compared so a failing line says by
// how much it missed. Runtime budgets are part of the pass condition.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <curlfem/helmholtz.hpp>
#include <curlfem/study.hpp>

#include "support.hpp"

using namespace curlfem;

namespace {

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<void(Outcome&)> run;
};

DiscreteField random_field(const std::shared_ptr<const FeSpace>& space, std::mt19937_64& rng) {
    return DiscreteField(space, testing::random_complex_vector(space->num_dofs(), rng));
}

void exact_sequence(Outcome& out) {
    const TetQuadrature rule = tet_rule(2);
    std::mt19937_64 rng(101);
    Real worst_cg = 0.0;
    Real worst_dc = 0.0;
    Real worst_jump = 0.0;
    for (int n : {2, 3}) {
        const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(n));
        for (BoundaryCondition bc : {BoundaryCondition::None, BoundaryCondition::Essential}) {
            const auto g = build_space(mesh, Family::H1, bc);
            const auto c = build_space(mesh, Family::HCurl, bc);
            const auto d = build_space(mesh, Family::HDiv, bc);
            const Eigen::SparseMatrix<Complex> grad = gradient_matrix(*g, *c).cast<Complex>();
            const Eigen::SparseMatrix<Complex> curl = curl_matrix(*c, *d).cast<Complex>();

            // Pointwise curl of every gradient image and divergence of every curl image.
            for (int dof = 0; dof < g->num_dofs(); ++dof) {
                const DiscreteField image(c, grad.col(dof));
                for (int cell = 0; cell < mesh->num_cells(); ++cell) {
                    for (const Vec3& q : rule.points) {
                        worst_cg = std::max(worst_cg, eval_curl(image, cell, q).norm());
                    }
                }
            }
            for (int dof = 0; dof < c->num_dofs(); ++dof) {
                const DiscreteField image(d, curl.col(dof));
                for (int cell = 0; cell < mesh->num_cells(); ++cell) {
                    for (const Vec3& q : rule.points) {
                        worst_dc = std::max(worst_dc, std::abs(eval_divergence(image, cell, q)));
                    }
                }
            }
            for (const auto& space : {g, c, d}) {
                const DiscreteField f = random_field(space, rng);
                worst_jump = std::max(worst_jump, max_jump(f) / f.coefficients().cwiseAbs().maxCoeff());
            }
        }
    }
    out.detail << "max|curl grad| " << worst_cg << ", max|div curl| " << worst_dc << ", max jump " << worst_jump
               << ' ';
    out.require(worst_cg <= 1e-12, "curl grad <= 1e-12");
    out.require(worst_dc <= 1e-12, "div curl <= 1e-12");
    out.require(worst_jump <= 1e-10, "jumps <= 1e-10");
}

void commuting_diagram(Outcome& out) {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    Real worst = 0.0;
    for (const DiagramCheck& d : run_diagram_check(mesh, 20, 7)) {
        worst = std::max(worst, d.max_residual);
    }
    out.detail << "max residual " << worst << " over 20 inputs, both conditions ";
    out.require(worst <= 1e-11, "residual <= 1e-11");
}

void coercivity(Outcome& out) {
    std::mt19937_64 rng(103);
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(4));
    const Real ell = mesh->diameter();
    const auto c = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
    const CoefficientField mu = CoefficientField::constant({0.0, 1.0});
    const CoefficientField kappa = CoefficientField::constant(1.0);
    const SystemMatrix a = assemble_a(c, mu, kappa);
    const SystemMatrix n = hcurl_norm_matrix(c, ell);
    const Real theta = -kPi / 4.0;
    const Real lower = std::min(std::sqrt(0.5), std::sqrt(0.5) / (ell * ell));
    const MaterialParams p = estimate_params(mu, kappa, *mesh, ell);
    Real worst_margin = std::numeric_limits<Real>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXcd x = testing::random_complex_vector(a.rows(), rng);
        const Real nx = sesquilinear(n.matrix, x, x).real();
        const Real rotated = (std::polar(1.0, theta) * sesquilinear(a.matrix, x, x)).real();
        worst_margin = std::min(worst_margin, rotated - (lower * nx - 1e-9));
    }
    out.detail << "estimated theta " << p.theta << ", smallest margin " << worst_margin << ' ';
    out.require(worst_margin >= 0.0, "rotated form bounded below");
}

void smooth_convergence(Outcome& out) {
    const ConvergenceReport r = run_convergence(manufactured_smooth({1.0, 1.0}, 1.0), {4, 8, 16});
    out.require(r.complete, "all levels solved: " + r.failure);
    if (!r.fitted) {
        return;
    }
    Real residual = 0.0;
    for (const LevelResult& l : r.levels) {
        residual = std::max(residual, l.relative_residual);
    }
    out.detail << "H(curl) rate " << r.fitted->hcurl << ", L2 rate " << r.fitted->l2 << ", max residual "
               << residual << ' ';
    out.require(r.fitted->hcurl >= 0.85 && r.fitted->hcurl <= 1.15, "H(curl) rate in [0.85, 1.15]");
    out.require(r.fitted->l2 >= r.fitted->hcurl - 0.1, "L2 rate >= H(curl) rate - 0.1");
    out.require(residual <= 1e-10, "residuals <= 1e-10");
}

void poincare_steklov(Outcome& out) {
    const Real cavity = 2.0 * kPi * kPi;
    std::vector<PsEstimate> estimates;
    for (int n : {2, 4, 8}) {
        const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(n));
        estimates.push_back(ps_constant(mesh, CoefficientField::constant(1.0), mesh->diameter()));
    }
    bool positive = true;
    bool approaching = true;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        positive = positive && estimates[i].lambda_min > 0.0;
        if (i > 0) {
            approaching = approaching && std::abs(estimates[i].lambda_min - cavity) <
                                             std::abs(estimates[i - 1].lambda_min - cavity);
        }
        out.detail << "lambda " << estimates[i].lambda_min << ' ';
    }
    const Real final_gap = std::abs(estimates.back().lambda_min - cavity) / cavity;
    const Real a = estimates[1].c_p;
    const Real b = estimates[2].c_p;
    const Real variation = std::abs(b - a) / std::max(a, b);
    out.detail << "final gap " << final_gap << ", C_P variation " << variation << ' ';
    out.require(positive, "lambda_min > 0");
    out.require(approaching, "sequence approaches 2 pi^2");
    out.require(final_gap <= 0.15, "final level within 15%");
    out.require(variation < 0.2, "C_P varies < 20%");
}

void helmholtz_decomposition(Outcome& out) {
    std::mt19937_64 rng(107);
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(4));
    const CoefficientField mu = CoefficientField::checkerboard({1.0, 1.0}, {4.0, 0.5});
    const auto c = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
    const auto g = build_space(mesh, Family::H1, BoundaryCondition::Essential);
    const DiscreteField b = random_field(c, rng);
    const HelmholtzSplit split = helmholtz_split(b, mu);
    const Eigen::VectorXcd rebuilt = split.divergence_free.coefficients() +
                                     gradient_matrix(*g, *c).cast<Complex>() * split.potential.coefficients();
    const Real reconstruction = (rebuilt - b.coefficients()).cwiseAbs().maxCoeff();
    const HelmholtzSplit again = helmholtz_split(split.divergence_free, mu);
    const Real idempotence = again.potential.coefficients().norm() / split.potential.coefficients().norm();
    const HelmholtzDimensions dims = helmholtz_dimensions(mesh, mu);
    out.detail << "reconstruction " << reconstruction << ", constraint " << split.constraint_residual
               << ", idempotence " << idempotence << ", " << dims.edge_dofs << " = " << dims.vertex_dofs << " + "
               << dims.divergence_free_dim << ' ';
    out.require(reconstruction <= 1e-12, "reconstruction");
    out.require(split.constraint_residual <= 1e-9, "constraint residual <= 1e-9");
    out.require(idempotence <= 1e-10, "idempotence <= 1e-10");
    out.require(dims.identity_holds(), "dimension identity");
}

void heterogeneous(Outcome& out) {
    const ManufacturedCase smooth = manufactured_smooth(1.0, 1.0);
    const ConvergenceReport r = run_heterogeneous(CoefficientField::constant(1.0),
                                                  CoefficientField::checkerboard(1.0, 100.0), smooth.source,
                                                  {2, 4, 8}, 4);
    out.require(r.complete, "all levels solved: " + r.failure);
    if (!r.fitted) {
        return;
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < r.levels.size(); ++i) {
        decreasing = decreasing && r.levels[i].error.l2 < r.levels[i - 1].error.l2 &&
                     r.levels[i].error.hcurl < r.levels[i - 1].error.hcurl;
    }
    for (const LevelResult& l : r.levels) {
        out.detail << "e_H " << l.error.hcurl << ' ';
    }
    out.detail << "L2 rate " << r.fitted->l2 << ", H(curl) rate " << r.fitted->hcurl << ' ';
    out.require(decreasing, "errors strictly decreasing");
    out.require(r.fitted->l2 >= r.fitted->hcurl - 0.1, "L2 rate >= H(curl) rate - 0.1");
}

void lifting(Outcome& out) {
    const LiftingStudy s = run_lifting(manufactured_smooth(1.0, 1.0), {4, 8, 16}, 2);
    bool decreasing = true;
    for (std::size_t i = 0; i < s.levels.size(); ++i) {
        out.detail << "ratio " << s.levels[i].lifting.ratio << ' ';
        if (i > 0) {
            decreasing = decreasing && s.levels[i].lifting.ratio < s.levels[i - 1].lifting.ratio;
        }
    }
    Real slowest = std::numeric_limits<Real>::infinity();
    for (Real rate : s.rates) {
        slowest = std::min(slowest, rate);
    }
    out.detail << "slowest rate " << slowest << ", fitted " << s.fitted << ' ';
    out.require(decreasing, "ratio decreasing");
    out.require(slowest >= 0.8, "every refinement rate >= 0.8");
}

template <class F>
bool throws_non_coercive(F&& f, std::ostringstream& detail) {
    try {
        f();
    } catch (const NonCoerciveError& e) {
        const std::string text = e.what();
        detail << '"' << text.substr(0, 40) << "...\" ";
        return text.find("non-coercive") != std::string::npos;
    }
    return false;
}

void negative_control(Outcome& out) {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(4));
    const CoefficientField kappa = CoefficientField::constant(1.0);
    const bool minus_one = throws_non_coercive(
        [&] { estimate_params(CoefficientField::constant(-1.0), kappa, *mesh, mesh->diameter()); }, out.detail);
    const ManufacturedCase resonant = manufactured_smooth(-2.0 * kPi * kPi, 1.0);
    const bool near_resonance = throws_non_coercive(
        [&] { solve_model_problem(mesh, resonant.mu, resonant.kappa, resonant.source); }, out.detail);
    out.require(minus_one, "mu = -1 diagnosed as non-coercive");
    out.require(near_resonance, "mu = -2 pi^2 solve reports failure");
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "exact sequence and conformity", 10.0, exact_sequence},
        {2, "commuting diagrams", 30.0, commuting_diagram},
        {3, "rotated coercivity sampling", 60.0, coercivity},
        {4, "smooth convergence", 300.0, smooth_convergence},
        {5, "discrete Poincare-Steklov constant", 300.0, poincare_steklov},
        {6, "Helmholtz decomposition", 60.0, helmholtz_decomposition},
        {7, "heterogeneous study", 600.0, heterogeneous},
        {8, "lifting diagnostic", 300.0, lifting},
        {9, "negative control", 60.0, negative_control},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        Outcome out;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(out);
        } catch (const std::exception& e) {
            out.require(false, std::string("threw: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.require(seconds < c.budget_seconds, "runtime budget");
        failures += out.passed ? 0 : 1;
        std::printf("%s criterion %d: %s (%.2f s) %s\n", out.passed ? "PASS" : "FAIL", c.id, c.name, seconds,
                    out.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
