#include "curlfem/study.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "curlfem/polynomial.hpp"
#include "curlfem/quadrature.hpp"

namespace curlfem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

ErrorNorms finish(Real l2_sq, Real curl_sq, Real ell_d) {
    ErrorNorms e;
    e.l2 = std::sqrt(l2_sq);
    e.curl = std::sqrt(curl_sq);
    e.hcurl = std::sqrt(l2_sq + ell_d * ell_d * curl_sq);
    return e;
}

Rates pairwise(const LevelResult& a, const LevelResult& b) {
    return {observed_rate(a.h, a.error.l2, b.h, b.error.l2), observed_rate(a.h, a.error.curl, b.h, b.error.curl),
            observed_rate(a.h, a.error.hcurl, b.h, b.error.hcurl)};
}

void fill_rates(ConvergenceReport& report) {
    report.rates.clear();
    report.fitted.reset();
    const auto& lv = report.levels;
    for (std::size_t i = 0; i + 1 < lv.size(); ++i) {
        report.rates.push_back(pairwise(lv[i], lv[i + 1]));
    }
    if (lv.size() < 2) {
        return;
    }
    const std::size_t first = lv.size() >= 3 ? 1 : 0;
    std::vector<Real> h, l2, curl, hcurl;
    for (std::size_t i = first; i < lv.size(); ++i) {
        h.push_back(lv[i].h);
        l2.push_back(lv[i].error.l2);
        curl.push_back(lv[i].error.curl);
        hcurl.push_back(lv[i].error.hcurl);
    }
    report.fitted = Rates{fitted_rate(h, l2), fitted_rate(h, curl), fitted_rate(h, hcurl)};
}

LevelResult level_from(const Mesh& mesh, int resolution, const ModelSolution& sol) {
    LevelResult level;
    level.resolution = resolution;
    level.h = mesh.mesh_size();
    level.dofs = sol.field.space().num_dofs();
    level.relative_residual = sol.report.relative_residual;
    level.weak_div_residual = sol.weak_div_residual;
    level.method = sol.report.method;
    level.seconds = sol.seconds;
    return level;
}

}  // namespace

ManufacturedCase manufactured_smooth(Complex mu0, Complex kappa0) {
    ManufacturedCase c;
    c.name = "smooth";
    c.mu0 = mu0;
    c.kappa0 = kappa0;
    c.mu = CoefficientField::constant(mu0);
    c.kappa = CoefficientField::constant(kappa0);
    c.exact.value = [](const Vec3& x) {
        return CVec3(0.0, 0.0, std::sin(kPi * x.x()) * std::sin(kPi * x.y()));
    };
    c.exact.curl = [](const Vec3& x) {
        return CVec3(kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()),
                     -kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y()), 0.0);
    };
    c.exact.divergence = [](const Vec3&) { return Complex(0.0); };
    const Complex scale = mu0 + 2.0 * kPi * kPi * kappa0;
    c.source.value = [scale](const Vec3& x) {
        return CVec3(0.0, 0.0, scale * std::sin(kPi * x.x()) * std::sin(kPi * x.y()));
    };
    c.source.divergence = [](const Vec3&) { return Complex(0.0); };
    c.tangential_trace_vanishes = true;
    c.source_divergence_free = true;
    return c;
}

ManufacturedCase manufactured_zero(Complex mu0, Complex kappa0) {
    ManufacturedCase c;
    c.name = "zero";
    c.mu0 = mu0;
    c.kappa0 = kappa0;
    c.mu = CoefficientField::constant(mu0);
    c.kappa = CoefficientField::constant(kappa0);
    const auto zero = [](const Vec3&) { return CVec3(CVec3::Zero()); };
    c.exact.value = zero;
    c.exact.curl = zero;
    c.exact.divergence = [](const Vec3&) { return Complex(0.0); };
    c.source.value = zero;
    c.source.divergence = [](const Vec3&) { return Complex(0.0); };
    c.tangential_trace_vanishes = true;
    c.source_divergence_free = true;
    return c;
}

ErrorNorms error_norms(const DiscreteField& approx, const VectorField& exact, Real ell_d, int quad_degree) {
    if (approx.space().family() != Family::HCurl) {
        throw InvalidArgument("error_norms expects an HCurl field");
    }
    if (!exact.value || !exact.curl) {
        throw InvalidArgument("error_norms needs the exact field and its curl");
    }
    const Mesh& mesh = approx.space().mesh();
    const TetQuadrature rule = tet_rule(quad_degree);
    Real l2 = 0.0;
    Real curl = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellTransform& t = mesh.transform(c);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec3 x = t.map(rule.points[q]);
            const Real w = rule.weights[q] * t.det;
            l2 += w * (eval_vector(approx, c, rule.points[q]) - exact.value(x)).squaredNorm();
            curl += w * (eval_curl(approx, c, rule.points[q]) - exact.curl(x)).squaredNorm();
        }
    }
    return finish(l2, curl, ell_d);
}

ErrorNorms error_norms(const VectorField& approx, const VectorField& exact, const Mesh& mesh, Real ell_d,
                       int quad_degree) {
    if (!approx.value || !approx.curl || !exact.value || !exact.curl) {
        throw InvalidArgument("error_norms needs both fields and their curls");
    }
    const TetQuadrature rule = tet_rule(quad_degree);
    Real l2 = 0.0;
    Real curl = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellTransform& t = mesh.transform(c);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec3 x = t.map(rule.points[q]);
            const Real w = rule.weights[q] * t.det;
            l2 += w * (approx.value(x) - exact.value(x)).squaredNorm();
            curl += w * (approx.curl(x) - exact.curl(x)).squaredNorm();
        }
    }
    return finish(l2, curl, ell_d);
}

ErrorNorms field_distance(const DiscreteField& coarse, const DiscreteField& fine, Real ell_d, int quad_degree) {
    if (coarse.space().family() != Family::HCurl || fine.space().family() != Family::HCurl) {
        throw InvalidArgument("field_distance expects HCurl fields");
    }
    const Mesh& cm = coarse.space().mesh();
    const Mesh& fm = fine.space().mesh();
    const bool same_mesh = &cm == &fm;
    const TetQuadrature rule = tet_rule(quad_degree);
    Real l2 = 0.0;
    Real curl = 0.0;
    for (int c = 0; c < fm.num_cells(); ++c) {
        const CellTransform& t = fm.transform(c);
        int host = c;
        if (!same_mesh) {
            const auto loc = cm.locate(t.map(Vec3::Constant(0.25)));
            if (!loc) {
                throw InvalidArgument("field_distance: the meshes do not cover the same box");
            }
            host = loc->cell;
        }
        const CellTransform& th = cm.transform(host);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec3 ref_h = same_mesh ? rule.points[q] : th.pull_back(t.map(rule.points[q]));
            const Real w = rule.weights[q] * t.det;
            l2 += w * (eval_vector(coarse, host, ref_h) - eval_vector(fine, c, rule.points[q])).squaredNorm();
            curl += w * (eval_curl(coarse, host, ref_h) - eval_curl(fine, c, rule.points[q])).squaredNorm();
        }
    }
    return finish(l2, curl, ell_d);
}

ModelSolution solve_model_problem(const std::shared_ptr<const Mesh>& mesh, const CoefficientField& mu,
                                  const CoefficientField& kappa, const VectorField& source,
                                  const StudyOptions& options) {
    const auto start = Clock::now();
    mu.validate(*mesh);
    kappa.validate(*mesh);
    const MaterialParams params = estimate_params(mu, kappa, *mesh, mesh->diameter());
    const auto space = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
    const SystemMatrix a = assemble_a(space, mu, kappa, options.assembly);
    const Eigen::VectorXcd rhs = assemble_l(*space, source, options.assembly);
    SolveResult report;
    DiscreteField field = solve(a, rhs, &report, options.solve);
    const Real div = weak_div_residual(field, mu, options.assembly);
    return ModelSolution{std::move(field), params, std::move(report), div, seconds_since(start)};
}

Real observed_rate(Real h_coarse, Real e_coarse, Real h_fine, Real e_fine) {
    if (!(e_coarse > 0.0 && e_fine > 0.0)) {
        return std::numeric_limits<Real>::quiet_NaN();
    }
    return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

Real fitted_rate(const std::vector<Real>& h, const std::vector<Real>& e) {
    if (h.size() != e.size() || h.size() < 2) {
        throw InvalidArgument("fitted_rate needs at least two (h, e) pairs");
    }
    Real mx = 0.0;
    Real my = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(e[i] > 0.0)) {
            return std::numeric_limits<Real>::quiet_NaN();
        }
        mx += std::log(h[i]);
        my += std::log(e[i]);
    }
    mx /= static_cast<Real>(h.size());
    my /= static_cast<Real>(h.size());
    Real sxy = 0.0;
    Real sxx = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const Real dx = std::log(h[i]) - mx;
        sxy += dx * (std::log(e[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

ConvergenceReport run_convergence(const ManufacturedCase& problem, const std::vector<int>& resolutions,
                                  const StudyOptions& options) {
    if (resolutions.size() < 2) {
        throw InvalidArgument("a convergence study needs at least two levels");
    }
    const auto start = Clock::now();
    ConvergenceReport report;
    report.study = problem.name;
    report.mu_label = problem.mu.label();
    report.kappa_label = problem.kappa.label();
    report.quad_degree = options.assembly.quad_degree;
    report.error_quad_degree = options.error_quad_degree;
    for (int n : resolutions) {
        try {
            const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(n));
            report.ell_d = mesh->diameter();
            const ModelSolution sol = solve_model_problem(mesh, problem.mu, problem.kappa, problem.source, options);
            report.params = sol.params;
            LevelResult level = level_from(*mesh, n, sol);
            level.error = error_norms(sol.field, problem.exact, report.ell_d, options.error_quad_degree);
            const DiscreteField best = interp(sol.field.space_ptr(), problem.exact);
            level.interpolation_error = error_norms(best, problem.exact, report.ell_d, options.error_quad_degree);
            if (level.interpolation_error->hcurl > 0.0) {
                level.c_obs = level.error.hcurl / level.interpolation_error->hcurl;
            }
            report.levels.push_back(level);
        } catch (const Error& e) {
            report.complete = false;
            report.failure = "resolution " + std::to_string(n) + ": " + e.what();
            break;
        }
    }
    fill_rates(report);
    report.wall_seconds = seconds_since(start);
    return report;
}

ConvergenceReport run_heterogeneous(const CoefficientField& mu, const CoefficientField& kappa,
                                    const VectorField& source, const std::vector<int>& resolutions,
                                    int reference_factor, const StudyOptions& options) {
    if (resolutions.size() < 2) {
        throw InvalidArgument("a convergence study needs at least two levels");
    }
    if (reference_factor < 2) {
        throw InvalidArgument("the reference mesh must be at least twice as fine as the finest level");
    }
    const auto start = Clock::now();
    ConvergenceReport report;
    report.study = "heterogeneous";
    report.mu_label = mu.label();
    report.kappa_label = kappa.label();
    report.quad_degree = options.assembly.quad_degree;
    report.error_quad_degree = options.error_quad_degree;
    report.observed_only = true;
    report.reference_factor = reference_factor;
    int finest = 0;
    for (int n : resolutions) {
        finest = std::max(finest, n);
    }
    report.reference_resolution = finest * reference_factor;

    const auto ref_mesh = build_box_mesh(BoxMeshSpec::unit_cube(*report.reference_resolution));
    report.ell_d = ref_mesh->diameter();
    const ModelSolution reference = solve_model_problem(ref_mesh, mu, kappa, source, options);
    report.params = reference.params;

    for (int n : resolutions) {
        try {
            const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(n));
            const ModelSolution sol = solve_model_problem(mesh, mu, kappa, source, options);
            LevelResult level = level_from(*mesh, n, sol);
            level.error = field_distance(sol.field, reference.field, report.ell_d, options.error_quad_degree);
            report.levels.push_back(level);
        } catch (const Error& e) {
            report.complete = false;
            report.failure = "resolution " + std::to_string(n) + ": " + e.what();
            break;
        }
    }
    fill_rates(report);
    report.wall_seconds = seconds_since(start);
    return report;
}

LiftingStudy run_lifting(const ManufacturedCase& problem, const std::vector<int>& resolutions, int factor,
                         const StudyOptions& options) {
    LiftingStudy study;
    study.refinement_factor = factor;
    for (int n : resolutions) {
        const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(n));
        const ModelSolution sol = solve_model_problem(mesh, problem.mu, problem.kappa, problem.source, options);
        const HelmholtzSplit split = helmholtz_split(sol.field, problem.mu, options.assembly);
        LiftingResult lift = lift_curl_preserving(split.divergence_free, problem.mu, factor, options.assembly);
        lift.potential.reset();
        study.levels.push_back({n, mesh->mesh_size(), std::move(lift)});
    }
    std::vector<Real> h, ratio;
    for (std::size_t i = 0; i < study.levels.size(); ++i) {
        h.push_back(study.levels[i].h);
        ratio.push_back(study.levels[i].lifting.ratio);
        if (i > 0) {
            study.rates.push_back(observed_rate(h[i - 1], ratio[i - 1], h[i], ratio[i]));
        }
    }
    if (h.size() >= 2) {
        study.fitted = fitted_rate(h, ratio);
    }
    return study;
}

std::vector<DiagramCheck> run_diagram_check(const std::shared_ptr<const Mesh>& mesh, int trials, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::vector<DiagramCheck> out;
    for (BoundaryCondition bc : {BoundaryCondition::None, BoundaryCondition::Essential}) {
        for (DiagramStage stage : {DiagramStage::Grad, DiagramStage::Curl, DiagramStage::Div}) {
            out.push_back({stage, bc, trials, 0.0});
        }
    }
    const BoxMeshSpec& box = mesh->spec();
    const Polynomial bx = Polynomial::bubble(0, box.lower.x(), box.upper.x());
    const Polynomial by = Polynomial::bubble(1, box.lower.y(), box.upper.y());
    const Polynomial bz = Polynomial::bubble(2, box.lower.z(), box.upper.z());
    for (int trial = 0; trial < trials; ++trial) {
        const InterpolationOptions cubic{3};
        out[0].max_residual = std::max(
            out[0].max_residual, diagram_residual(mesh, scalar_polynomial(Polynomial(3, rng)), BoundaryCondition::None, cubic));
        const VectorField g = vector_polynomial(random_vector_polynomial(3, rng));
        out[1].max_residual =
            std::max(out[1].max_residual, diagram_residual(mesh, g, DiagramStage::Curl, BoundaryCondition::None, cubic));
        out[2].max_residual =
            std::max(out[2].max_residual, diagram_residual(mesh, g, DiagramStage::Div, BoundaryCondition::None, cubic));

        const InterpolationOptions bubbled{9};
        const BoundaryCondition bc = BoundaryCondition::Essential;
        out[3].max_residual = std::max(
            out[3].max_residual, diagram_residual(mesh, scalar_polynomial(bx * by * bz * Polynomial(3, rng)), bc, bubbled));
        const std::array<Polynomial, 3> tangential_free{by * bz * Polynomial(3, rng), bx * bz * Polynomial(3, rng),
                                                        bx * by * Polynomial(3, rng)};
        out[4].max_residual = std::max(
            out[4].max_residual, diagram_residual(mesh, vector_polynomial(tangential_free), DiagramStage::Curl, bc, bubbled));
        const std::array<Polynomial, 3> normal_free{bx * Polynomial(3, rng), by * Polynomial(3, rng),
                                                    bz * Polynomial(3, rng)};
        out[5].max_residual = std::max(
            out[5].max_residual, diagram_residual(mesh, vector_polynomial(normal_free), DiagramStage::Div, bc, bubbled));
    }
    return out;
}

}  // namespace curlfem
