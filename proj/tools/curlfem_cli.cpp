// Command-line driver for the convergence studies and diagnostics.
//
// Every subcommand writes a JSON report (stdout unless --out is given) and
// exits with 0 only when all of its checks pass, 1 when a check fails and 2
// on invalid input or a failed computation. The report layout is described in
// docs/report_schema.md.

#include <cmath>
#include <iomanip>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <curlfem/helmholtz.hpp>
#include <curlfem/report.hpp>
#include <curlfem/study.hpp>

using namespace curlfem;
using nlohmann::json;

namespace {

struct Options {
    std::string resolution;
    int levels = 0;
    int quad_degree = 4;
    int error_quad_degree = 6;
    std::string coeffs;
    std::string mu;
    std::string mu2 = "4,0.5";
    std::string kappa = "1";
    std::string kappa2 = "100";
    int reference_factor = 4;
    int lift_factor = 0;
    int trials = 20;
    int threads = 1;
    unsigned seed = 1;
    bool weighted = false;
    double shift = 0.0;
    bool deterministic = false;
    std::string field = "none";
    std::string out;
    std::string csv;
    std::string vtk;
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        parts.push_back(item);
    }
    return parts;
}

std::array<int, 3> parse_resolution(const std::string& text) {
    const auto parts = split_list(text);
    if (parts.size() != 1 && parts.size() != 3) {
        throw InvalidArgument("--resolution takes n or a,b,c");
    }
    std::array<int, 3> r{};
    for (int i = 0; i < 3; ++i) {
        r[static_cast<std::size_t>(i)] = std::stoi(parts[parts.size() == 1 ? 0 : static_cast<std::size_t>(i)]);
    }
    return r;
}

int cubic_resolution(const std::string& text) {
    const auto r = parse_resolution(text);
    if (r[0] != r[1] || r[1] != r[2]) {
        throw InvalidArgument("studies on the unit cube need equal resolutions along the three axes");
    }
    return r[0];
}

Complex parse_complex(const std::string& text) {
    const auto parts = split_list(text);
    if (parts.empty() || parts.size() > 2) {
        throw InvalidArgument("complex values are written re or re,im, got '" + text + "'");
    }
    return {std::stod(parts[0]), parts.size() == 2 ? std::stod(parts[1]) : 0.0};
}

std::vector<int> level_list(int base, int levels) {
    if (levels < 1) {
        throw InvalidArgument("--levels must be at least 1");
    }
    std::vector<int> out;
    for (int i = 0, n = base; i < levels; ++i, n *= 2) {
        out.push_back(n);
    }
    return out;
}

CoefficientField preset(const std::string& name, const std::string& first, const std::string& second) {
    return make_preset(name, parse_complex(first), parse_complex(second));
}

std::shared_ptr<const Mesh> unit_cube_mesh(const std::string& resolution) {
    BoxMeshSpec spec;
    spec.resolution = parse_resolution(resolution);
    return build_box_mesh(spec);
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

std::string format(Real v) {
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
}

StudyOptions study_options(const Options& o) {
    StudyOptions s;
    s.assembly.quad_degree = o.quad_degree;
    s.assembly.threads = o.threads;
    s.error_quad_degree = o.error_quad_degree;
    return s;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) {
        throw InvalidArgument("cannot write " + path);
    }
    f << text;
}

void add_rate_checks(const ConvergenceReport& r, std::vector<Check>& checks, bool smooth) {
    checks.push_back({"all levels solved", r.complete, r.complete ? "" : r.failure});
    bool residuals = !r.levels.empty();
    for (const LevelResult& l : r.levels) {
        residuals = residuals && l.relative_residual <= 1e-10;
    }
    checks.push_back({"solver residuals <= 1e-10", residuals, ""});
    if (!r.fitted) {
        return;
    }
    const Rates& f = *r.fitted;
    if (smooth) {
        const bool in_band = f.hcurl >= 0.85 && f.hcurl <= 1.15;
        checks.push_back({"H(curl) rate in [0.85, 1.15]", in_band, "observed " + format(f.hcurl)});
    } else {
        bool decreasing = true;
        for (std::size_t i = 1; i < r.levels.size(); ++i) {
            decreasing = decreasing && r.levels[i].error.l2 < r.levels[i - 1].error.l2 &&
                         r.levels[i].error.hcurl < r.levels[i - 1].error.hcurl;
        }
        checks.push_back({"errors strictly decreasing", decreasing, ""});
    }
    checks.push_back({"L2 rate >= H(curl) rate - 0.1", f.l2 >= f.hcurl - 0.1,
                      "L2 " + format(f.l2) + ", H(curl) " + format(f.hcurl)});
}

json run_converge(const Options& o, std::vector<Check>& checks) {
    const Complex mu = parse_complex(o.mu);
    const Complex kappa = parse_complex(o.kappa);
    if (o.coeffs != "constant") {
        throw InvalidArgument("converge uses the closed-form solution and needs --coeffs constant");
    }
    const ManufacturedCase problem = manufactured_smooth(mu, kappa);
    const std::vector<int> levels = level_list(cubic_resolution(o.resolution), o.levels);
    const ConvergenceReport report = run_convergence(problem, levels, study_options(o));
    add_rate_checks(report, checks, true);

    json j = to_json(report, {!o.deterministic});
    j["mu0"] = complex_json(mu);
    j["kappa0"] = complex_json(kappa);
    if (!o.csv.empty()) {
        std::ostringstream s;
        write_csv(s, report);
        write_text(o.csv, s.str());
    }
    if (o.lift_factor > 0) {
        const LiftingStudy lifting = run_lifting(problem, levels, o.lift_factor, study_options(o));
        j["lifting"] = to_json(lifting);
        bool decreasing = true;
        for (std::size_t i = 1; i < lifting.levels.size(); ++i) {
            decreasing = decreasing && lifting.levels[i].lifting.ratio < lifting.levels[i - 1].lifting.ratio;
        }
        checks.push_back({"lifting ratio decreasing", decreasing, ""});
        if (lifting.levels.size() >= 2) {
            checks.push_back({"lifting rate >= 0.8", lifting.fitted >= 0.8, "observed " + format(lifting.fitted)});
        }
    }
    if (!o.vtk.empty()) {
        const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(levels.back()));
        const ModelSolution sol = solve_model_problem(mesh, problem.mu, problem.kappa, problem.source,
                                                      study_options(o));
        std::ofstream f(o.vtk);
        write_vtk(f, *mesh, &sol.field);
    }
    return j;
}

json run_hetero(const Options& o, std::vector<Check>& checks) {
    const CoefficientField mu = CoefficientField::constant(parse_complex(o.mu));
    const CoefficientField kappa = preset(o.coeffs, o.kappa, o.kappa2);
    const ManufacturedCase smooth = manufactured_smooth(1.0, 1.0);
    const std::vector<int> levels = level_list(cubic_resolution(o.resolution), o.levels);
    const ConvergenceReport report =
        run_heterogeneous(mu, kappa, smooth.source, levels, o.reference_factor, study_options(o));
    add_rate_checks(report, checks, false);
    if (!o.csv.empty()) {
        std::ostringstream s;
        write_csv(s, report);
        write_text(o.csv, s.str());
    }
    json j = to_json(report, {!o.deterministic});
    j["source"] = "(0, 0, sin(pi x) sin(pi y))";
    return j;
}

json run_ps(const Options& o, std::vector<Check>& checks) {
    const CoefficientField mu = preset(o.coeffs, o.mu, o.mu2);
    const auto base = parse_resolution(o.resolution);
    PsOptions ps;
    ps.weighted_mass = o.weighted;
    ps.seed = o.seed;
    ps.assembly.quad_degree = o.quad_degree;
    ps.assembly.threads = o.threads;
    if (o.shift > 0.0) {
        ps.shift = o.shift;
    }
    json estimates = json::array();
    std::vector<Real> cp;
    bool positive = true;
    bool constrained = true;
    for (int level = 0; level < std::max(1, o.levels); ++level) {
        BoxMeshSpec spec;
        for (int i = 0; i < 3; ++i) {
            spec.resolution[static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(i)] << level;
        }
        const auto mesh = build_box_mesh(spec);
        const PsEstimate e = ps_constant(mesh, mu, mesh->diameter(), ps);
        json row = to_json(e);
        row["resolution"] = spec.resolution;
        estimates.push_back(row);
        positive = positive && e.lambda_min > 0.0;
        constrained = constrained && e.constraint_residual <= 1e-8;
        cp.push_back(e.c_p);
    }
    checks.push_back({"lambda_min > 0 on every level", positive, ""});
    checks.push_back({"eigenvector constraint residual <= 1e-8", constrained, ""});
    if (cp.size() >= 2) {
        const Real a = cp[cp.size() - 2];
        const Real b = cp.back();
        const Real variation = std::abs(b - a) / std::max(a, b);
        checks.push_back({"C_P varies < 20% across the last two levels", variation < 0.2,
                          "variation " + format(variation)});
    }
    return {{"mu", mu.label()}, {"weighted_mass", o.weighted}, {"estimates", estimates},
            {"cavity_value", 2.0 * kPi * kPi}};
}

json run_helmholtz(const Options& o, std::vector<Check>& checks) {
    const CoefficientField mu = preset(o.coeffs, o.mu, o.mu2);
    const auto mesh = unit_cube_mesh(o.resolution);
    AssemblyOptions assembly;
    assembly.quad_degree = o.quad_degree;
    assembly.threads = o.threads;
    const auto c = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
    const auto g = build_space(mesh, Family::H1, BoundaryCondition::Essential);
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<Real> gauss;
    Eigen::VectorXcd b(c->num_dofs());
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        b[i] = Complex(gauss(rng), gauss(rng));
    }
    const DiscreteField field(c, b);
    const HelmholtzSplit split = helmholtz_split(field, mu, assembly);
    const Eigen::VectorXcd rebuilt = split.divergence_free.coefficients() +
                                     gradient_matrix(*g, *c).cast<Complex>() * split.potential.coefficients();
    const Real reconstruction = (rebuilt - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
    const HelmholtzSplit again = helmholtz_split(split.divergence_free, mu, assembly);
    const Real idempotence = again.potential.coefficients().norm() /
                             std::max(split.potential.coefficients().norm(), 1e-300);

    checks.push_back({"reconstruction exact at coefficient level", reconstruction <= 1e-12, format(reconstruction)});
    checks.push_back({"constraint residual <= 1e-9", split.constraint_residual <= 1e-9,
                      format(split.constraint_residual)});
    checks.push_back({"idempotence <= 1e-10", idempotence <= 1e-10, format(idempotence)});
    json j = {{"mu", mu.label()},
              {"resolution", mesh->spec().resolution},
              {"seed", o.seed},
              {"edge_dofs", c->num_dofs()},
              {"vertex_dofs", g->num_dofs()},
              {"reconstruction_error", reconstruction},
              {"constraint_residual", split.constraint_residual},
              {"potential_solve_residual", split.solve_residual},
              {"idempotence", idempotence}};
    if (c->num_dofs() <= 4000) {
        const HelmholtzDimensions d = helmholtz_dimensions(mesh, mu, assembly);
        j["dimensions"] = {{"edge_dofs", d.edge_dofs},
                           {"vertex_dofs", d.vertex_dofs},
                           {"coupling_rank", d.coupling_rank},
                           {"divergence_free_dim", d.divergence_free_dim}};
        checks.push_back({"dimension identity", d.identity_holds(),
                          std::to_string(d.edge_dofs) + " = " + std::to_string(d.vertex_dofs) + " + " +
                              std::to_string(d.divergence_free_dim)});
    }
    if (o.lift_factor > 0) {
        const LiftingResult lift = lift_curl_preserving(split.divergence_free, mu, o.lift_factor, assembly);
        j["lifting"] = {{"factor", o.lift_factor},
                        {"distance", lift.distance},
                        {"curl_norm", lift.curl_norm},
                        {"ratio", lift.ratio}};
    }
    return j;
}

json run_diagram(const Options& o, std::vector<Check>& checks) {
    const auto mesh = unit_cube_mesh(o.resolution);
    const std::vector<DiagramCheck> results = run_diagram_check(mesh, o.trials, o.seed);
    for (const DiagramCheck& d : results) {
        checks.push_back({std::string(to_string(d.stage)) + " diagram (" + to_string(d.bc) + ") <= 1e-11",
                          d.max_residual <= 1e-11, format(d.max_residual)});
    }
    return {{"resolution", mesh->spec().resolution}, {"seed", o.seed}, {"checks", to_json(results)}};
}

json run_dump(const Options& o, std::vector<Check>& checks) {
    const auto mesh = unit_cube_mesh(o.resolution);
    std::optional<DiscreteField> field;
    const ManufacturedCase smooth = manufactured_smooth(parse_complex(o.mu), parse_complex(o.kappa));
    if (o.field == "interpolant") {
        field = interp(build_space(mesh, Family::HCurl, BoundaryCondition::Essential), smooth.exact);
    } else if (o.field == "solution") {
        field = solve_model_problem(mesh, smooth.mu, smooth.kappa, smooth.source, study_options(o)).field;
    } else if (o.field != "none") {
        throw InvalidArgument("--field takes none, interpolant or solution");
    }
    std::ostringstream s;
    write_vtk(s, *mesh, field ? &*field : nullptr);
    if (o.vtk.empty()) {
        std::cout << s.str();
    } else {
        write_text(o.vtk, s.str());
    }
    checks.push_back({"mesh written", true, ""});
    return {{"resolution", mesh->spec().resolution},
            {"vertices", mesh->num_vertices()},
            {"edges", mesh->num_edges()},
            {"faces", mesh->num_faces()},
            {"cells", mesh->num_cells()},
            {"field", o.field}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge element Maxwell solver studies"};
    app.set_config("--config", "", "Flat key=value file mirroring the long flags");
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--resolution", o.resolution, "Cells per axis: n or a,b,c (base level for studies)");
    app.add_option("--levels", o.levels, "Number of resolutions, doubling from --resolution");
    app.add_option("--quad-degree", o.quad_degree, "Assembly quadrature degree")->check(CLI::Range(1, 30));
    app.add_option("--error-quad-degree", o.error_quad_degree, "Error-norm quadrature degree")
        ->check(CLI::Range(6, 30));
    app.add_option("--coeffs", o.coeffs, "Coefficient preset: constant, checkerboard2 or layered");
    app.add_option("--mu", o.mu, "mu as re,im");
    app.add_option("--mu2", o.mu2, "Second mu value of a preset");
    app.add_option("--kappa", o.kappa, "kappa as re,im");
    app.add_option("--kappa2", o.kappa2, "Second kappa value of a preset");
    app.add_option("--reference-factor", o.reference_factor, "hetero: reference refinement factor")
        ->check(CLI::Range(2, 16));
    app.add_option("--lift-factor", o.lift_factor, "Curl-preserving lifting refinement factor (0 = off)");
    app.add_option("--trials", o.trials, "diagram-check: number of random inputs")->check(CLI::PositiveNumber);
    app.add_option("--threads", o.threads, "Assembly threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "Seed for random property sampling");
    app.add_flag("--weighted", o.weighted, "ps-constant: weight the mass by |mu|");
    app.add_option("--shift", o.shift, "ps-constant: saddle shift (default ell_D^-2)");
    app.add_flag("--deterministic", o.deterministic, "Omit wall-clock fields from the report");
    app.add_option("--field", o.field, "dump-mesh: none, interpolant or solution");
    app.add_option("--out", o.out, "JSON report path (default stdout)");
    app.add_option("--csv", o.csv, "CSV table path");
    app.add_option("--vtk", o.vtk, "Legacy VTK output path");

    struct Command {
        const char* name;
        const char* help;
        const char* resolution;
        int levels;
        const char* coeffs;
        const char* mu;
        json (*run)(const Options&, std::vector<Check>&);
    };
    const std::vector<Command> commands = {
        {"converge", "Smooth manufactured convergence study", "4", 3, "constant", "1,1", run_converge},
        {"hetero", "Checkerboard convergence study against a fine reference", "2", 3, "checkerboard2", "1",
         run_hetero},
        {"ps-constant", "Discrete Poincare-Steklov constant", "2", 3, "constant", "1", run_ps},
        {"helmholtz", "Discrete Helmholtz decomposition of a random field", "4", 1, "checkerboard2", "1,1",
         run_helmholtz},
        {"diagram-check", "Commuting-diagram residuals", "2", 1, "constant", "1", run_diagram},
        {"dump-mesh", "Write the mesh and an optional field as legacy VTK", "2", 1, "constant", "1", run_dump},
    };
    for (const Command& c : commands) {
        app.add_subcommand(c.name, c.help);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    const Command* chosen = nullptr;
    for (const Command& c : commands) {
        if (app.got_subcommand(c.name)) {
            chosen = &c;
        }
    }
    if (o.resolution.empty()) {
        o.resolution = chosen->resolution;
    }
    if (o.levels == 0) {
        o.levels = chosen->levels;
    }
    if (o.coeffs.empty()) {
        o.coeffs = chosen->coeffs;
    }
    if (o.mu.empty()) {
        o.mu = chosen->mu;
    }

    std::vector<Check> checks;
    json report;
    try {
        report = chosen->run(o, checks);
    } catch (const std::exception& e) {
        std::cerr << chosen->name << ": " << e.what() << '\n';
        return 2;
    }

    bool passed = true;
    json check_list = json::array();
    for (const Check& c : checks) {
        passed = passed && c.passed;
        check_list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")")
                  << '\n';
    }
    json out = {{"command", chosen->name},
                {"config",
                 {{"resolution", o.resolution},
                  {"levels", o.levels},
                  {"quad_degree", o.quad_degree},
                  {"error_quad_degree", o.error_quad_degree},
                  {"coeffs", o.coeffs},
                  {"mu", o.mu},
                  {"kappa", o.kappa},
                  {"seed", o.seed}}},
                {"result", report},
                {"checks", check_list},
                {"passed", passed}};
    const std::string text = out.dump(2) + "\n";
    try {
        if (o.out.empty()) {
            if (chosen->run != run_dump || !o.vtk.empty()) {
                std::cout << text;
            }
        } else {
            write_text(o.out, text);
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    return passed ? 0 : 1;
}
