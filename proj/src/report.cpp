#include "curlfem/report.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace curlfem {

namespace {

nlohmann::json number(Real v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json to_json(const ErrorNorms& e) {
    return {{"l2", number(e.l2)}, {"curl", number(e.curl)}, {"hcurl", number(e.hcurl)}};
}

nlohmann::json to_json(const Rates& r) {
    return {{"l2", number(r.l2)}, {"curl", number(r.curl)}, {"hcurl", number(r.hcurl)}};
}

std::string csv_number(Real v) {
    if (!std::isfinite(v)) {
        return "";
    }
    std::ostringstream s;
    s << std::setprecision(12) << v;
    return s.str();
}

}  // namespace

const char* to_string(DiagramStage stage) {
    switch (stage) {
    case DiagramStage::Grad: return "grad";
    case DiagramStage::Curl: return "curl";
    case DiagramStage::Div: return "div";
    }
    return "?";
}

const char* to_string(BoundaryCondition bc) { return bc == BoundaryCondition::Essential ? "essential" : "none"; }

const char* to_string(SolveMethod method) { return method == SolveMethod::Cholesky ? "cholesky" : "lu"; }

const char* to_string(ThetaPolicy policy) {
    return policy == ThetaPolicy::ArgumentRange ? "argument_range" : "maximization";
}

nlohmann::json to_json(const MaterialParams& p) {
    return {{"theta", p.theta},
            {"mu_lower", p.mu_lower},
            {"mu_upper", p.mu_upper},
            {"kappa_lower", p.kappa_lower},
            {"kappa_upper", p.kappa_upper},
            {"mu_ratio", p.mu_ratio},
            {"kappa_ratio", p.kappa_ratio},
            {"reynolds", p.reynolds},
            {"reynolds_hat", p.reynolds_hat},
            {"theta_policy", to_string(p.policy)},
            {"samples", p.samples}};
}

nlohmann::json to_json(const ConvergenceReport& r, const ReportOptions& options) {
    nlohmann::json levels = nlohmann::json::array();
    for (const LevelResult& l : r.levels) {
        nlohmann::json j = {{"resolution", l.resolution},
                            {"h", l.h},
                            {"dofs", l.dofs},
                            {"error", to_json(l.error)},
                            {"relative_residual", l.relative_residual},
                            {"weak_div_residual", l.weak_div_residual},
                            {"solver", to_string(l.method)}};
        if (l.interpolation_error) {
            j["interpolation_error"] = to_json(*l.interpolation_error);
        }
        if (l.c_obs) {
            j["c_obs"] = number(*l.c_obs);
        }
        if (options.timings) {
            j["seconds"] = l.seconds;
        }
        levels.push_back(std::move(j));
    }
    nlohmann::json rates = nlohmann::json::array();
    for (const Rates& q : r.rates) {
        rates.push_back(to_json(q));
    }
    nlohmann::json out = {{"study", r.study},
                          {"mu", r.mu_label},
                          {"kappa", r.kappa_label},
                          {"quad_degree", r.quad_degree},
                          {"error_quad_degree", r.error_quad_degree},
                          {"ell_d", r.ell_d},
                          {"levels", std::move(levels)},
                          {"rates", std::move(rates)},
                          {"fitted_rates", r.fitted ? to_json(*r.fitted) : nlohmann::json(nullptr)},
                          {"observed_only", r.observed_only},
                          {"complete", r.complete},
                          {"failure", r.complete ? nlohmann::json(nullptr) : nlohmann::json(r.failure)}};
    if (r.params) {
        out["params"] = to_json(*r.params);
    }
    if (r.reference_resolution) {
        out["reference"] = {{"resolution", *r.reference_resolution}, {"factor", r.reference_factor.value_or(0)}};
    }
    if (options.timings) {
        out["wall_seconds"] = r.wall_seconds;
    }
    return out;
}

nlohmann::json to_json(const PsEstimate& e) {
    return {{"h", e.h},
            {"lambda_min", e.lambda_min},
            {"c_p", e.c_p},
            {"iterations", e.iterations},
            {"constraint_residual", e.constraint_residual},
            {"eigen_residual", e.eigen_residual},
            {"ritz_values", e.ritz_values}};
}

nlohmann::json to_json(const LiftingStudy& s) {
    nlohmann::json levels = nlohmann::json::array();
    for (const LiftingLevel& l : s.levels) {
        levels.push_back({{"resolution", l.resolution},
                          {"h", l.h},
                          {"distance", l.lifting.distance},
                          {"curl_norm", l.lifting.curl_norm},
                          {"ratio", l.lifting.ratio}});
    }
    nlohmann::json rates = nlohmann::json::array();
    for (Real r : s.rates) {
        rates.push_back(number(r));
    }
    return {{"refinement_factor", s.refinement_factor},
            {"levels", std::move(levels)},
            {"rates", std::move(rates)},
            {"fitted_rate", number(s.fitted)}};
}

nlohmann::json to_json(const std::vector<DiagramCheck>& checks) {
    nlohmann::json out = nlohmann::json::array();
    for (const DiagramCheck& d : checks) {
        out.push_back({{"stage", to_string(d.stage)},
                       {"bc", to_string(d.bc)},
                       {"trials", d.trials},
                       {"max_residual", d.max_residual}});
    }
    return out;
}

void write_csv(std::ostream& out, const ConvergenceReport& r) {
    out << "resolution,h,dofs,e_l2,e_curl,e_hcurl,rate_l2,rate_curl,rate_hcurl\n";
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
        const LevelResult& l = r.levels[i];
        out << l.resolution << ',' << csv_number(l.h) << ',' << l.dofs << ',' << csv_number(l.error.l2) << ','
            << csv_number(l.error.curl) << ',' << csv_number(l.error.hcurl);
        if (i > 0 && i - 1 < r.rates.size()) {
            const Rates& q = r.rates[i - 1];
            out << ',' << csv_number(q.l2) << ',' << csv_number(q.curl) << ',' << csv_number(q.hcurl);
        } else {
            out << ",,,";
        }
        out << '\n';
    }
}

void write_vtk(std::ostream& out, const Mesh& mesh, const DiscreteField* field) {
    if (field != nullptr && &field->space().mesh() != &mesh) {
        throw InvalidArgument("write_vtk: the field lives on another mesh");
    }
    const bool vector_field = field != nullptr && (field->space().family() == Family::HCurl ||
                                                   field->space().family() == Family::HDiv);
    out << "# vtk DataFile Version 3.0\n";
    out << "curlfem: POINTS, CELLS (tetra), CELL_TYPES, CELL_DATA tag";
    if (field != nullptr) {
        out << (vector_field ? ", field_re, field_im (vectors at barycenters)"
                             : ", field_re, field_im (scalars at barycenters)");
    }
    out << '\n' << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << std::setprecision(17);
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const Vec3& v : mesh.vertices()) {
        out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    }
    out << "CELLS " << mesh.num_cells() << ' ' << 5 * mesh.num_cells() << '\n';
    for (const auto& c : mesh.cells()) {
        out << "4 " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
    }
    out << "CELL_TYPES " << mesh.num_cells() << '\n';
    for (int c = 0; c < mesh.num_cells(); ++c) {
        out << "10\n";
    }
    out << "CELL_DATA " << mesh.num_cells() << '\n';
    out << "SCALARS tag int 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < mesh.num_cells(); ++c) {
        out << mesh.cell_tag(c) << '\n';
    }
    if (field == nullptr) {
        return;
    }
    const Vec3 barycenter = Vec3::Constant(0.25);
    for (const bool imag : {false, true}) {
        const char* name = imag ? "field_im" : "field_re";
        if (vector_field) {
            out << "VECTORS " << name << " double\n";
        } else {
            out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        }
        for (int c = 0; c < mesh.num_cells(); ++c) {
            if (vector_field) {
                const CVec3 v = eval_vector(*field, c, barycenter);
                const Vec3 part = imag ? Vec3(v.imag()) : Vec3(v.real());
                out << part.x() << ' ' << part.y() << ' ' << part.z() << '\n';
            } else {
                const Complex v = eval_scalar(*field, c, barycenter);
                out << (imag ? v.imag() : v.real()) << '\n';
            }
        }
    }
}

}  // namespace curlfem
