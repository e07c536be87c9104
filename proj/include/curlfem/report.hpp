#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "curlfem/helmholtz.hpp"
#include "curlfem/study.hpp"

namespace curlfem {

struct ReportOptions {
    /// Wall-clock fields vary between runs; leave them out for byte-stable output.
    bool timings = true;
};

nlohmann::json to_json(const MaterialParams& p);
nlohmann::json to_json(const ConvergenceReport& r, const ReportOptions& options = {});
nlohmann::json to_json(const PsEstimate& e);
nlohmann::json to_json(const LiftingStudy& s);
nlohmann::json to_json(const std::vector<DiagramCheck>& checks);

/// One row per level: resolution, h, dofs, e_l2, e_curl, e_hcurl, then the
/// rates from the previous level (empty on the first row).
void write_csv(std::ostream& out, const ConvergenceReport& r);

/// Legacy VTK ASCII unstructured grid: points, tetrahedra, cell tags and, when
/// a field is given, its real and imaginary parts at each cell barycenter.
void write_vtk(std::ostream& out, const Mesh& mesh, const DiscreteField* field = nullptr);

const char* to_string(DiagramStage stage);
const char* to_string(BoundaryCondition bc);
const char* to_string(SolveMethod method);
const char* to_string(ThetaPolicy policy);

}  // namespace curlfem
