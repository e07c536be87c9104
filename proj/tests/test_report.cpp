#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>

#include <curlfem/report.hpp>

using namespace curlfem;

namespace {

int count_lines(const std::string& text) {
    int n = 0;
    for (char ch : text) {
        n += ch == '\n' ? 1 : 0;
    }
    return n;
}

}  // namespace

TEST_CASE("convergence report serializes every level", "[report]") {
    const ConvergenceReport r = run_convergence(manufactured_smooth(1.0, 1.0), {2, 4});
    const nlohmann::json j = to_json(r);
    CHECK(j["study"] == r.study);
    CHECK(j["complete"] == true);
    CHECK(j["failure"].is_null());
    REQUIRE(j["levels"].size() == 2);
    CHECK(j["levels"][1]["dofs"] == r.levels[1].dofs);
    CHECK(j["levels"][1]["error"]["hcurl"].get<double>() == r.levels[1].error.hcurl);
    CHECK(j["levels"][0]["solver"].is_string());
    CHECK(j["rates"].size() == 1);
    CHECK(j.contains("params"));
    CHECK(j.contains("wall_seconds"));
    CHECK(j["levels"][0].contains("seconds"));
}

TEST_CASE("timings can be left out for stable output", "[report]") {
    const ConvergenceReport first = run_convergence(manufactured_smooth(1.0, 1.0), {2, 4});
    const ConvergenceReport second = run_convergence(manufactured_smooth(1.0, 1.0), {2, 4});
    const nlohmann::json a = to_json(first, {false});
    CHECK_FALSE(a.contains("wall_seconds"));
    CHECK_FALSE(a["levels"][0].contains("seconds"));
    CHECK(a.dump() == to_json(second, {false}).dump());
}

TEST_CASE("undefined rates become null", "[report]") {
    const ConvergenceReport r = run_convergence(manufactured_zero(1.0, 1.0), {2, 4});
    const nlohmann::json j = to_json(r);
    CHECK(j["rates"][0]["hcurl"].is_null());

    std::ostringstream csv;
    write_csv(csv, r);
    CHECK(csv.str() == "resolution,h,dofs,e_l2,e_curl,e_hcurl,rate_l2,rate_curl,rate_hcurl\n"
                       "2,0.866025403784,26,0,0,0,,,\n"
                       "4,0.433012701892,316,0,0,0,,,\n");
}

TEST_CASE("CSV has a header and one row per level", "[report]") {
    const ConvergenceReport r = run_convergence(manufactured_smooth(1.0, 1.0), {2, 4});
    std::ostringstream s;
    write_csv(s, r);
    const std::string text = s.str();
    CHECK(count_lines(text) == 3);
    CHECK(text.rfind("resolution,h,dofs,", 0) == 0);
    // First data row has empty rate columns, the second has all three.
    std::istringstream lines(text);
    std::string header;
    std::string row0;
    std::string row1;
    std::getline(lines, header);
    std::getline(lines, row0);
    std::getline(lines, row1);
    CHECK(row0.substr(row0.size() - 3) == ",,,");
    CHECK(row1.find(",,") == std::string::npos);
}

TEST_CASE("VTK output lists points, cells and data", "[report]") {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    std::ostringstream bare;
    write_vtk(bare, *mesh);
    const std::string text = bare.str();
    CHECK(text.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
    CHECK(text.find("POINTS 27 double\n") != std::string::npos);
    CHECK(text.find("CELLS 48 240\n") != std::string::npos);
    CHECK(text.find("CELL_TYPES 48\n") != std::string::npos);
    CHECK(text.find("SCALARS tag int 1\n") != std::string::npos);
    CHECK(text.find("field_re") == std::string::npos);
    // 4 header lines, points, cells, types, tags.
    CHECK(count_lines(text) == 4 + (1 + 27) + (1 + 48) + (1 + 48) + (3 + 48));

    const auto c = build_space(mesh, Family::HCurl, BoundaryCondition::Essential);
    const DiscreteField a = interp(c, manufactured_smooth(1.0, 1.0).exact);
    std::ostringstream with_field;
    write_vtk(with_field, *mesh, &a);
    CHECK(with_field.str().find("VECTORS field_re double\n") != std::string::npos);
    CHECK(with_field.str().find("VECTORS field_im double\n") != std::string::npos);
    CHECK(count_lines(with_field.str()) == count_lines(text) + 2 * (1 + 48));

    const auto other = build_box_mesh(BoxMeshSpec::unit_cube(2));
    std::ostringstream sink;
    CHECK_THROWS_AS(write_vtk(sink, *other, &a), InvalidArgument);
}

TEST_CASE("eigenvalue, lifting and diagram results serialize", "[report]") {
    const auto mesh = build_box_mesh(BoxMeshSpec::unit_cube(2));
    const PsEstimate e = ps_constant(mesh, CoefficientField::constant(1.0), mesh->diameter());
    const nlohmann::json pj = to_json(e);
    CHECK(pj["lambda_min"].get<double>() == e.lambda_min);
    CHECK(pj["ritz_values"].size() == e.ritz_values.size());

    const LiftingStudy s = run_lifting(manufactured_smooth(1.0, 1.0), {2, 4}, 2);
    const nlohmann::json lj = to_json(s);
    CHECK(lj["refinement_factor"] == 2);
    CHECK(lj["levels"].size() == 2);
    CHECK(lj["rates"].size() == 1);

    const nlohmann::json dj = to_json(run_diagram_check(mesh, 1, 3));
    REQUIRE(dj.size() == 6);
    CHECK(dj[0]["stage"] == "grad");
    CHECK(dj[5]["bc"] == "essential");
}
