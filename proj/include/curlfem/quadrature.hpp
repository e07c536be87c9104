#pragma once

#include <vector>

#include <Eigen/Dense>

#include "curlfem/types.hpp"

namespace curlfem {

/// Gauss rule on [0, 1].
struct LineRule {
    std::vector<Real> points;
    std::vector<Real> weights;
    int degree = 0;
};

/// Rule on the reference triangle (0,0), (1,0), (0,1); weights sum to 1/2.
struct TriangleRule {
    std::vector<Eigen::Vector2d> points;
    std::vector<Real> weights;
    int degree = 0;
};

/// Rule on the reference tetrahedron; weights sum to 1/6.
struct TetQuadrature {
    std::vector<Vec3> points;
    std::vector<Real> weights;
    int degree = 0;

    std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule on [0, 1] (exact to degree 2n - 1).
LineRule gauss_legendre(int n);

/// Smallest Gauss-Legendre rule exact for polynomials of `degree` on [0, 1].
LineRule line_rule(int degree);

/// Collapsed (Duffy) product rules. All weights are positive. Throws
/// InvalidArgument for negative degrees or degrees above 30.
TriangleRule triangle_rule(int degree);
TetQuadrature tet_rule(int degree);

}  // namespace curlfem
