#include "curlfem/quadrature.hpp"

#include <cmath>
#include <string>

namespace curlfem {

namespace {

constexpr int kMaxDegree = 30;

void check_degree(int degree) {
    if (degree < 0 || degree > kMaxDegree) {
        throw InvalidArgument("quadrature degree must lie in [0, " + std::to_string(kMaxDegree) +
                              "], got " + std::to_string(degree));
    }
}

// Points for exactness `degree` after the collapse adds `extra` polynomial degrees.
int points_for(int degree, int extra) { return (degree + extra) / 2 + 1; }

}  // namespace

LineRule gauss_legendre(int n) {
    if (n < 1) {
        throw InvalidArgument("Gauss-Legendre rule needs at least one point");
    }
    LineRule rule;
    rule.points.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    rule.degree = 2 * n - 1;
    // Newton on P_n over [-1, 1], then affine map to [0, 1].
    for (int i = 0; i < (n + 1) / 2; ++i) {
        Real x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        Real dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            Real p0 = 1.0;
            Real p1 = x;
            for (int k = 2; k <= n; ++k) {
                const Real p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const Real dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute derivative at the converged root.
        Real p0 = 1.0;
        Real p1 = x;
        for (int k = 2; k <= n; ++k) {
            const Real p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const Real w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.points[lo] = 0.5 * (1.0 - x);
        rule.points[hi] = 0.5 * (1.0 + x);
        rule.weights[lo] = 0.5 * w;
        rule.weights[hi] = 0.5 * w;
    }
    if (n % 2 == 1) {
        // The middle node is exactly 1/2; Newton lands within rounding of it.
        rule.points[static_cast<std::size_t>(n / 2)] = 0.5;
    }
    return rule;
}

LineRule line_rule(int degree) {
    check_degree(degree);
    LineRule rule = gauss_legendre(points_for(degree, 0));
    rule.degree = degree;
    return rule;
}

TriangleRule triangle_rule(int degree) {
    check_degree(degree);
    // (u, v) in [0,1]^2 -> (u, (1-u) v), Jacobian (1-u).
    const LineRule outer = gauss_legendre(points_for(degree, 1));
    const LineRule inner = gauss_legendre(points_for(degree, 0));
    TriangleRule rule;
    rule.degree = degree;
    for (std::size_t i = 0; i < outer.points.size(); ++i) {
        const Real u = outer.points[i];
        for (std::size_t j = 0; j < inner.points.size(); ++j) {
            const Real v = inner.points[j];
            rule.points.emplace_back(u, (1.0 - u) * v);
            rule.weights.push_back(outer.weights[i] * inner.weights[j] * (1.0 - u));
        }
    }
    return rule;
}

TetQuadrature tet_rule(int degree) {
    check_degree(degree);
    // (u, v, w) -> (u, (1-u) v, (1-u)(1-v) w), Jacobian (1-u)^2 (1-v).
    const LineRule r1 = gauss_legendre(points_for(degree, 2));
    const LineRule r2 = gauss_legendre(points_for(degree, 1));
    const LineRule r3 = gauss_legendre(points_for(degree, 0));
    TetQuadrature rule;
    rule.degree = degree;
    for (std::size_t i = 0; i < r1.points.size(); ++i) {
        const Real u = r1.points[i];
        for (std::size_t j = 0; j < r2.points.size(); ++j) {
            const Real v = r2.points[j];
            for (std::size_t k = 0; k < r3.points.size(); ++k) {
                const Real w = r3.points[k];
                rule.points.emplace_back(u, (1.0 - u) * v, (1.0 - u) * (1.0 - v) * w);
                rule.weights.push_back(r1.weights[i] * r2.weights[j] * r3.weights[k] *
                                       (1.0 - u) * (1.0 - u) * (1.0 - v));
            }
        }
    }
    return rule;
}

}  // namespace curlfem
