#pragma once

// Sampling helpers shared by the test binaries.

#include <array>
#include <random>
#include <vector>

#include <curlfem/interpolation.hpp>
#include <curlfem/polynomial.hpp>
#include <curlfem/types.hpp>

namespace curlfem::testing {

inline Vec3 random_point(std::mt19937_64& rng, const Vec3& lower = Vec3::Zero(), const Vec3& upper = Vec3::Ones()) {
    std::uniform_real_distribution<Real> u(0.0, 1.0);
    return lower + Vec3(u(rng), u(rng), u(rng)).cwiseProduct(upper - lower);
}

/// Random point of the closed reference tetrahedron.
inline Vec3 random_reference_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<Real> u(0.0, 1.0);
    Vec3 p(u(rng), u(rng), u(rng));
    while (p.sum() > 1.0) {
        p = Vec3(u(rng), u(rng), u(rng));
    }
    return p;
}

inline Eigen::VectorXcd random_complex_vector(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<Real> g(0.0, 1.0);
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = Complex(g(rng), g(rng));
    }
    return v;
}

}  // namespace curlfem::testing
