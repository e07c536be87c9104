#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "curlfem/interpolation.hpp"
#include "curlfem/types.hpp"

namespace curlfem {

/// Complex polynomial sum c_{ijk} x^i y^j z^k of total degree <= degree.
class Polynomial {
public:
    Polynomial() = default;
    /// Random complex coefficients, real and imaginary parts uniform in [-1, 1].
    Polynomial(int degree, std::mt19937_64& rng) {
        std::uniform_real_distribution<Real> u(-1.0, 1.0);
        for (int i = 0; i <= degree; ++i) {
            for (int j = 0; i + j <= degree; ++j) {
                for (int k = 0; i + j + k <= degree; ++k) {
                    terms_.push_back({{i, j, k}, Complex(u(rng), u(rng))});
                }
            }
        }
    }

    /// c x^i y^j z^k
    static Polynomial monomial(Complex c, int i, int j, int k) {
        Polynomial p;
        p.terms_.push_back({{i, j, k}, c});
        return p;
    }

    /// (s - lo)(hi - s) along one axis; vanishes on both planes s = lo and s = hi.
    static Polynomial bubble(int axis, Real lo = 0.0, Real hi = 1.0) {
        std::array<int, 3> e1{0, 0, 0};
        e1[static_cast<std::size_t>(axis)] = 1;
        std::array<int, 3> e2{0, 0, 0};
        e2[static_cast<std::size_t>(axis)] = 2;
        Polynomial p;
        p.terms_.push_back({{0, 0, 0}, Complex(-lo * hi)});
        p.terms_.push_back({e1, Complex(lo + hi)});
        p.terms_.push_back({e2, Complex(-1.0)});
        return p;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial out;
        for (const auto& ta : a.terms_) {
            for (const auto& tb : b.terms_) {
                out.terms_.push_back({{ta.e[0] + tb.e[0], ta.e[1] + tb.e[1], ta.e[2] + tb.e[2]}, ta.c * tb.c});
            }
        }
        return out;
    }

    /// Largest total degree among the stored terms (0 for the zero polynomial).
    int degree() const {
        int d = 0;
        for (const auto& t : terms_) {
            d = std::max(d, t.e[0] + t.e[1] + t.e[2]);
        }
        return d;
    }

    Complex operator()(const Vec3& x) const {
        Complex sum{0.0};
        for (const auto& t : terms_) {
            sum += t.c * std::pow(x.x(), t.e[0]) * std::pow(x.y(), t.e[1]) * std::pow(x.z(), t.e[2]);
        }
        return sum;
    }

    Polynomial derivative(int axis) const {
        Polynomial d;
        for (const auto& t : terms_) {
            if (t.e[static_cast<std::size_t>(axis)] == 0) {
                continue;
            }
            Term dt = t;
            dt.c *= static_cast<Real>(t.e[static_cast<std::size_t>(axis)]);
            dt.e[static_cast<std::size_t>(axis)] -= 1;
            d.terms_.push_back(dt);
        }
        return d;
    }

private:
    struct Term {
        std::array<int, 3> e;
        Complex c;
    };
    std::vector<Term> terms_;
};

inline ScalarField scalar_polynomial(const Polynomial& p) {
    ScalarField f;
    f.value = [p](const Vec3& x) { return p(x); };
    const std::array<Polynomial, 3> d{p.derivative(0), p.derivative(1), p.derivative(2)};
    f.gradient = [d](const Vec3& x) { return CVec3(d[0](x), d[1](x), d[2](x)); };
    return f;
}

inline VectorField vector_polynomial(const std::array<Polynomial, 3>& p) {
    VectorField f;
    f.value = [p](const Vec3& x) { return CVec3(p[0](x), p[1](x), p[2](x)); };
    // d[i][j] = d p_i / d x_j
    std::array<std::array<Polynomial, 3>, 3> d;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = p[static_cast<std::size_t>(i)].derivative(j);
        }
    }
    f.curl = [d](const Vec3& x) {
        return CVec3(d[2][1](x) - d[1][2](x), d[0][2](x) - d[2][0](x), d[1][0](x) - d[0][1](x));
    };
    f.divergence = [d](const Vec3& x) { return d[0][0](x) + d[1][1](x) + d[2][2](x); };
    return f;
}

inline std::array<Polynomial, 3> random_vector_polynomial(int degree, std::mt19937_64& rng) {
    return {Polynomial(degree, rng), Polynomial(degree, rng), Polynomial(degree, rng)};
}

}  // namespace curlfem
