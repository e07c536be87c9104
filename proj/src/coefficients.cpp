#include "curlfem/coefficients.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "curlfem/quadrature.hpp"

namespace curlfem {

namespace {

CoefficientPiece constant_piece(Complex value) {
    return [value](const Vec3&) { return value; };
}

// Relative margin below which a rotated real part counts as non-positive.
constexpr Real kPositivityMargin = 1e-12;

struct Arc {
    Real start = 0.0;
    Real length = 0.0;
};

// Shortest arc of the circle containing every angle (complement of the
// largest gap between consecutive sorted angles).
Arc covering_arc(std::vector<Real> angles) {
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
    if (angles.size() == 1) {
        return {angles.front(), 0.0};
    }
    Real best_gap = angles.front() + 2.0 * kPi - angles.back();
    std::size_t after_gap = 0;
    for (std::size_t i = 1; i < angles.size(); ++i) {
        const Real gap = angles[i] - angles[i - 1];
        if (gap > best_gap) {
            best_gap = gap;
            after_gap = i;
        }
    }
    return {angles[after_gap], 2.0 * kPi - best_gap};
}

}  // namespace

CoefficientField CoefficientField::constant(Complex value) {
    CoefficientField field;
    field.set_fallback(constant_piece(value));
    field.label_ = "constant";
    return field;
}

CoefficientField CoefficientField::checkerboard(Complex even, Complex odd) {
    CoefficientField field;
    for (int tag = 0; tag < 8; ++tag) {
        field.set_piece(tag, constant_piece(std::popcount(static_cast<unsigned>(tag)) % 2 == 0 ? even : odd));
    }
    field.octant_aligned_ = true;
    field.label_ = "checkerboard2";
    return field;
}

CoefficientField CoefficientField::layered(Complex lower, Complex upper) {
    CoefficientField field;
    for (int tag = 0; tag < 8; ++tag) {
        field.set_piece(tag, constant_piece((tag & 4) != 0 ? upper : lower));
    }
    field.octant_aligned_ = true;
    field.label_ = "layered";
    return field;
}

CoefficientField& CoefficientField::set_piece(int tag, CoefficientPiece piece) {
    if (!piece) {
        throw InvalidArgument("coefficient piece must be callable");
    }
    pieces_[tag] = std::move(piece);
    return *this;
}

CoefficientField& CoefficientField::set_fallback(CoefficientPiece piece) {
    if (!piece) {
        throw InvalidArgument("coefficient piece must be callable");
    }
    fallback_ = std::move(piece);
    return *this;
}

CoefficientField& CoefficientField::set_label(std::string label) {
    label_ = std::move(label);
    return *this;
}

bool CoefficientField::has_piece(int tag) const { return pieces_.count(tag) != 0 || fallback_.has_value(); }

Complex CoefficientField::operator()(int tag, const Vec3& x) const {
    if (const auto it = pieces_.find(tag); it != pieces_.end()) {
        return it->second(x);
    }
    if (fallback_) {
        return (*fallback_)(x);
    }
    throw InvalidArgument("coefficient has no piece for subdomain tag " + std::to_string(tag));
}

void CoefficientField::validate(const Mesh& mesh) const {
    for (int tag : mesh.tags()) {
        if (!has_piece(tag)) {
            throw InvalidArgument("coefficient '" + label_ + "' has no piece for subdomain tag " +
                                  std::to_string(tag));
        }
    }
    if (octant_aligned_) {
        for (int n : mesh.spec().resolution) {
            if (n % 2 != 0) {
                throw InvalidArgument("coefficient '" + label_ +
                                      "' needs an even resolution so octant interfaces follow mesh faces");
            }
        }
    }
}

Complex eval_coeff(const CoefficientField& field, const Mesh& mesh, int cell, const Vec3& ref) {
    return field(mesh.cell_tag(cell), mesh.transform(cell).map(ref));
}

CoefficientField make_preset(std::string_view name, Complex first, Complex second) {
    if (name == "constant") {
        return CoefficientField::constant(first);
    }
    if (name == "checkerboard2") {
        return CoefficientField::checkerboard(first, second);
    }
    if (name == "layered") {
        return CoefficientField::layered(first, second);
    }
    throw InvalidArgument("unknown coefficient preset '" + std::string(name) +
                          "' (expected constant, checkerboard2 or layered)");
}

MaterialParams estimate_params(const CoefficientField& mu, const CoefficientField& kappa, const Mesh& mesh,
                               Real ell_d, int quad_degree) {
    if (!(ell_d > 0.0)) {
        throw InvalidArgument("estimate_params needs a positive length scale");
    }
    mu.validate(mesh);
    kappa.validate(mesh);

    std::vector<Vec3> ref_points(reference_vertices().begin(), reference_vertices().end());
    ref_points.emplace_back(0.25, 0.25, 0.25);
    const TetQuadrature rule = tet_rule(quad_degree);
    ref_points.insert(ref_points.end(), rule.points.begin(), rule.points.end());

    std::vector<Complex> mu_samples;
    std::vector<Complex> kappa_samples;
    mu_samples.reserve(ref_points.size() * static_cast<std::size_t>(mesh.num_cells()));
    kappa_samples.reserve(mu_samples.capacity());
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const int tag = mesh.cell_tag(cell);
        const CellTransform& t = mesh.transform(cell);
        for (const Vec3& r : ref_points) {
            const Vec3 x = t.map(r);
            mu_samples.push_back(mu(tag, x));
            kappa_samples.push_back(kappa(tag, x));
        }
    }

    MaterialParams params;
    params.samples = static_cast<int>(mu_samples.size());
    for (std::size_t s = 0; s < mu_samples.size(); ++s) {
        params.mu_upper = std::max(params.mu_upper, std::abs(mu_samples[s]));
        params.kappa_upper = std::max(params.kappa_upper, std::abs(kappa_samples[s]));
    }
    if (params.mu_upper == 0.0 || params.kappa_upper == 0.0) {
        throw NonCoerciveError("a material coefficient vanishes identically; the form is not coercive");
    }

    auto is_positive_real = [](Complex z) { return z.real() > 0.0 && std::abs(z.imag()) <= 1e-14 * z.real(); };
    const bool kappa_real = std::all_of(kappa_samples.begin(), kappa_samples.end(), is_positive_real);

    // Argument-range rule for real positive κ: θ = -(θmin + θmax)/2 · π/(2π - δ).
    bool have_theta = false;
    if (kappa_real) {
        Real arg_min = std::numeric_limits<Real>::infinity();
        Real arg_max = -arg_min;
        bool open_range = true;
        for (Complex z : mu_samples) {
            const Real a = std::arg(z);
            if (z == Complex{0.0} || std::abs(a) >= kPi) {
                open_range = false;
                break;
            }
            arg_min = std::min(arg_min, a);
            arg_max = std::max(arg_max, a);
        }
        const Real spread = arg_max - arg_min;
        if (open_range && spread < kPi) {
            params.theta = -0.5 * (arg_min + arg_max) * kPi / (2.0 * kPi - spread);
            params.policy = ThetaPolicy::ArgumentRange;
            have_theta = true;
        }
    }

    // Otherwise maximize min_s cos(θ + arg z_s) over all samples of both
    // coefficients: the optimum centres the shortest arc covering the arguments.
    if (!have_theta) {
        std::vector<Real> angles;
        angles.reserve(mu_samples.size() + kappa_samples.size());
        for (const auto* samples : {&mu_samples, &kappa_samples}) {
            for (Complex z : *samples) {
                if (z == Complex{0.0}) {
                    throw NonCoerciveError("a material coefficient vanishes at a sample point; no rotation angle "
                                           "gives uniform positivity");
                }
                angles.push_back(std::arg(z));
            }
        }
        const Arc arc = covering_arc(std::move(angles));
        params.theta = std::remainder(-(arc.start + 0.5 * arc.length), 2.0 * kPi);
        params.policy = ThetaPolicy::Maximization;
    }

    const Complex rotation = std::polar(1.0, params.theta);
    params.mu_lower = std::numeric_limits<Real>::infinity();
    params.kappa_lower = std::numeric_limits<Real>::infinity();
    for (std::size_t s = 0; s < mu_samples.size(); ++s) {
        params.mu_lower = std::min(params.mu_lower, (rotation * mu_samples[s]).real());
        params.kappa_lower = std::min(params.kappa_lower, (rotation * kappa_samples[s]).real());
    }
    if (params.mu_lower <= kPositivityMargin * params.mu_upper ||
        params.kappa_lower <= kPositivityMargin * params.kappa_upper) {
        std::ostringstream msg;
        msg << "non-coercive regime: no rotation angle makes Re(e^{i theta} mu) and Re(e^{i theta} kappa) "
               "uniformly positive (best theta = "
            << params.theta << ", bounds " << params.mu_lower << ", " << params.kappa_lower
            << "); mu and kappa are collinear and opposite somewhere, which is an eigenvalue problem";
        throw NonCoerciveError(msg.str());
    }

    params.mu_ratio = params.mu_upper / params.mu_lower;
    params.kappa_ratio = params.kappa_upper / params.kappa_lower;
    params.reynolds = params.mu_upper * ell_d * ell_d / params.kappa_upper;
    params.reynolds_hat = std::max(1.0, params.reynolds);
    return params;
}

}  // namespace curlfem
