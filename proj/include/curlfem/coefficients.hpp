#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "curlfem/mesh.hpp"
#include "curlfem/types.hpp"

namespace curlfem {

/// Smooth complex function of position owning one subdomain.
using CoefficientPiece = std::function<Complex(const Vec3&)>;

/// Piecewise-smooth complex material coefficient keyed by subdomain tag.
///
/// A piece is evaluated only on cells carrying its tag; there is no averaging
/// across subdomains. A fallback piece, when set, covers every tag without an
/// explicit piece.
class CoefficientField {
public:
    static CoefficientField constant(Complex value);
    /// Octant checkerboard: `even` on octants whose tag has even bit parity.
    static CoefficientField checkerboard(Complex even, Complex odd);
    /// Lower/upper z-half of the box.
    static CoefficientField layered(Complex lower, Complex upper);

    CoefficientField& set_piece(int tag, CoefficientPiece piece);
    CoefficientField& set_fallback(CoefficientPiece piece);

    bool has_piece(int tag) const;
    /// Throws InvalidArgument for a tag without a piece.
    Complex operator()(int tag, const Vec3& x) const;

    /// Checks every mesh tag has a piece and that octant-based presets sit on
    /// meshes whose resolution is even along every axis.
    void validate(const Mesh& mesh) const;

    const std::string& label() const { return label_; }
    CoefficientField& set_label(std::string label);

private:
    std::map<int, CoefficientPiece> pieces_;
    std::optional<CoefficientPiece> fallback_;
    bool octant_aligned_ = false;
    std::string label_ = "custom";
};

/// Value of the piece owning `cell` at the image of the reference point.
Complex eval_coeff(const CoefficientField& field, const Mesh& mesh, int cell, const Vec3& ref);

/// Builds "constant" (uses `first`), "checkerboard2" or "layered".
CoefficientField make_preset(std::string_view name, Complex first, Complex second);

enum class ThetaPolicy {
    ArgumentRange,  ///< κ real positive: θ from the argument range of μ̃
    Maximization,   ///< θ maximizing the worst rotated real part
};

/// Rotated-positivity data: Re(e^{iθ}μ̃) >= mu_lower and Re(e^{iθ}κ) >= kappa_lower
/// at every sample point.
struct MaterialParams {
    Real theta = 0.0;
    Real mu_lower = 0.0;
    Real mu_upper = 0.0;
    Real kappa_lower = 0.0;
    Real kappa_upper = 0.0;
    Real mu_ratio = 0.0;
    Real kappa_ratio = 0.0;
    /// μ♯ ℓ_D² / κ♯
    Real reynolds = 0.0;
    /// max(1, reynolds)
    Real reynolds_hat = 0.0;
    ThetaPolicy policy = ThetaPolicy::ArgumentRange;
    int samples = 0;
};

/// Samples both coefficients at the vertices, centroid and quadrature points of
/// every cell and picks θ. Throws NonCoerciveError when no angle makes both
/// rotated real parts positive (e.g. μ̃ and κ collinear and opposite).
MaterialParams estimate_params(const CoefficientField& mu, const CoefficientField& kappa, const Mesh& mesh,
                               Real ell_d, int quad_degree = 4);

}  // namespace curlfem
