#include "curlfem/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/CholmodSupport>

#include <umfpack.h>

namespace curlfem {

namespace {

std::string status_text(long status) {
    switch (status) {
    case UMFPACK_WARNING_singular_matrix: return "matrix is singular";
    case UMFPACK_ERROR_out_of_memory: return "out of memory";
    case UMFPACK_ERROR_invalid_matrix: return "invalid matrix";
    default: return "status " + std::to_string(status);
    }
}

[[noreturn]] void throw_singular(const std::string& detail) {
    throw SingularSystemError("numerically singular system (" + detail +
                              "); the coefficients are likely in the non-coercive regime "
                              "(e.g. mu at a cavity eigenvalue)");
}

Real one_norm(const SparseMatrixC& a) {
    Real best = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        Real col = 0.0;
        for (SparseMatrixC::InnerIterator it(a, k); it; ++it) {
            col += std::abs(it.value());
        }
        best = std::max(best, col);
    }
    return best;
}

// Hager-Higham estimate of 1 / (‖A‖₁ ‖A⁻¹‖₁) (complex variant).
template <typename Solve, typename SolveAdjoint>
Real reciprocal_condition(const SparseMatrixC& a, Solve solve, SolveAdjoint solve_adjoint) {
    const auto n = a.rows();
    Eigen::VectorXcd x = Eigen::VectorXcd::Constant(n, Complex(1.0 / static_cast<Real>(n)));
    Real inv_norm = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        const Eigen::VectorXcd y = solve(x);
        const Real est = y.lpNorm<1>();
        if (iter > 0 && est <= inv_norm) {
            break;
        }
        inv_norm = est;
        Eigen::VectorXcd sign(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Real m = std::abs(y[i]);
            sign[i] = m > 0.0 ? y[i] / m : Complex(1.0);
        }
        const Eigen::VectorXcd z = solve_adjoint(sign);
        Eigen::Index j = 0;
        const Real zmax = z.cwiseAbs().maxCoeff(&j);
        if (iter > 0 && zmax <= x.dot(z).real()) {
            break;
        }
        x.setZero();
        x[j] = 1.0;
    }
    return (inv_norm > 0.0 && std::isfinite(inv_norm)) ? 1.0 / (one_norm(a) * inv_norm) : 0.0;
}

// Hermitian up to rounding; CHOLMOD reads one triangle and the residual check
// covers the remainder.
bool is_hermitian(const SparseMatrixC& a) {
    if (a.nonZeros() == 0) {
        return false;
    }
    const SparseMatrixC d = SparseMatrixC(a.adjoint()) - a;
    const Real scale = Eigen::Map<const Eigen::VectorXcd>(a.valuePtr(), a.nonZeros()).cwiseAbs().maxCoeff();
    for (int k = 0; k < d.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(d, k); it; ++it) {
            if (std::abs(it.value()) > 1e-14 * scale) {
                return false;
            }
        }
    }
    return true;
}

bool is_real(const SparseMatrixC& a) {
    return std::all_of(a.valuePtr(), a.valuePtr() + a.nonZeros(), [](const Complex& v) { return v.imag() == 0.0; });
}

// Supernodal Cholesky (CHOLMOD) for Hermitian matrices; real matrices are
// factored in real arithmetic. Leaves x empty when A is not positive definite.
std::optional<SolveResult> cholesky_solve(const SparseMatrixC& a, const Eigen::VectorXcd& rhs) {
    SolveResult out;
    if (is_real(a)) {
        const Eigen::SparseMatrix<Real> ar = a.real();
        Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<Real>> llt;
        llt.cholmod().print = 0;
        llt.compute(ar);
        if (llt.info() != Eigen::Success) {
            return std::nullopt;
        }
        const auto apply = [&llt](const Eigen::VectorXcd& v) {
            const Eigen::VectorXd re = llt.solve(v.real());
            const Eigen::VectorXd im = llt.solve(v.imag());
            Eigen::VectorXcd x(v.size());
            x.real() = re;
            x.imag() = im;
            return x;
        };
        out.x = apply(rhs);
        out.rcond = reciprocal_condition(a, apply, apply);
    } else {
        Eigen::CholmodSupernodalLLT<SparseMatrixC> llt;
        llt.cholmod().print = 0;
        llt.compute(a);
        if (llt.info() != Eigen::Success) {
            return std::nullopt;
        }
        const auto apply = [&llt](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(llt.solve(v)); };
        out.x = apply(rhs);
        out.rcond = reciprocal_condition(a, apply, apply);
    }
    out.method = SolveMethod::Cholesky;
    return out;
}

}  // namespace

SparseLu::SparseLu(const SparseMatrixC& a, Real rcond_threshold) : n_(static_cast<int>(a.rows())) {
    if (a.rows() != a.cols()) {
        throw InvalidArgument("SparseLu needs a square matrix");
    }
    if (n_ == 0) {
        rcond_ = pivot_rcond_ = 1.0;
        return;
    }
    SparseMatrixC c = a;
    c.makeCompressed();
    ap_.assign(c.outerIndexPtr(), c.outerIndexPtr() + n_ + 1);
    ai_.assign(c.innerIndexPtr(), c.innerIndexPtr() + c.nonZeros());
    ax_.assign(c.valuePtr(), c.valuePtr() + c.nonZeros());
    const double* ax = reinterpret_cast<const double*>(ax_.data());

    // Finite element matrices are structurally symmetric; the symmetric strategy
    // with a nested-dissection ordering keeps the fill of 3D problems manageable.
    double control[UMFPACK_CONTROL];
    umfpack_zl_defaults(control);
    control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
    control[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
    double info[UMFPACK_INFO];
    void* symbolic = nullptr;
    long status = umfpack_zl_symbolic(n_, n_, ap_.data(), ai_.data(), ax, nullptr, &symbolic, control, info);
    if (status != UMFPACK_OK) {
        throw Error("sparse LU symbolic analysis failed: " + status_text(status));
    }
    status = umfpack_zl_numeric(ap_.data(), ai_.data(), ax, nullptr, symbolic, &numeric_, control, info);
    umfpack_zl_free_symbolic(&symbolic);
    if (status == UMFPACK_WARNING_singular_matrix) {
        release();
        throw_singular("zero pivot in the LU factorization");
    }
    if (status != UMFPACK_OK) {
        release();
        throw Error("sparse LU factorization failed: " + status_text(status));
    }
    pivot_rcond_ = info[UMFPACK_RCOND];

    rcond_ = reciprocal_condition(c, [this](const Eigen::VectorXcd& v) { return solve(v); },
                                  [this](const Eigen::VectorXcd& v) { return solve_adjoint(v); });
    if (!(rcond_ >= rcond_threshold)) {
        std::ostringstream msg;
        msg << "estimated reciprocal condition number " << rcond_ << " below " << rcond_threshold;
        release();
        throw_singular(msg.str());
    }
}

SparseLu::~SparseLu() { release(); }

SparseLu::SparseLu(SparseLu&& other) noexcept
    : n_(other.n_), ap_(std::move(other.ap_)), ai_(std::move(other.ai_)), ax_(std::move(other.ax_)),
      numeric_(other.numeric_), rcond_(other.rcond_), pivot_rcond_(other.pivot_rcond_) {
    other.numeric_ = nullptr;
}

SparseLu& SparseLu::operator=(SparseLu&& other) noexcept {
    if (this != &other) {
        release();
        n_ = other.n_;
        ap_ = std::move(other.ap_);
        ai_ = std::move(other.ai_);
        ax_ = std::move(other.ax_);
        numeric_ = other.numeric_;
        rcond_ = other.rcond_;
        pivot_rcond_ = other.pivot_rcond_;
        other.numeric_ = nullptr;
    }
    return *this;
}

void SparseLu::release() noexcept {
    if (numeric_ != nullptr) {
        umfpack_zl_free_numeric(&numeric_);
        numeric_ = nullptr;
    }
}

Eigen::VectorXcd SparseLu::solve(const Eigen::VectorXcd& b) const { return solve_system(UMFPACK_A, b); }

Eigen::VectorXcd SparseLu::solve_adjoint(const Eigen::VectorXcd& b) const { return solve_system(UMFPACK_At, b); }

Eigen::VectorXcd SparseLu::solve_system(int sys, const Eigen::VectorXcd& b) const {
    if (b.size() != n_) {
        throw InvalidArgument("right-hand side length does not match the factorized matrix");
    }
    Eigen::VectorXcd x(n_);
    if (n_ == 0) {
        return x;
    }
    double info[UMFPACK_INFO];
    const long status = umfpack_zl_solve(sys, ap_.data(), ai_.data(), reinterpret_cast<const double*>(ax_.data()),
                                        nullptr, reinterpret_cast<double*>(x.data()), nullptr,
                                        reinterpret_cast<const double*>(b.data()), nullptr, numeric_, nullptr, info);
    if (status == UMFPACK_WARNING_singular_matrix) {
        throw_singular("zero pivot met during the triangular solves");
    }
    if (status != UMFPACK_OK) {
        throw Error("sparse LU solve failed: " + status_text(status));
    }
    return x;
}

SolveResult solve(const SparseMatrixC& a, const Eigen::VectorXcd& rhs, const SolveOptions& options) {
    if (a.rows() != a.cols()) {
        throw InvalidArgument("solve needs a square matrix");
    }
    if (rhs.size() != a.rows()) {
        throw InvalidArgument("right-hand side length does not match the matrix");
    }
    std::optional<SolveResult> factored;
    if (options.hermitian_fast_path && a.rows() > 0 && is_hermitian(a)) {
        factored = cholesky_solve(a, rhs);
        if (factored && !(factored->rcond >= options.rcond_threshold)) {
            std::ostringstream msg;
            msg << "estimated reciprocal condition number " << factored->rcond << " below "
                << options.rcond_threshold;
            throw_singular(msg.str());
        }
    }
    if (!factored) {
        const SparseLu lu(a, options.rcond_threshold);
        factored = SolveResult{lu.solve(rhs), 0.0, lu.rcond(), SolveMethod::Lu};
    }
    SolveResult out = std::move(*factored);
    const Real rhs_norm = rhs.norm();
    const Real res = (a * out.x - rhs).norm();
    out.relative_residual = rhs_norm > 0.0 ? res / rhs_norm : res;
    if (!(out.relative_residual <= options.residual_tolerance)) {
        std::ostringstream msg;
        msg << "relative residual " << out.relative_residual << " exceeds " << options.residual_tolerance;
        throw_singular(msg.str());
    }
    return out;
}

DiscreteField solve(const SystemMatrix& a, const Eigen::VectorXcd& rhs, SolveResult* report,
                    const SolveOptions& options) {
    if (!a.col_space || a.row_space != a.col_space) {
        throw InvalidArgument("solve needs a matrix whose rows and columns share one space");
    }
    SolveResult r = solve(a.matrix, rhs, options);
    DiscreteField field(a.col_space, r.x);
    if (report != nullptr) {
        *report = std::move(r);
    }
    return field;
}

}  // namespace curlfem
