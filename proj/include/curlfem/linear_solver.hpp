#pragma once

#include <vector>

#include <Eigen/Dense>

#include "curlfem/assembly.hpp"
#include "curlfem/fe_space.hpp"
#include "curlfem/types.hpp"

namespace curlfem {

/// Sparse LU factorization of a square complex matrix (UMFPACK).
///
/// Throws SingularSystemError when the factorization detects an exactly
/// singular matrix or when the estimated reciprocal 1-norm condition number
/// falls below `rcond_threshold`.
class SparseLu {
public:
    explicit SparseLu(const SparseMatrixC& a, Real rcond_threshold = 1e-14);
    ~SparseLu();
    SparseLu(const SparseLu&) = delete;
    SparseLu& operator=(const SparseLu&) = delete;
    SparseLu(SparseLu&& other) noexcept;
    SparseLu& operator=(SparseLu&& other) noexcept;

    int size() const { return n_; }

    /// Solves A x = b.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
    /// Solves Aᴴ x = b.
    Eigen::VectorXcd solve_adjoint(const Eigen::VectorXcd& b) const;

    /// Hager-Higham estimate of 1 / (‖A‖₁ ‖A⁻¹‖₁).
    Real rcond() const { return rcond_; }
    /// UMFPACK's pivot-ratio estimate min|u_ii| / max|u_ii|.
    Real pivot_rcond() const { return pivot_rcond_; }

private:
    Eigen::VectorXcd solve_system(int sys, const Eigen::VectorXcd& b) const;
    void release() noexcept;

    int n_ = 0;
    std::vector<long> ap_;
    std::vector<long> ai_;
    std::vector<Complex> ax_;
    void* numeric_ = nullptr;
    Real rcond_ = 0.0;
    Real pivot_rcond_ = 0.0;
};

struct SolveOptions {
    /// Required ‖A x - b‖ / ‖b‖.
    Real residual_tolerance = 1e-10;
    Real rcond_threshold = 1e-14;
    /// Try a sparse Cholesky factorization first when A is Hermitian up to rounding.
    bool hermitian_fast_path = true;
};

enum class SolveMethod { Lu, Cholesky };

struct SolveResult {
    Eigen::VectorXcd x;
    Real relative_residual = 0.0;
    Real rcond = 0.0;
    SolveMethod method = SolveMethod::Lu;
};

/// Direct solve with residual verification. Hermitian positive definite
/// matrices go through CHOLMOD; everything else, including Hermitian matrices
/// whose Cholesky factorization breaks down, goes through SparseLu.
/// Throws InvalidArgument for shape mismatches and SingularSystemError when
/// the matrix is numerically singular or the residual contract is missed.
SolveResult solve(const SparseMatrixC& a, const Eigen::VectorXcd& rhs, const SolveOptions& options = {});

/// Solves a square system over one space and wraps the result as a field.
DiscreteField solve(const SystemMatrix& a, const Eigen::VectorXcd& rhs, SolveResult* report = nullptr,
                    const SolveOptions& options = {});

}  // namespace curlfem
