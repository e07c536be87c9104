#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace curlfem {

using Real = double;
using Complex = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad mesh spec, wrong family, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// No rotation angle makes both material coefficients uniformly positive.
class NonCoerciveError : public Error {
public:
    using Error::Error;
};

/// The factorization hit a (numerically) singular matrix.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// An iterative procedure ran out of iterations.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

inline constexpr Real kPi = 3.14159265358979323846;

}  // namespace curlfem
