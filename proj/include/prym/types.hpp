// Shared scalar and dense linear algebra typedefs used across the library.
// Complex double precision is the supported configuration; the few templated
// helpers (polynomials, theta sums) take any complex scalar.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace prym {

using cplx = std::complex<double>;

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Integer matrices for homology bookkeeping. Entries stay tiny in practice
// (cycle coefficients, intersection numbers), but normal form intermediates
// can grow, so use 64 bit throughout.
using ilong = long long;
using IMat = Eigen::Matrix<ilong, Eigen::Dynamic, Eigen::Dynamic>;
using IVec = Eigen::Matrix<ilong, Eigen::Dynamic, 1>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline const cplx kTwoPiI = cplx(0.0, 2.0 * kPi);

} // namespace prym
