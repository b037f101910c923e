// Theta series of the period lattice: value, exact term wise derivatives of
// arbitrary multi order, and logarithmic derivatives carrying the chain rule
// factors of the map argument. The sum runs over integer vectors in a sup
// norm ball whose radius is chosen from the decay of the quadratic form;
// shells are accumulated in a fixed order so results are reproducible.

#pragma once

#include <vector>

#include "prym/types.hpp"

namespace prym {

// Partial derivative orders per coordinate.
using MultiIndex = std::vector<int>;

struct ThetaParams {
  int radius = 0;           // sup norm truncation; 0 picks it automatically
  double target_tol = 1e-12; // bound the truncation tail must stay below
};

// theta(z) = sum over |m|_inf <= R of exp(m' Pi m / 2 + m' z). Requires the
// real part of Pi negative definite; NotConverged when it is not or when the
// tail bound cannot be pushed below target_tol.
cplx theta(const CVec& z, const CMat& Pi, const ThetaParams& params = {});

// d^alpha theta, term wise: every term picks up the monomial m^alpha.
cplx theta_deriv(const CVec& z, const CMat& Pi, const MultiIndex& alpha,
                 const ThetaParams& params = {});

// The truncation radius the automatic choice settles on for this argument.
int theta_radius(const CVec& z, const CMat& Pi, double target_tol = 1e-12);

// Normalized logarithmic derivative of the composition with the map
// argument: the weight slots enter through minus the inverse weight per
// derivative, the multi order j through the reciprocal factorials, and one
// extra derivative falls in the given direction. Concretely
//   (prod_m (-1/eps_m)^{j_m} / j_m!) * (-1/eps_i) * d^{j + e_i} ln theta (z).
// Throws ThetaZero when z is too close to the zero divisor for the division
// to mean anything.
cplx theta_logderiv(const CVec& z, const CMat& Pi, const MultiIndex& j,
                    int direction, const IVec& epsilon,
                    const ThetaParams& params = {});

} // namespace prym
