// Differentials of the form numer(x) y^a lambda^b dx and their expansions in
// the chart z at a point over x = infinity, where x = z^{-2} exactly. For the
// rank one families with a quadratic invariant (two simple zeros) or a cubic
// invariant with one double root there is an explicit frame of anti invariant
// holomorphic differentials, which is what the period machinery integrates.

#pragma once

#include <vector>

#include "prym/curves.hpp"
#include "prym/polynomial.hpp"
#include "prym/types.hpp"

namespace prym {

struct Differential {
  Poly numer;
  int y_pow = 0;
  int lam_pow = 0;

  cplx eval(cplx x, const BaseFiberGerm& germ) const;
};

// True when an explicit anti invariant frame is implemented for this curve.
bool has_frame(const SpectralCurve& curve);

// The anti invariant holomorphic frame (h1 entries); UnsupportedFamily when
// no explicit frame is implemented for the family.
std::vector<Differential> prym_frame(const SpectralCurve& curve);

// The invariant holomorphic frame (g1 entries), pulled back from the base.
std::vector<Differential> invariant_frame(const SpectralCurve& curve);

// Laurent data on the z chart: c(k) multiplies z^{m_lo + k} dz.
struct LaurentBlock {
  int m_lo = 0;
  CVec c;
  cplx coeff(int m) const {
    int k = m - m_lo;
    if (k < 0 || k >= c.size()) return cplx(0);
    return c(k);
  }
};

// Coefficients of w on the chart at pt for exponents m_lo..m_hi, computed by
// continuing the germ around the doubly wound x circle and reading off the
// discrete Fourier sums. The sample count is doubled until two rounds agree;
// NotConvergent if they never do.
LaurentBlock infinity_laurent(const SpectralCurve& curve, const InfinityPoint& pt,
                              const Differential& w, int m_lo, int m_hi);

// Expansion certified to contain no pole part: exponents below zero must
// vanish to tolerance, otherwise NotHolomorphicAtInfinity. Returns the block
// for exponents 0..m_hi.
LaurentBlock holomorphic_expansion(const SpectralCurve& curve, const InfinityPoint& pt,
                                   const Differential& w, int m_hi);

} // namespace prym
