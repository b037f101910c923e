// Dense univariate polynomials over complex doubles: arithmetic, evaluation,
// root finding through the companion matrix, and root clustering with a
// relative tolerance so multiple roots are recognized as such.

#pragma once

#include <initializer_list>
#include <vector>

#include "prym/types.hpp"

namespace prym {

class Poly {
public:
  Poly() = default;
  explicit Poly(std::vector<cplx> ascending_coeffs); // trims trailing zeros
  Poly(std::initializer_list<cplx> ascending_coeffs);

  static Poly from_roots(const std::vector<cplx>& roots, cplx leading = 1.0);
  static Poly monomial(int degree, cplx coeff = 1.0);

  // Degree of the zero polynomial is -1.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  cplx coeff(int k) const; // zero outside the stored range
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx leading() const;

  cplx operator()(cplx x) const; // Horner evaluation
  Poly derivative() const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(cplx s) const;

  // Eigenvalues of the companion matrix of the monic normalization.
  // Requires degree >= 1 and a well conditioned leading coefficient.
  std::vector<cplx> roots() const;

private:
  std::vector<cplx> c_; // ascending, no trailing zeros
};

struct ClusteredRoot {
  cplx value; // cluster centroid
  int multiplicity = 1;
};

// Groups nearby points into clusters using a relative tolerance on the
// total spread of the input set. Used to detect multiple roots.
std::vector<ClusteredRoot> cluster_points(const std::vector<cplx>& pts,
                                          double rel_tol = 1e-9);

// Smallest pairwise distance, infinity for fewer than two points.
double min_pairwise_distance(const std::vector<cplx>& pts);

} // namespace prym
