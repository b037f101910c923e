// Exact integer matrix routines used by the homology layer: Smith normal
// form, integer linear solves, kernel bases, and the skew symmetric analogue
// of Smith reduction that produces a symplectic like block form. Eigen has no
// integer normal forms, hence the hand rolled implementations. Matrices stay
// small (at most a few dozen rows), so the quadratic pivot searches are fine.

#pragma once

#include <optional>
#include <vector>

#include "prym/types.hpp"

namespace prym {

struct SmithResult {
  IMat U, S, V; // U * A * V = S, with U and V unimodular and S diagonal
  int rank = 0; // number of nonzero diagonal entries
};

SmithResult smith_normal_form(const IMat& A);

// Exact solve of A x = b over the integers. Returns nullopt when no integer
// solution exists. Free coordinates are set to zero.
std::optional<IVec> solve_integer(const IMat& A, const IVec& b);

// Basis of the integer kernel of A, one column per basis vector. The basis
// spans the full kernel lattice (primitive), not a finite index sublattice.
IMat integer_kernel(const IMat& A);

struct SkewSmithResult {
  // Q * J * Q^T consists of leading 2x2 blocks [[0, d_i], [-d_i, 0]] followed
  // by zeros, with d_1 | d_2 | ... all positive.
  IMat Q;
  std::vector<ilong> divisors;
};

// Requires J antisymmetric. The number of blocks is rank(J)/2.
SkewSmithResult skew_smith(const IMat& J);

// Fraction free (Bareiss) determinant, exact for the sizes used here.
ilong integer_determinant(const IMat& A);

// Exact inverse of a unimodular matrix; throws Error if det is not +-1.
IMat unimodular_inverse(const IMat& U);

// Solve A x = b over GF(2); entries of A and b are reduced mod 2. Returns
// nullopt when the system is inconsistent. Free coordinates are set to zero.
std::optional<IVec> solve_mod2(const IMat& A, const IVec& b);

// Size reduction of a lattice basis given by the columns of B, in place.
// Plain LLL with floating point Gram data; best effort in the sense that the
// result spans the same lattice but carries no reduction certificate, which
// is all the callers need (they only want shorter vectors).
void lll_reduce(IMat& B);

} // namespace prym
