// First homology of the spectral curve, computed from branch point monodromy.
// Based loops around every finite branch value (keyhole shaped: a staging
// corner, a spine above the branch values, a tooth down, a small circle) are
// lifted to all sheets. The lifted loops form a graph on the sheets whose
// cycles give the homology of the punctured surface; filling the punctures
// back in is a Smith quotient by the puncture boundary relations. Crossing
// counts of pushed off representatives give the intersection pairing, and a
// skew normal form turns the result into a standard symplectic basis. The
// two involutions act on all of this exactly, by permuting start sheets.

#pragma once

#include <vector>

#include "prym/continuation.hpp"
#include "prym/curves.hpp"
#include "prym/intmat.hpp"
#include "prym/types.hpp"

namespace prym {

struct KeyholeLoop {
  cplx center;
  double radius = 0;
  Path loop; // based at the anchor, encircles exactly this branch value CCW
};

struct KeyholeSystem {
  double alpha = 0;  // frame rotation used to separate the branch values
  cplx corner;       // staging point, above and to the right of everything
  std::vector<KeyholeLoop> loops; // ascending in Re(e^{i alpha} x)
  std::vector<int> product_word;  // loop order whose concatenation is the CCW circle
  Path big_circle;                // CCW through the anchor, encloses all branch values
};

KeyholeSystem keyhole_system(const SpectralCurve& curve);

// Edge m * sheets + i is the lift of keyhole loop m starting on sheet i (the
// sheet order is the anchor fiber order). Chains over these edges represent
// 1 cycles; all matrices below hold one chain or one coordinate vector per
// column.
struct SurfaceHomology {
  KeyholeSystem keyholes;
  int sheets = 0;
  std::vector<std::vector<int>> branch_mono; // permutation per keyhole loop
  std::vector<int> infinity_mono;            // big circle permutation
  IMat fund_edges;    // edge chains of the fundamental cycles of the lift graph
  IMat relations;     // puncture boundaries, in fundamental cycle coordinates
  int finite_relations = 0; // leading columns of `relations` from finite punctures
  IMat basis;         // edge chains of the symplectic homology basis
  IMat intersection;  // pairing of the basis cycles; standard symplectic form
  IMat tau1, tau2;    // column j holds the coordinates of the image of basis j

  int genus() const { return static_cast<int>(basis.cols()) / 2; }
};

SurfaceHomology surface_homology(const SpectralCurve& curve);

// Symplectic basis adapted to the first involution: with t = tau1 action,
// a then b blocks of size ghat = h1 + g1 each,
//   t(a_i) = -a_{i+h1},  t(b_i) = -b_{i+h1}   for i = 1..g1,
//   t(a_i) = -a_i,       t(b_i) = -b_i        for i = g1+1..h1,
// and the pairing stays standard. Requires n1 >= 1 (the fixed point free
// case needs a twisted basis which no caller exercises).
struct AdaptedBasis {
  int g1 = 0, h1 = 0, n1 = 0;
  IMat columns;          // adapted cycles over the surface_homology basis
  IMat a_edges, b_edges; // edge chains, ghat columns each
  IMat tau1;             // the exact block involution above
};

AdaptedBasis adapt_for_involution(const SpectralCurve& curve, const SurfaceHomology& h);

} // namespace prym
