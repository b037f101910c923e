// Periods of the spectral curve. Differentials are integrated along sheet
// tracked paths by adaptive Gauss Legendre panels; the integrals along every
// keyhole loop edge give periods of arbitrary homology chains by summation.
// On top of that sit the normalization of the anti invariant frame, the
// Riemann matrix of the associated polarized variety and reduction modulo
// its period lattice.

#pragma once

#include <vector>

#include "prym/continuation.hpp"
#include "prym/curves.hpp"
#include "prym/differentials.hpp"
#include "prym/homology.hpp"
#include "prym/types.hpp"

namespace prym {

struct QuadratureOptions {
  int order = 12;         // Gauss Legendre nodes per panel
  double rel_tol = 1e-12; // accepted panel error, relative to the segment scale
  int max_depth = 32;     // bisections per segment before QuadratureStall
};

// Integral of w along the continuation of path started on the given sheet
// of the fiber over the path start (deterministic fiber order). Closed paths
// whose monodromy fixes the start sheet yield periods; open paths yield
// increments of the Abel map.
cplx integrate_tracked(const SpectralCurve& curve, const Differential& w,
                       const Path& path, int start_sheet,
                       const QuadratureOptions& opt = {});

// Integrals of every frame entry along every keyhole loop edge, in the edge
// layout of the homology chains: column m * sheets + i holds the integral
// along loop m started on sheet i of the anchor fiber, row d the frame entry.
// One tracker pass per loop covers all sheets at once, so a chain period is
// the chain weighted column sum of this table.
CMat edge_integrals(const SpectralCurve& curve,
                    const std::vector<Differential>& frame,
                    const KeyholeSystem& keyholes,
                    const QuadratureOptions& opt = {});

// Linear combinations of frame entries. All entries must share the y and
// lambda powers so the combinations are again single term differentials;
// row i of coeff gives the coefficients of the i-th output entry.
std::vector<Differential> combine_frame(const std::vector<Differential>& frame,
                                        const CMat& coeff);

// The normalized anti invariant frame and its period data. Row i of coeff
// expresses the i-th normalized entry in the raw frame, scaled so the a
// periods over the first h1 adapted cycles are 2 pi i times the identity.
// The weights epsilon are 1 on the moved block, 2 on the fixed block, and
// repeat for the second half of the lattice directions. Pi and lattice are
// filled by riemann_matrix (and by period_frame); the lattice columns are
// 2 pi i epsilon_j e_j followed by the columns of Pi.
struct PrymFrame {
  CMat coeff;              // h1 x h1
  IVec epsilon;            // 2 h1
  double a_condition = 0;  // condition number of the raw a period matrix
  CMat Pi;                 // h1 x h1
  CMat lattice;            // h1 x 2 h1
};

// Solves the normalization from the raw frame edge integrals. Throws
// DegenerateAPeriods when the a period matrix is numerically singular.
PrymFrame normalize_frame(const SpectralCurve& curve, const AdaptedBasis& basis,
                          const CMat& raw_edges);

// Riemann matrix of the normalized frame over the first h1 b cycles, with
// the half weight on the fixed block columns. Validates symmetry and that
// the real part is negative definite, the direction in which the series
// over the lattice converges; throws NotSymmetric or NotConvergent.
CMat riemann_matrix(const PrymFrame& frame, const AdaptedBasis& basis,
                    const CMat& raw_edges);

// Raw frame integrals, normalization, Riemann matrix and lattice in one go.
PrymFrame period_frame(const SpectralCurve& curve, const SurfaceHomology& hom,
                       const AdaptedBasis& basis,
                       const QuadratureOptions& opt = {});

// Representative of v modulo the lattice with all lattice coordinates
// rounded into [-1/2, 1/2); idempotent.
CVec lattice_reduce(const CVec& v, const PrymFrame& frame);

} // namespace prym
