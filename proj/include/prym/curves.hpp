// Spectral curves of the form R(lambda, x, y) = 0 over a hyperelliptic base
// y^2 = P_{2g+1}(x), where R = lambda^{2n} + sum_j (r_j0(x) + y r_j1(x))
// lambda^{2(n-j)}. When the odd parts r_j1 vanish the curve carries the pair
// of commuting involutions
//   tau1: (x, y, lambda) -> (x, y, -lambda)
//   tau2: (x, y, lambda) -> (x, -y, -lambda)
// and this module computes the branch loci of the x projection, the structure
// of the fiber over x = infinity, the fixed point counts of both involutions,
// and the induced classification (quotient genera g1, g2 and the dimensions
// h1, h2 of the anti invariant differential spaces).

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prym/polynomial.hpp"
#include "prym/types.hpp"

namespace prym {

enum class Group { SL2, Sp2n, SO2n };

std::string group_name(Group g);

struct CurveSpec {
  Group group = Group::SL2;
  int rank = 1;       // n; lambda degree is 2n
  int base_genus = 2; // g; base polynomial degree 2g+1
  std::vector<cplx> base_coeffs; // ascending, size 2g+2, leading entry nonzero
  // Even invariants: (j, k) -> coefficient of x^k in r_j, 1 <= j <= n.
  std::map<std::pair<int, int>, cplx> h0_coeffs;
  // Odd invariants: (j, s) -> coefficient of x^s in r_j1. Any nonzero entry
  // removes the second involution.
  std::map<std::pair<int, int>, cplx> h1_coeffs;
  std::string label;
};

struct BranchPointX {
  enum class Kind {
    YRoot,           // root of the base polynomial, y sheets swap
    LambdaZero,      // simple zero of r_n, the two small lambda sheets swap
    LambdaCollision, // zero of the lambda discriminant, two lambda branches meet
  };
  cplx x;
  Kind kind;
  int expected_transpositions; // sheet pairs exchanged by the local monodromy
};

struct SingularPointX {
  cplx x; // node of the plane model (double root of r_n); paths must avoid it
};

struct BranchData {
  std::vector<BranchPointX> over_base; // finite branch values of Sigma -> P^1_x
  std::vector<cplx> over_sigma1;       // x values of smooth finite lambda = 0 points
  std::vector<SingularPointX> singular;
  int count_2n1 = 0; // fixed points of tau1, finite plus infinite
  int count_2n2 = 0; // fixed points of tau2
};

struct InvolutionType {
  int case_id = 0; // 1: n1=n2=1, 2: n1=2, 3: n2=2, 4: n1=n2=0
  int n1 = 0, n2 = 0;
  int g1 = 0, g2 = 0;
  int h1 = 0, h2 = 0;
};

struct BaseFiberGerm {
  cplx y, lam;
  int lambda_branch; // 0 for the large lambda branch, 1 for the small one (rank 2)
};

struct InfinityPoint {
  int id = 0;
  std::array<int, 2> germs{}; // indices into infinity_fiber of the two z preimages
  int y_pow = 0, lam_pow = 0; // z orders (x = z^{-2} exactly)
  cplx y_lead, lam_lead;      // leading z coefficients at the anchor germ
  bool tau1_fixed = false, tau2_fixed = false;
  int tau1_image = -1, tau2_image = -1; // ids of the image points
};

struct SpectralCurve {
  CurveSpec spec;
  Poly base;           // P_{2g+1}
  std::vector<Poly> r; // r_1 .. r_n (even parts)
  std::vector<Poly> r_odd; // r_11 .. r_n1 (odd parts, all zero when symmetric)
  bool has_second_involution = false;
  int sheets = 0;    // 4n over the x line
  int genus_hat = -1;
  InvolutionType type;    // valid only when has_second_involution
  BranchData branch;
  // Fiber over a fixed large anchor x used to pin down the infinity points.
  cplx anchor_x;
  std::vector<BaseFiberGerm> infinity_fiber;
  std::vector<InfinityPoint> infinity;
  // Rotation angle applied to the x plane when building paths; chosen so the
  // rotated real parts of all special x values are pairwise distinct.
  double frame_rotation = 0.0;

  // All x values paths must keep clear of (branch values and nodes).
  std::vector<cplx> avoid_x() const;
  // R(lambda, x, y) and its lambda derivative.
  cplx equation(cplx lam, cplx x, cplx y) const;
  cplx equation_dlambda(cplx lam, cplx x, cplx y) const;
  // The 4n sheet germs over a regular x, deterministically ordered.
  std::vector<BaseFiberGerm> fiber(cplx x) const;
};

// Validates the spec and performs the full branch and infinity analysis.
// Throws MalformedSpec, SingularBase, DegenerateDiscriminant or
// UnsupportedFamily. A nonzero odd part is accepted here; classification
// of such a curve then fails with NoSecondInvolution.
SpectralCurve build_curve(const CurveSpec& spec);

// Finite branch values of the x projection (computed during build_curve).
const std::vector<BranchPointX>& branch_points(const SpectralCurve& curve);

// The involution pair classification. Throws NoSecondInvolution when the odd
// invariants are present and NotFirstType when the fixed point counts do not
// match any of the four admissible patterns.
InvolutionType classify_pair(const SpectralCurve& curve);

// Built in curve collection. The Kowalewski entry carries classification
// metadata only (no defining equations are available for it), so has_equations
// is false there and equation dependent operations refuse it.
struct CatalogEntry {
  std::string name;
  std::string summary;
  bool has_equations = true;
  CurveSpec spec; // empty when has_equations is false
  InvolutionType expected_type;
  int expected_genus_hat = 0;
  int expected_finite_branch = 0; // finite branch values over the x line
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& name);
// Builds the named catalog curve and cross checks the computed classification
// against the stored metadata. Throws UnsupportedFamily for the metadata only
// entry.
SpectralCurve catalog_curve(const std::string& name);

} // namespace prym
