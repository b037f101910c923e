#include <doctest.h>

#include <cmath>

#include "prym/curves.hpp"
#include "prym/errors.hpp"

using namespace prym;

namespace {

CurveSpec sl2_spec(int base_genus, const std::vector<cplx>& base_coeffs,
                   const Poly& r1) {
  CurveSpec s;
  s.group = Group::SL2;
  s.rank = 1;
  s.base_genus = base_genus;
  s.base_coeffs = base_coeffs;
  for (int k = 0; k <= r1.degree(); ++k)
    if (std::abs(r1.coeff(k)) != 0.0) s.h0_coeffs[{1, k}] = r1.coeff(k);
  return s;
}

const std::vector<cplx> kQuintic = {cplx(-1), cplx(0), cplx(0),
                                    cplx(0),  cplx(0), cplx(1)};

} // namespace

TEST_CASE("catalog classification integers for every family") {
  struct Row {
    const char* name;
    int case_id, n1, n2, g1, g2, h1, h2, genus_hat;
  };
  const Row rows[] = {
      {"sl2-g2", 2, 2, 0, 2, 3, 3, 2, 5},
      {"sl2-g3", 1, 1, 1, 3, 3, 3, 3, 6},
      {"so4-g2", 4, 0, 0, 7, 7, 6, 6, 13},
      {"sp4-generic", 2, 2, 0, 7, 8, 8, 7, 15},
      {"sp4-degenerate", 1, 1, 1, 7, 7, 7, 7, 14},
  };
  for (const Row& row : rows) {
    CAPTURE(row.name);
    SpectralCurve c = catalog_curve(row.name);
    InvolutionType t = classify_pair(c);
    CHECK(t.case_id == row.case_id);
    CHECK(t.n1 == row.n1);
    CHECK(t.n2 == row.n2);
    CHECK(t.g1 == row.g1);
    CHECK(t.g2 == row.g2);
    CHECK(t.h1 == row.h1);
    CHECK(t.h2 == row.h2);
    CHECK(c.genus_hat == row.genus_hat);
    // Shared numerology of the four admissible patterns.
    CHECK(t.h1 == t.g1 + t.n1 - 1);
    CHECK(t.h2 == t.g2 + t.n2 - 1);
    CHECK(c.genus_hat == 2 * t.g1 + t.n1 - 1);
    CHECK(c.genus_hat == 2 * t.g2 + t.n2 - 1);
  }
}

TEST_CASE("metadata only entry refuses equation work but lists its type") {
  const CatalogEntry& e = catalog_entry("kowalewski");
  CHECK(!e.has_equations);
  CHECK(e.expected_type.case_id == 3);
  CHECK(e.expected_type.h1 == 2);
  CHECK(e.expected_type.h2 == 3);
  CHECK(e.expected_genus_hat == 5);
  CHECK_THROWS_AS(catalog_curve("kowalewski"), UnsupportedFamily);
  CHECK_THROWS_AS(catalog_entry("missing"), UnsupportedFamily);
  CHECK(catalog().size() == 6);
}

TEST_CASE("branch loci per family") {
  SpectralCurve a = catalog_curve("sl2-g2");
  int yroots = 0, lzero = 0;
  for (const auto& b : a.branch.over_base) {
    if (b.kind == BranchPointX::Kind::YRoot) ++yroots;
    if (b.kind == BranchPointX::Kind::LambdaZero) ++lzero;
  }
  CHECK(yroots == 5);
  CHECK(lzero == 2);
  CHECK(a.branch.singular.empty());
  CHECK(a.branch.over_sigma1.size() == 2);
  CHECK(a.branch.count_2n1 == 4);
  CHECK(a.branch.count_2n2 == 0);

  SpectralCurve b3 = catalog_curve("sl2-g3");
  CHECK(b3.branch.over_base.size() == 8);
  REQUIRE(b3.branch.singular.size() == 1);
  CHECK(std::abs(b3.branch.singular[0].x - cplx(0.35, 0.20)) < 1e-8);
  CHECK(b3.branch.count_2n1 == 2);
  CHECK(b3.branch.count_2n2 == 2);

  SpectralCurve so = catalog_curve("so4-g2");
  CHECK(so.branch.over_base.size() == 9);
  CHECK(so.branch.singular.size() == 2);
  CHECK(so.branch.over_sigma1.empty());

  SpectralCurve sg = catalog_curve("sp4-generic");
  int coll = 0;
  for (const auto& b : sg.branch.over_base)
    if (b.kind == BranchPointX::Kind::LambdaCollision) ++coll;
  CHECK(sg.branch.over_base.size() == 11);
  CHECK(coll == 4);

  SpectralCurve sd = catalog_curve("sp4-degenerate");
  CHECK(sd.branch.over_base.size() == 10);
  REQUIRE(sd.branch.singular.size() == 1);
  CHECK(std::abs(sd.branch.singular[0].x - cplx(0.45, -0.30)) < 1e-8);
}

TEST_CASE("fiber germs satisfy the defining equation") {
  for (const char* name : {"sl2-g2", "sl2-g3", "so4-g2", "sp4-generic", "sp4-degenerate"}) {
    CAPTURE(name);
    SpectralCurve c = catalog_curve(name);
    cplx x(0.31, 0.17); // away from every branch value of the catalog curves
    auto germs = c.fiber(x);
    CHECK(static_cast<int>(germs.size()) == c.sheets);
    for (const auto& germ : germs) {
      CHECK(std::abs(c.equation(germ.lam, x, germ.y)) < 1e-9);
      CHECK(std::abs(germ.y * germ.y - c.base(x)) < 1e-12);
    }
  }
}

TEST_CASE("infinity structure of the rank one curves") {
  SpectralCurve a = catalog_curve("sl2-g2");
  REQUIRE(a.infinity.size() == 2);
  for (const auto& pt : a.infinity) {
    CHECK(pt.y_pow == -5);
    CHECK(pt.lam_pow == -2);
    CHECK(!pt.tau1_fixed);
    CHECK(!pt.tau2_fixed);
    CHECK(pt.tau1_image != pt.id); // the two infinity points swap
    CHECK(pt.tau2_image != pt.id);
  }

  SpectralCurve b = catalog_curve("sl2-g3");
  REQUIRE(b.infinity.size() == 2);
  for (const auto& pt : b.infinity) {
    CHECK(pt.y_pow == -7);
    CHECK(pt.lam_pow == -3);
    CHECK(!pt.tau1_fixed);
    CHECK(pt.tau2_fixed); // lambda and y both flip, which lands in the same chart
  }
}

TEST_CASE("infinity structure of the rank two curves") {
  SpectralCurve sg = catalog_curve("sp4-generic");
  REQUIRE(sg.infinity.size() == 4);
  int fixed1 = 0, fixed2 = 0;
  for (const auto& pt : sg.infinity) {
    fixed1 += pt.tau1_fixed ? 1 : 0;
    fixed2 += pt.tau2_fixed ? 1 : 0;
  }
  CHECK(fixed1 == 0);
  CHECK(fixed2 == 0);

  SpectralCurve sd = catalog_curve("sp4-degenerate");
  REQUIRE(sd.infinity.size() == 4);
  fixed2 = 0;
  for (const auto& pt : sd.infinity) {
    CHECK(!pt.tau1_fixed);
    if (pt.tau2_fixed) {
      ++fixed2;
      CHECK(pt.lam_pow == -1); // only the small lambda branch is odd at infinity
    }
  }
  CHECK(fixed2 == 2);
}

TEST_CASE("curves outside the first type are detected") {
  // A cubic invariant with three distinct roots gives three finite fixed
  // point pairs of the lambda flip, which fits none of the four patterns.
  std::vector<cplx> septic = {cplx(-1), cplx(0), cplx(0), cplx(0),
                              cplx(0),  cplx(0), cplx(0), cplx(1)};
  CurveSpec s = sl2_spec(3, septic, Poly({cplx(-2), cplx(0), cplx(0), cplx(1)}));
  SpectralCurve c = build_curve(s);
  CHECK_THROWS_AS(classify_pair(c), NotFirstType);
}

TEST_CASE("odd invariants remove the second involution") {
  CurveSpec s = sl2_spec(2, kQuintic, Poly({cplx(-0.4697, -0.1529), cplx(0.46, -0.97), cplx(1)}));
  s.h1_coeffs[{1, 0}] = cplx(0.3);
  SpectralCurve c = build_curve(s);
  CHECK(!c.has_second_involution);
  CHECK_THROWS_AS(classify_pair(c), NoSecondInvolution);
}

TEST_CASE("validation rejects broken specs") {
  // Repeated base root.
  CurveSpec s1 = sl2_spec(2, Poly::from_roots({cplx(1), cplx(1), cplx(2), cplx(3), cplx(4)}).coeffs(),
                          Poly({cplx(5), cplx(0), cplx(1)}));
  CHECK_THROWS_AS(build_curve(s1), SingularBase);

  // Base coefficient list of the wrong length.
  CurveSpec s2 = sl2_spec(2, {cplx(-1), cplx(0), cplx(1)}, Poly({cplx(5), cplx(0), cplx(1)}));
  CHECK_THROWS_AS(build_curve(s2), MalformedSpec);

  // Vanishing leading base coefficient.
  CurveSpec s3 = sl2_spec(2, {cplx(-1), cplx(0), cplx(0), cplx(0), cplx(1), cplx(0)},
                          Poly({cplx(5), cplx(0), cplx(1)}));
  CHECK_THROWS_AS(build_curve(s3), MalformedSpec);

  // Invariant degree above the admissible bound.
  CurveSpec s4 = sl2_spec(2, kQuintic, Poly({cplx(1), cplx(0), cplx(0), cplx(1)}));
  CHECK_THROWS_AS(build_curve(s4), MalformedSpec);

  // Invariant root colliding with a base root.
  CurveSpec s5 = sl2_spec(2, kQuintic, Poly::from_roots({cplx(1), cplx(-2)}));
  CHECK_THROWS_AS(build_curve(s5), DegenerateDiscriminant);

  // Orthogonal family whose top invariant is not a square.
  CurveSpec s6;
  s6.group = Group::SO2n;
  s6.rank = 2;
  s6.base_genus = 2;
  s6.base_coeffs = kQuintic;
  s6.h0_coeffs[{1, 0}] = cplx(-0.25, 0.20);
  s6.h0_coeffs[{1, 1}] = cplx(0.30);
  s6.h0_coeffs[{1, 2}] = cplx(1);
  s6.h0_coeffs[{2, 0}] = cplx(0.55);
  s6.h0_coeffs[{2, 1}] = cplx(-0.40);
  s6.h0_coeffs[{2, 2}] = cplx(0.70);
  CHECK_THROWS_AS(build_curve(s6), MalformedSpec);

  // Unsupported rank.
  CurveSpec s7;
  s7.group = Group::Sp2n;
  s7.rank = 3;
  s7.base_genus = 2;
  s7.base_coeffs = kQuintic;
  s7.h0_coeffs[{3, 0}] = cplx(1);
  CHECK_THROWS_AS(build_curve(s7), UnsupportedFamily);
}

TEST_CASE("frame rotation separates the rotated real parts") {
  SpectralCurve c = catalog_curve("sp4-generic");
  auto pts = c.avoid_x();
  cplx rot = std::polar(1.0, c.frame_rotation);
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      CHECK(std::abs(std::real(rot * (pts[i] - pts[j]))) > 1e-4);
}
