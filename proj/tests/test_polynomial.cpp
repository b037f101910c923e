#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "prym/errors.hpp"
#include "prym/polynomial.hpp"

using namespace prym;

namespace {

// Multiset comparison of two point sets up to a tolerance.
bool same_points(std::vector<cplx> a, std::vector<cplx> b, double tol) {
  if (a.size() != b.size()) return false;
  for (cplx p : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx u, cplx v) {
      return std::abs(u - p) < std::abs(v - p);
    });
    if (it == b.end() || std::abs(*it - p) > tol) return false;
    b.erase(it);
  }
  return true;
}

} // namespace

TEST_CASE("polynomial evaluation matches a direct power sum") {
  Poly f({cplx(1, -2), cplx(0, 3), cplx(-4), cplx(2, 2)});
  cplx x(0.7, -1.3);
  cplx direct = cplx(1, -2) + cplx(0, 3) * x + cplx(-4) * x * x + cplx(2, 2) * x * x * x;
  CHECK(std::abs(f(x) - direct) < 1e-13);
  CHECK(f.degree() == 3);
  CHECK(std::abs(f.coeff(7)) == 0.0);
}

TEST_CASE("product and sum evaluate pointwise") {
  Poly f({cplx(2), cplx(-1), cplx(3, 1)});
  Poly g({cplx(0, 1), cplx(4)});
  for (cplx x : {cplx(0.3, 0.4), cplx(-1.2, 0.1), cplx(2)}) {
    CHECK(std::abs((f * g)(x) - f(x) * g(x)) < 1e-12);
    CHECK(std::abs((f + g)(x) - (f(x) + g(x))) < 1e-12);
    CHECK(std::abs((f * cplx(0, 2))(x) - cplx(0, 2) * f(x)) < 1e-12);
  }
}

TEST_CASE("derivative of a cubic") {
  Poly f({cplx(5), cplx(-2), cplx(0, 1), cplx(3)});
  Poly d = f.derivative();
  CHECK(d.degree() == 2);
  CHECK(std::abs(d.coeff(0) - cplx(-2)) < 1e-15);
  CHECK(std::abs(d.coeff(1) - cplx(0, 2)) < 1e-15);
  CHECK(std::abs(d.coeff(2) - cplx(9)) < 1e-15);
}

TEST_CASE("roots of x^5 - 1 are the fifth roots of unity") {
  Poly f({cplx(-1), cplx(0), cplx(0), cplx(0), cplx(0), cplx(1)});
  std::vector<cplx> expected;
  for (int k = 0; k < 5; ++k)
    expected.push_back(std::polar(1.0, 2.0 * kPi * k / 5.0));
  CHECK(same_points(f.roots(), expected, 1e-10));
}

TEST_CASE("from_roots then roots is the identity on distinct points") {
  std::vector<cplx> pts = {cplx(1), cplx(0, 2), cplx(-0.5, -0.25)};
  Poly f = Poly::from_roots(pts, cplx(2, 1));
  CHECK(std::abs(f.leading() - cplx(2, 1)) < 1e-14);
  CHECK(same_points(f.roots(), pts, 1e-10));
}

TEST_CASE("roots of a constant are refused") {
  CHECK_THROWS_AS(Poly({cplx(3)}).roots(), MalformedSpec);
}

TEST_CASE("zero polynomial conventions") {
  Poly z({cplx(0)});
  CHECK(z.is_zero());
  CHECK(z.degree() == -1);
  Poly m = Poly::monomial(4, cplx(2));
  CHECK(m.degree() == 4);
  CHECK(std::abs(m(cplx(2)) - cplx(32)) < 1e-12);
}

TEST_CASE("clustering groups nearby points and reports multiplicities") {
  std::vector<cplx> pts = {cplx(1), cplx(1, 1e-12), cplx(5), cplx(5, -2e-12), cplx(9)};
  auto groups = cluster_points(pts, 1e-9);
  REQUIRE(groups.size() == 3);
  int twos = 0, ones = 0;
  for (const auto& g : groups) {
    if (g.multiplicity == 2) ++twos;
    if (g.multiplicity == 1) ++ones;
  }
  CHECK(twos == 2);
  CHECK(ones == 1);
  CHECK(min_pairwise_distance(pts) < 1e-11);
}
