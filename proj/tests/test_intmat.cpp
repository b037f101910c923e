#include <doctest.h>

#include <random>

#include "prym/errors.hpp"
#include "prym/intmat.hpp"

using namespace prym;

namespace {

IMat random_matrix(std::mt19937& rng, int rows, int cols, int bound) {
  std::uniform_int_distribution<int> d(-bound, bound);
  IMat a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = d(rng);
  return a;
}

IMat random_antisymmetric(std::mt19937& rng, int n, int bound) {
  std::uniform_int_distribution<int> d(-bound, bound);
  IMat a = IMat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = d(rng);
      a(j, i) = -a(i, j);
    }
  return a;
}

} // namespace

TEST_CASE("smith normal form: transforms are unimodular and diagonalize") {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 20; ++trial) {
    int rows = 2 + trial % 3, cols = 2 + (trial * 3) % 4;
    IMat a = random_matrix(rng, rows, cols, 5);
    auto sm = smith_normal_form(a);
    IMat check = sm.U * a * sm.V;
    CHECK((check - sm.S).cwiseAbs().maxCoeff() == 0);
    // The homology pipeline feeds small matrices whose transforms stay small;
    // keep the test in that regime so exact determinants are in range.
    CHECK(sm.U.cwiseAbs().maxCoeff() < (1LL << 40));
    CHECK(sm.V.cwiseAbs().maxCoeff() < (1LL << 40));
    CHECK(std::abs(integer_determinant(sm.U)) == 1);
    CHECK(std::abs(integer_determinant(sm.V)) == 1);
    for (int i = 0; i < sm.S.rows(); ++i)
      for (int j = 0; j < sm.S.cols(); ++j)
        if (i != j) CHECK(sm.S(i, j) == 0);
    for (int i = 0; i + 1 < sm.rank; ++i) {
      CHECK(sm.S(i, i) > 0);
      CHECK(sm.S(i + 1, i + 1) % sm.S(i, i) == 0);
    }
  }
}

TEST_CASE("smith normal form of a known matrix") {
  IMat a(2, 2);
  a << 2, 4, 6, 8;
  auto sm = smith_normal_form(a);
  CHECK(sm.rank == 2);
  CHECK(sm.S(0, 0) == 2);
  CHECK(sm.S(1, 1) == 4); // invariant factors of [[2,4],[6,8]]
}

TEST_CASE("integer linear solve distinguishes solvable from unsolvable") {
  IMat a(2, 2);
  a << 2, 0, 0, 2;
  IVec b(2);
  b << 2, 4;
  auto x = solve_integer(a, b);
  REQUIRE(x.has_value());
  CHECK(((a * *x) - b).cwiseAbs().maxCoeff() == 0);
  b << 1, 2;
  CHECK(!solve_integer(a, b).has_value());

  // Underdetermined solvable system.
  IMat c(1, 3);
  c << 3, 6, 9;
  IVec d(1);
  d << 12;
  auto y = solve_integer(c, d);
  REQUIRE(y.has_value());
  CHECK(((c * *y) - d).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("integer kernel annihilates and has the right rank") {
  std::mt19937 rng(777);
  for (int trial = 0; trial < 15; ++trial) {
    int rows = 2 + trial % 4, cols = 3 + trial % 4;
    IMat a = random_matrix(rng, rows, cols, 6);
    IMat k = integer_kernel(a);
    if (k.cols() > 0) CHECK((a * k).cwiseAbs().maxCoeff() == 0);
    auto sm = smith_normal_form(a);
    CHECK(k.cols() == cols - sm.rank);
  }
  IMat a(1, 2);
  a << 2, -4;
  IMat k = integer_kernel(a);
  REQUIRE(k.cols() == 1);
  // The kernel generator must be primitive, not a multiple.
  CHECK(std::abs(k(0, 0)) == 2);
  CHECK(std::abs(k(1, 0)) == 1);
}

TEST_CASE("skew normal form reproduces the pairing and orders the divisors") {
  std::mt19937 rng(424242);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + trial % 6;
    IMat j = random_antisymmetric(rng, n, 7);
    auto sk = skew_smith(j);
    CHECK(std::abs(integer_determinant(sk.Q)) == 1);
    IMat b = sk.Q * j * sk.Q.transpose();
    int pairs = static_cast<int>(sk.divisors.size());
    IMat expect = IMat::Zero(n, n);
    for (int p = 0; p < pairs; ++p) {
      CHECK(sk.divisors[static_cast<size_t>(p)] > 0);
      if (p > 0)
        CHECK(sk.divisors[static_cast<size_t>(p)] %
                  sk.divisors[static_cast<size_t>(p - 1)] ==
              0);
      expect(2 * p, 2 * p + 1) = sk.divisors[static_cast<size_t>(p)];
      expect(2 * p + 1, 2 * p) = -sk.divisors[static_cast<size_t>(p)];
    }
    CHECK((b - expect).cwiseAbs().maxCoeff() == 0);
  }
}

TEST_CASE("skew normal form of standard and doubled symplectic pairings") {
  IMat j0 = IMat::Zero(4, 4);
  j0(0, 2) = 1; j0(2, 0) = -1;
  j0(1, 3) = 1; j0(3, 1) = -1;
  auto sk = skew_smith(j0);
  REQUIRE(sk.divisors.size() == 2);
  CHECK(sk.divisors[0] == 1);
  CHECK(sk.divisors[1] == 1);

  IMat j2 = 2 * j0;
  auto sk2 = skew_smith(j2);
  REQUIRE(sk2.divisors.size() == 2);
  CHECK(sk2.divisors[0] == 2);
  CHECK(sk2.divisors[1] == 2);
}

TEST_CASE("bareiss determinant on fixed matrices") {
  IMat a(3, 3);
  a << 2, 0, 1, 1, 3, -1, 0, 4, 2;
  // det = 2*(6+4) - 0 + 1*(4-0) = 24
  CHECK(integer_determinant(a) == 24);
  IMat b(2, 2);
  b << 0, 1, 1, 0;
  CHECK(integer_determinant(b) == -1);
}

TEST_CASE("unimodular inverse round trips and rejects non units") {
  IMat u(3, 3);
  u << 1, 2, 0, 0, 1, 3, 0, 0, 1;
  IMat inv = unimodular_inverse(u);
  CHECK((u * inv).isIdentity());
  CHECK((inv * u).isIdentity());

  IMat w(3, 3);
  w << 2, 1, 1, 1, 1, 1, 1, 1, 2;
  REQUIRE(std::abs(integer_determinant(w)) == 1);
  IMat winv = unimodular_inverse(w);
  CHECK((w * winv).isIdentity());

  IMat bad(2, 2);
  bad << 2, 0, 0, 1;
  CHECK_THROWS_AS(unimodular_inverse(bad), Error);
}

TEST_CASE("mod 2 linear solves") {
  IMat a(3, 4);
  a << 1, 0, 1, 1,
       0, 1, 1, 0,
       1, 1, 0, 1;
  IVec want(4);
  want << 1, 1, 0, 1;
  IVec b(3);
  for (int i = 0; i < 3; ++i) {
    ilong acc = 0;
    for (int j = 0; j < 4; ++j) acc += a(i, j) * want(j);
    b(i) = acc % 2;
  }
  auto x = solve_mod2(a, b);
  REQUIRE(x.has_value());
  for (int i = 0; i < 3; ++i) {
    ilong acc = 0;
    for (int j = 0; j < 4; ++j) acc += a(i, j) * (*x)(j);
    CHECK(((acc - b(i)) % 2) == 0);
  }

  // x + y = 0 and x + y = 1 cannot both hold.
  IMat c(2, 2);
  c << 1, 1, 1, 1;
  IVec d(2);
  d << 0, 1;
  CHECK(!solve_mod2(c, d).has_value());

  // Entries are reduced mod 2, including negative ones.
  IMat e(1, 2);
  e << -3, 2;
  IVec f(1);
  f << 5;
  auto g = solve_mod2(e, f);
  REQUIRE(g.has_value());
  CHECK((*g)(0) == 1);
}
