#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "period_cache.hpp"
#include "prym/errors.hpp"
#include "prym/theta.hpp"

using namespace prym;

namespace {

// Finite difference oracle: nested central differences with one step of
// Richardson extrapolation, sharing no code with the term wise derivatives
// under test. The same step is used at every nesting level, so the error
// expansion stays in even powers of h and the extrapolation is valid.
template <class F>
cplx nested_cd(const F& f, const CVec& phi, MultiIndex alpha, double h) {
  for (size_t d = 0; d < alpha.size(); ++d) {
    if (alpha[d] > 0) {
      alpha[d] -= 1;
      CVec p = phi, q = phi;
      p(static_cast<Eigen::Index>(d)) += h;
      q(static_cast<Eigen::Index>(d)) -= h;
      return (nested_cd(f, p, alpha, h) - nested_cd(f, q, alpha, h)) / (2.0 * h);
    }
  }
  return f(phi);
}

template <class F>
cplx richardson_cd(const F& f, const CVec& phi, const MultiIndex& alpha, double h) {
  return (4.0 * nested_cd(f, phi, alpha, 0.5 * h) - nested_cd(f, phi, alpha, h)) / 3.0;
}

double factorial(int n) {
  double f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

CVec random_z(std::mt19937& rng, int h) {
  std::uniform_real_distribution<double> span(-1.5, 1.5);
  CVec z(h);
  for (int j = 0; j < h; ++j) z(j) = cplx(span(rng), span(rng));
  return z;
}

} // namespace

TEST_CASE("integer shifts and parity of the series") {
  for (const char* name : {"sl2-g2", "sl2-g3"}) {
    CAPTURE(name);
    const CMat& Pi = bundle(name).frame.Pi;
    const int h = static_cast<int>(Pi.rows());
    std::mt19937 rng(20260823u);
    for (int trial = 0; trial < 20; ++trial) {
      CVec z = random_z(rng, h);
      cplx base = theta(z, Pi);
      double scale = 1.0 + std::abs(base);
      CHECK(std::abs(theta(-z, Pi) - base) < 1e-10 * scale);
      for (int k = 0; k < h; ++k) {
        CVec shifted = z;
        shifted(k) += kTwoPiI;
        CHECK(std::abs(theta(shifted, Pi) - base) < 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("quasi periodicity under lattice column shifts") {
  for (const char* name : {"sl2-g2", "sl2-g3"}) {
    CAPTURE(name);
    const CMat& Pi = bundle(name).frame.Pi;
    const int h = static_cast<int>(Pi.rows());
    std::mt19937 rng(20260824u);
    for (int trial = 0; trial < 20; ++trial) {
      CVec z = random_z(rng, h);
      cplx base = theta(z, Pi);
      for (int k = 0; k < h; ++k) {
        cplx lhs = theta(z + Pi.col(k), Pi) * std::exp(0.5 * Pi(k, k) + z(k));
        double scale = 1.0 + std::abs(base) + std::abs(lhs);
        CHECK(std::abs(lhs - base) < 1e-8 * scale);
      }
    }
  }
}

TEST_CASE("log derivatives match finite differences in the map argument") {
  const PeriodBundle& b = bundle("sl2-g2");
  const CMat& Pi = b.frame.Pi;
  const IVec& eps = b.frame.epsilon;
  const int h = static_cast<int>(Pi.rows());
  CVec z0(h);
  z0 << cplx(0.31, -0.42), cplx(-0.27, 0.18), cplx(0.05, 0.61);

  // The composition whose phi derivatives carry the chain factors.
  auto q = [&](const CVec& phi) {
    CVec z = z0;
    for (int m = 0; m < h; ++m) z(m) -= phi(m) / static_cast<double>(eps(m));
    return std::log(theta(z, Pi));
  };

  struct Probe {
    MultiIndex j;
    int dir;
  };
  for (const Probe& p : {Probe{{0, 0, 0}, 0}, Probe{{1, 0, 0}, 0},
                         Probe{{0, 1, 0}, 2}, Probe{{1, 0, 1}, 1},
                         Probe{{2, 0, 0}, 0}}) {
    CAPTURE(p.dir);
    MultiIndex full = p.j;
    full[static_cast<size_t>(p.dir)] += 1;
    int total = 0;
    double jfac = 1.0;
    for (size_t m = 0; m < full.size(); ++m) total += full[m];
    for (size_t m = 0; m < p.j.size(); ++m) jfac *= factorial(p.j[m]);
    double step = std::pow(1e-12, 1.0 / (total + 4));
    cplx ref = richardson_cd(q, CVec::Zero(h), full, step) / jfac;
    cplx got = theta_logderiv(z0, Pi, p.j, p.dir, eps);
    CHECK(std::abs(got - ref) < 1e-6 * (1.0 + std::abs(ref)));
  }
}

TEST_CASE("factorial and chain normalization in closed form") {
  // With a strongly damped diagonal form only the six nearest terms matter:
  // ln theta collapses to a sum of single exponentials, so every normalized
  // derivative has the explicit power over factorial shape.
  CMat pi1(1, 1);
  pi1 << cplx(-50.0, 0.0);
  CVec z1(1);
  z1 << cplx(0.3, 0.2);
  for (ilong eps_val : {1, 2}) {
    CAPTURE(eps_val);
    IVec eps = IVec::Constant(1, eps_val);
    for (int n = 0; n <= 3; ++n) {
      CAPTURE(n);
      MultiIndex j{n};
      cplx got = theta_logderiv(z1, pi1, j, 0, eps);
      double sign = (n % 2 == 0) ? -1.0 : 1.0; // (-1)^(n+1)
      cplx ref = std::pow(-1.0 / eps_val, n + 1) / factorial(n) *
                 (std::exp(cplx(-25.0) + z1(0)) +
                  sign * std::exp(cplx(-25.0) - z1(0)));
      CHECK(std::abs(got - ref) < 1e-9 * std::abs(ref));
    }
  }

  // Distinct weights per slot: the third phi_2 derivative picks up the cube
  // of minus one half.
  CMat pi2 = CMat::Zero(2, 2);
  pi2(0, 0) = -50.0;
  pi2(1, 1) = -60.0;
  CVec z2(2);
  z2 << cplx(0.3, 0.2), cplx(-0.1, 0.4);
  IVec eps2(2);
  eps2 << 1, 2;
  cplx got = theta_logderiv(z2, pi2, MultiIndex{0, 2}, 1, eps2);
  cplx ref = std::pow(-0.5, 3) / factorial(2) *
             (std::exp(cplx(-30.0) + z2(1)) - std::exp(cplx(-30.0) - z2(1)));
  CHECK(std::abs(got - ref) < 1e-8 * std::abs(ref));
}

TEST_CASE("the series vanishes at the odd half period") {
  for (const char* name : {"sl2-g2", "sl2-g3"}) {
    CAPTURE(name);
    const PeriodBundle& b = bundle(name);
    const CMat& Pi = b.frame.Pi;
    const int h = static_cast<int>(Pi.rows());
    REQUIRE(h % 2 == 1); // the all half characteristic is odd exactly then
    CVec ones = CVec::Constant(h, 1.0);
    CVec z0 = cplx(0.0, kPi) * ones + 0.5 * (Pi * ones);
    // Terms pair up with opposite signs, so the sum cancels exactly while
    // individual terms stay of order one.
    CHECK(std::abs(theta(z0, Pi)) < 1e-9 * std::abs(theta(CVec::Zero(h), Pi)));
    CHECK_THROWS_AS(
        theta_logderiv(z0, Pi, MultiIndex(static_cast<size_t>(h), 0), 0,
                       b.frame.epsilon),
        ThetaZero);
  }
}

TEST_CASE("doubling the radius changes nothing above the target") {
  const CMat& Pi = bundle("sl2-g2").frame.Pi;
  const int h = static_cast<int>(Pi.rows());
  std::mt19937 rng(20260825u);
  for (int trial = 0; trial < 5; ++trial) {
    CVec z = random_z(rng, h);
    int r = theta_radius(z, Pi);
    CHECK(r >= 2);
    ThetaParams base{r, 1e-12};
    ThetaParams wide{2 * r, 1e-12};
    cplx v1 = theta(z, Pi, base);
    cplx v2 = theta(z, Pi, wide);
    CHECK(std::abs(v1 - v2) < 1e-12 * (1.0 + std::abs(v1)));
    MultiIndex alpha(static_cast<size_t>(h), 0);
    alpha[0] = 1;
    alpha[1] = 1;
    cplx d1 = theta_deriv(z, Pi, alpha, base);
    cplx d2 = theta_deriv(z, Pi, alpha, wide);
    CHECK(std::abs(d1 - d2) < 1e-12 * (1.0 + std::abs(d1)));
  }
}

TEST_CASE("divergent forms are rejected") {
  CVec z = CVec::Zero(2);
  // Positive direction: no decay at all.
  CMat up = CMat::Identity(2, 2) * 0.5;
  CHECK_THROWS_AS(theta(z, up), NotConverged);
  // Decay too weak to truncate within the radius cap.
  CMat weak = CMat::Identity(2, 2) * -1e-4;
  CHECK_THROWS_AS(theta(z, weak), NotConverged);
  // A forced radius whose tail bound misses the target.
  CMat mild = CMat::Identity(2, 2) * -0.05;
  ThetaParams forced{3, 1e-12};
  CHECK_THROWS_AS(theta(z, mild, forced), NotConverged);
  // Shape mismatches are caller errors.
  CHECK_THROWS_AS(theta(CVec::Zero(3), up), Error);
}

TEST_CASE("direct derivatives match finite differences") {
  const CMat& Pi = bundle("sl2-g2").frame.Pi;
  const int h = static_cast<int>(Pi.rows());
  CVec z0(h);
  z0 << cplx(0.2, -0.3), cplx(0.4, 0.1), cplx(-0.5, 0.25);
  auto f = [&](const CVec& z) { return theta(z, Pi); };
  for (const MultiIndex& alpha :
       {MultiIndex{1, 1, 0}, MultiIndex{0, 0, 2}, MultiIndex{0, 1, 0}}) {
    int total = 0;
    for (size_t m = 0; m < alpha.size(); ++m) total += alpha[m];
    CAPTURE(total);
    double step = std::pow(1e-12, 1.0 / (total + 4));
    cplx ref = richardson_cd(f, z0, alpha, step);
    cplx got = theta_deriv(z0, Pi, alpha);
    CHECK(std::abs(got - ref) < 1e-6 * (1.0 + std::abs(ref)));
  }
}
