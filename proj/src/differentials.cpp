#include "prym/differentials.hpp"

#include <cmath>

#include "prym/continuation.hpp"
#include "prym/errors.hpp"

namespace prym {

namespace {

cplx ipow(cplx v, int p) {
  if (p == 0) return cplx(1);
  cplx base = (p > 0) ? v : 1.0 / v;
  int e = std::abs(p);
  cplx acc(1);
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

// The two frame shapes share this guard: rank one, and the top invariant
// either quadratic with simple zeros or cubic with exactly one double zero.
enum class FrameShape { None, QuadraticInvariant, CubicNodalInvariant };

FrameShape frame_shape(const SpectralCurve& curve) {
  if (curve.spec.rank != 1 || !curve.has_second_involution ||
      curve.type.case_id == 0)
    return FrameShape::None;
  int d = curve.r[0].degree();
  if (d == 2 && curve.branch.singular.empty()) return FrameShape::QuadraticInvariant;
  if (d == 3 && curve.branch.singular.size() == 1) return FrameShape::CubicNodalInvariant;
  return FrameShape::None;
}

} // namespace

cplx Differential::eval(cplx x, const BaseFiberGerm& germ) const {
  return numer(x) * ipow(germ.y, y_pow) * ipow(germ.lam, lam_pow);
}

bool has_frame(const SpectralCurve& curve) {
  return frame_shape(curve) != FrameShape::None;
}

std::vector<Differential> prym_frame(const SpectralCurve& curve) {
  FrameShape shape = frame_shape(curve);
  std::vector<Differential> out;
  int h1 = curve.type.h1;
  if (shape == FrameShape::QuadraticInvariant) {
    // x^i dx / (lambda y), i = 0..g; chart orders 2g, 2g-2, ..., 0.
    for (int i = 0; i < h1; ++i)
      out.push_back({Poly::monomial(i), -1, -1});
    return out;
  }
  if (shape == FrameShape::CubicNodalInvariant) {
    // (x - node) x^{i-1} dx / (lambda y), i = 1..g; the node factor cancels
    // the poles of 1/lambda over the double zero. Chart orders 2g-1, ..., 1.
    cplx node = curve.branch.singular[0].x;
    for (int i = 1; i <= h1; ++i)
      out.push_back({Poly::from_roots({node}) * Poly::monomial(i - 1), -1, -1});
    return out;
  }
  throw UnsupportedFamily("no explicit anti invariant frame for this family");
}

std::vector<Differential> invariant_frame(const SpectralCurve& curve) {
  if (frame_shape(curve) == FrameShape::None)
    throw UnsupportedFamily("no explicit invariant frame for this family");
  std::vector<Differential> out;
  for (int i = 0; i < curve.type.g1; ++i)
    out.push_back({Poly::monomial(i), -1, 0});
  return out;
}

LaurentBlock infinity_laurent(const SpectralCurve& curve, const InfinityPoint& pt,
                              const Differential& w, int m_lo, int m_hi) {
  if (m_hi < m_lo) throw Error("empty Laurent exponent range");
  const cplx X0 = curve.anchor_x;
  const double rho = 1.0 / std::sqrt(std::abs(X0));
  const int ncoef = m_hi - m_lo + 1;

  CVec prev;
  for (int M = 96; M <= 1536; M *= 2) {
    CVec acc = CVec::Zero(ncoef);
    SheetTracker tracker(curve, X0);
    int sheet = pt.germs[0];
    const BaseFiberGerm& half_expect =
        curve.infinity_fiber[static_cast<size_t>(pt.germs[1])];
    for (int k = 0; k < M; ++k) {
      double phi = 2.0 * kPi * k / M;
      cplx z = std::polar(rho, phi);
      const BaseFiberGerm& germ = tracker.germs()[static_cast<size_t>(sheet)];
      if (k == M / 2) {
        double d = std::abs(germ.y - half_expect.y) + std::abs(germ.lam - half_expect.lam);
        double scale = std::abs(germ.y) + std::abs(germ.lam) + 1.0;
        if (d > 1e-6 * scale)
          throw Error("infinity chart continuation disagrees with the germ pairing");
      }
      cplx x = 1.0 / (z * z);
      cplx wz = -2.0 * ipow(z, -3) * w.eval(x, germ);
      for (int m = m_lo; m <= m_hi; ++m)
        acc(m - m_lo) += wz * ipow(z, -m) / static_cast<double>(M);
      double phi_next = 2.0 * kPi * (k + 1) / M;
      tracker.follow(arc_segment(cplx(0), std::abs(X0), -2.0 * phi, -2.0 * phi_next));
    }
    // The z circuit winds the x circle twice; the germ must return exactly.
    const BaseFiberGerm& back = tracker.germs()[static_cast<size_t>(sheet)];
    const BaseFiberGerm& first = curve.infinity_fiber[static_cast<size_t>(pt.germs[0])];
    if (std::abs(back.y - first.y) + std::abs(back.lam - first.lam) >
        1e-6 * (std::abs(first.y) + std::abs(first.lam) + 1.0))
      throw Error("infinity chart continuation did not close");

    if (prev.size() == acc.size()) {
      double scale = std::max(acc.cwiseAbs().maxCoeff(), 1e-30);
      if ((acc - prev).cwiseAbs().maxCoeff() < 1e-9 * std::max(scale, 1.0)) {
        LaurentBlock b;
        b.m_lo = m_lo;
        b.c = acc;
        return b;
      }
    }
    prev = acc;
  }
  throw NotConvergent("Laurent coefficients did not stabilize under sample doubling");
}

LaurentBlock holomorphic_expansion(const SpectralCurve& curve, const InfinityPoint& pt,
                                   const Differential& w, int m_hi) {
  const int guard = 6;
  LaurentBlock full = infinity_laurent(curve, pt, w, -guard, m_hi);
  double scale = std::max(full.c.cwiseAbs().maxCoeff(), 1.0);
  for (int m = -guard; m < 0; ++m)
    if (std::abs(full.coeff(m)) > 1e-7 * scale)
      throw NotHolomorphicAtInfinity("pole part detected on the infinity chart");
  LaurentBlock out;
  out.m_lo = 0;
  out.c = full.c.tail(m_hi + 1);
  return out;
}

} // namespace prym
