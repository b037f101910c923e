#include "prym/periods.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "prym/errors.hpp"

namespace prym {

namespace {

struct GaussRule {
  RVec t, w; // nodes and weights on [0, 1]
};

// Legendre nodes by Newton iteration on the recurrence; textbook accurate to
// machine precision for the orders used here.
GaussRule gauss_rule(int n) {
  if (n < 2) throw Error("quadrature order must be at least two");
  GaussRule r;
  r.t.resize(n);
  r.w.resize(n);
  auto legendre = [n](double x) {
    double p = 1.0, pm = 0.0;
    for (int j = 1; j <= n; ++j) {
      double next = ((2.0 * j - 1.0) * x * p - (j - 1.0) * pm) / j;
      pm = p;
      p = next;
    }
    double dp = n * (x * p - pm) / (x * x - 1.0);
    return std::pair<double, double>(p, dp);
  };
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(kPi * (k + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 60; ++iter) {
      auto [p, d] = legendre(x);
      dp = d;
      double step = p / d;
      x -= step;
      if (std::abs(step) < 1e-15) {
        dp = legendre(x).second;
        break;
      }
    }
    double weight = 2.0 / ((1.0 - x * x) * dp * dp);
    r.t(k) = 0.5 * (1.0 - x);
    r.w(k) = 0.5 * weight;
    r.t(n - 1 - k) = 0.5 * (1.0 + x);
    r.w(n - 1 - k) = 0.5 * weight;
  }
  return r;
}

PathSegment sub_segment(const PathSegment& s, double t0, double t1) {
  if (s.kind == PathSegment::Kind::Line) return line_segment(s.eval(t0), s.eval(t1));
  return arc_segment(s.center, s.radius, s.ang0 + t0 * (s.ang1 - s.ang0),
                     s.ang0 + t1 * (s.ang1 - s.ang0));
}

cplx seg_deriv(const PathSegment& s, double t) {
  if (s.kind == PathSegment::Kind::Line) return s.b - s.a;
  return cplx(0.0, 1.0) * (s.ang1 - s.ang0) * (s.eval(t) - s.center);
}

struct SweepContext {
  const SpectralCurve* curve;
  const std::vector<Differential>* frame;
  GaussRule rule;
  QuadratureOptions opt;
};

// One Gauss panel over [t0, t1] of seg: advances the tracker through the
// nodes in order and accumulates every frame entry on every sheet.
CMat panel_sum(const SweepContext& cx, SheetTracker& trk, const PathSegment& seg,
               double t0, double t1) {
  const int rows = static_cast<int>(cx.frame->size());
  const int cols = cx.curve->sheets;
  CMat acc = CMat::Zero(rows, cols);
  double tc = t0;
  for (int k = 0; k < cx.rule.t.size(); ++k) {
    double t = t0 + cx.rule.t(k) * (t1 - t0);
    trk.follow(sub_segment(seg, tc, t));
    tc = t;
    cplx dz = seg_deriv(seg, t);
    const std::vector<BaseFiberGerm>& germs = trk.germs();
    for (int d = 0; d < rows; ++d)
      for (int i = 0; i < cols; ++i)
        acc(d, i) += cx.rule.w(k) *
                     (*cx.frame)[static_cast<size_t>(d)].eval(trk.x(), germs[static_cast<size_t>(i)]) * dz;
  }
  trk.follow(sub_segment(seg, tc, t1));
  return acc * (t1 - t0);
}

// Adaptive bisection: a panel is accepted when it agrees with its two
// halves. The tracker passed in must sit at t0; on success out holds the
// state at t1.
CMat refine(const SweepContext& cx, const SheetTracker& at0, SheetTracker& out,
            const PathSegment& seg, double t0, double t1, double eps, int depth) {
  SheetTracker coarse = at0;
  CMat whole = panel_sum(cx, coarse, seg, t0, t1);
  SheetTracker halves = at0;
  double tm = 0.5 * (t0 + t1);
  CMat left = panel_sum(cx, halves, seg, t0, tm);
  CMat right = panel_sum(cx, halves, seg, tm, t1);
  double err = (whole - left - right).cwiseAbs().maxCoeff();
  // The halved tolerances of deep panels eventually undercut what rounding
  // lets two panel sums agree to. Near a steep integrand the node positions
  // themselves carry jitter amplified by the logarithmic derivative, so the
  // floor is generous relative to the local panel magnitude; an integrand
  // that truly fails to converge disagrees at the full magnitude and still
  // stalls.
  double floor_eps =
      1e-12 * (whole.cwiseAbs().maxCoeff() + left.cwiseAbs().maxCoeff());
  if (err <= std::max(eps, floor_eps)) {
    out = std::move(halves);
    return left + right;
  }
  if (depth >= cx.opt.max_depth) {
    cplx where = seg.eval(tm);
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "error %.3g above %.3g at depth %d near x = (%g, %g)", err,
                  std::max(eps, floor_eps), depth, where.real(), where.imag());
    throw QuadratureStall(msg);
  }
  SheetTracker mid(at0);
  CMat l = refine(cx, at0, mid, seg, t0, tm, 0.5 * eps, depth + 1);
  CMat r = refine(cx, mid, out, seg, tm, t1, 0.5 * eps, depth + 1);
  return l + r;
}

// Integrals of every frame entry over the whole path, one column per start
// sheet of the fiber over the path start.
CMat tracked_integrals(const SpectralCurve& curve, const std::vector<Differential>& frame,
                       const Path& path, const QuadratureOptions& opt) {
  if (path.empty()) throw Error("cannot integrate along an empty path");
  SweepContext cx{&curve, &frame, gauss_rule(opt.order), opt};
  SheetTracker trk(curve, path_start(path));
  CMat total = CMat::Zero(static_cast<int>(frame.size()), curve.sheets);
  for (const PathSegment& seg : path) {
    // The acceptance threshold is relative to a coarse probe of the segment
    // so short and long segments are resolved to comparable accuracy.
    SheetTracker probe = trk;
    CMat coarse = panel_sum(cx, probe, seg, 0.0, 1.0);
    double eps = opt.rel_tol * std::max(1.0, coarse.cwiseAbs().maxCoeff());
    SheetTracker next = trk;
    total += refine(cx, trk, next, seg, 0.0, 1.0, eps, 0);
    trk = std::move(next);
  }
  return total;
}

} // namespace

cplx integrate_tracked(const SpectralCurve& curve, const Differential& w,
                       const Path& path, int start_sheet,
                       const QuadratureOptions& opt) {
  if (start_sheet < 0 || start_sheet >= curve.sheets)
    throw Error("start sheet out of range");
  std::vector<Differential> frame{w};
  return tracked_integrals(curve, frame, path, opt)(0, start_sheet);
}

CMat edge_integrals(const SpectralCurve& curve, const std::vector<Differential>& frame,
                    const KeyholeSystem& keyholes, const QuadratureOptions& opt) {
  const int sheets = curve.sheets;
  const int loops = static_cast<int>(keyholes.loops.size());
  CMat out = CMat::Zero(static_cast<int>(frame.size()), loops * sheets);
  for (int m = 0; m < loops; ++m) {
    const Path& loop = keyholes.loops[static_cast<size_t>(m)].loop;
    if (std::abs(path_start(loop) - curve.anchor_x) > 1e-9)
      throw Error("keyhole loop is not based at the anchor");
    out.middleCols(m * sheets, sheets) = tracked_integrals(curve, frame, loop, opt);
  }
  return out;
}

std::vector<Differential> combine_frame(const std::vector<Differential>& frame,
                                        const CMat& coeff) {
  if (frame.empty()) throw Error("cannot combine an empty frame");
  if (coeff.cols() != static_cast<Eigen::Index>(frame.size()))
    throw Error("coefficient matrix does not match the frame size");
  for (const Differential& w : frame)
    if (w.y_pow != frame.front().y_pow || w.lam_pow != frame.front().lam_pow)
      throw Error("cannot combine frame entries with mixed y or lambda powers");
  std::vector<Differential> out;
  out.reserve(static_cast<size_t>(coeff.rows()));
  for (Eigen::Index i = 0; i < coeff.rows(); ++i) {
    Poly acc;
    for (Eigen::Index j = 0; j < coeff.cols(); ++j)
      acc = acc + frame[static_cast<size_t>(j)].numer * coeff(i, j);
    out.push_back(Differential{acc, frame.front().y_pow, frame.front().lam_pow});
  }
  return out;
}

PrymFrame normalize_frame(const SpectralCurve& curve, const AdaptedBasis& basis,
                          const CMat& raw_edges) {
  const int h1 = basis.h1, g1 = basis.g1;
  if (raw_edges.rows() != h1)
    throw Error("raw frame size does not match the anti invariant dimension");
  if (raw_edges.cols() != basis.a_edges.rows())
    throw Error("edge integral table does not match the chain layout");
  (void)curve;
  CMat acols = basis.a_edges.leftCols(h1).cast<cplx>();
  CMat a_mat = (raw_edges * acols) / kTwoPiI;
  Eigen::JacobiSVD<CMat> svd(a_mat);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(h1 - 1);
  if (!(smin > 1e-10 * std::max(1.0, smax)))
    throw DegenerateAPeriods("smallest singular value " + std::to_string(smin) +
                             " of the a period matrix");
  PrymFrame f;
  f.coeff = a_mat.inverse();
  f.a_condition = smax / smin;
  f.epsilon = IVec::Zero(2 * h1);
  for (int j = 0; j < h1; ++j) {
    ilong eps = j < g1 ? 1 : 2;
    f.epsilon(j) = eps;
    f.epsilon(h1 + j) = eps;
  }
  return f;
}

CMat riemann_matrix(const PrymFrame& frame, const AdaptedBasis& basis,
                    const CMat& raw_edges) {
  const int h1 = basis.h1, g1 = basis.g1;
  if (frame.coeff.rows() != h1 || frame.coeff.cols() != h1)
    throw Error("frame coefficients do not match the anti invariant dimension");
  CMat bcols = basis.b_edges.leftCols(h1).cast<cplx>();
  CMat pi = frame.coeff * raw_edges * bcols;
  // Cycles in the fixed block survive on the quotient with multiplicity two,
  // hence the half weight on their periods.
  for (int j = g1; j < h1; ++j) pi.col(j) *= 0.5;
  double asym = (pi - pi.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-6)
    throw NotSymmetric("riemann matrix asymmetry " + std::to_string(asym));
  RMat sym = 0.5 * (pi.real() + pi.real().transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(sym);
  if (es.eigenvalues().maxCoeff() >= 0.0)
    throw NotConvergent("real part has eigenvalue " +
                        std::to_string(es.eigenvalues().maxCoeff()));
  return pi;
}

PrymFrame period_frame(const SpectralCurve& curve, const SurfaceHomology& hom,
                       const AdaptedBasis& basis, const QuadratureOptions& opt) {
  std::vector<Differential> raw = prym_frame(curve);
  CMat edges = edge_integrals(curve, raw, hom.keyholes, opt);
  PrymFrame f = normalize_frame(curve, basis, edges);
  f.Pi = riemann_matrix(f, basis, edges);
  const int h1 = basis.h1;
  f.lattice = CMat::Zero(h1, 2 * h1);
  for (int j = 0; j < h1; ++j)
    f.lattice(j, j) = kTwoPiI * static_cast<double>(f.epsilon(j));
  f.lattice.rightCols(h1) = f.Pi;
  return f;
}

CVec lattice_reduce(const CVec& v, const PrymFrame& frame) {
  const int h = static_cast<int>(frame.lattice.rows());
  if (frame.lattice.size() == 0)
    throw Error("period lattice is not filled in");
  if (v.size() != h) throw Error("vector size does not match the lattice");
  RMat gen(2 * h, 2 * h);
  for (int j = 0; j < 2 * h; ++j) {
    gen.col(j).head(h) = frame.lattice.col(j).real();
    gen.col(j).tail(h) = frame.lattice.col(j).imag();
  }
  RVec rhs(2 * h);
  rhs.head(h) = v.real();
  rhs.tail(h) = v.imag();
  RVec c = gen.partialPivLu().solve(rhs);
  CVec out = v;
  for (int j = 0; j < 2 * h; ++j) {
    double k = std::floor(c(j) + 0.5);
    if (k != 0.0) out -= k * frame.lattice.col(j);
  }
  return out;
}

} // namespace prym
