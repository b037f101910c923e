#include "prym/homology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <utility>

#include "prym/errors.hpp"

namespace prym {

namespace {

cplx rot_of(double alpha) { return std::polar(1.0, alpha); }

// Match the germs in `cur` to the germs in `ref` (both over the same x),
// injectively and with a margin against the runner up.
std::vector<int> match_fibers(const std::vector<BaseFiberGerm>& cur,
                              const std::vector<BaseFiberGerm>& ref) {
  const int n = static_cast<int>(cur.size());
  std::vector<int> out(static_cast<size_t>(n), -1);
  std::vector<bool> used(static_cast<size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    double best = 0, second = 1e300;
    int arg = -1;
    for (int j = 0; j < n; ++j) {
      double d = std::abs(cur[static_cast<size_t>(i)].y - ref[static_cast<size_t>(j)].y) +
                 std::abs(cur[static_cast<size_t>(i)].lam - ref[static_cast<size_t>(j)].lam);
      if (arg < 0 || d < best) {
        second = (arg < 0) ? second : best;
        best = d;
        arg = j;
      } else if (d < second) {
        second = d;
      }
    }
    if (arg < 0 || used[static_cast<size_t>(arg)] || !(best < 0.5 * second))
      throw LostSheet("fiber matching at the anchor is ambiguous");
    used[static_cast<size_t>(arg)] = true;
    out[static_cast<size_t>(i)] = arg;
  }
  return out;
}

std::vector<int> compose(const std::vector<int>& first, const std::vector<int>& then) {
  std::vector<int> out(first.size());
  for (size_t i = 0; i < first.size(); ++i)
    out[i] = then[static_cast<size_t>(first[i])];
  return out;
}

// ---------------------------------------------------------------------------
// Keyhole geometry. Everything is laid out in the rotated frame w = e^{ia} x
// where the branch values have separated real parts, then mapped back.

struct Frame {
  double alpha = 0;
  cplx rot, unrot;
  cplx to_x(cplx w) const { return unrot * w; }
  double xang(double wang) const { return wang - alpha; }
};

void append_line_w(Path* path, const Frame& f, cplx wa, cplx wb) {
  path->push_back(line_segment(f.to_x(wa), f.to_x(wb)));
}

KeyholeSystem keyhole_geometry(const SpectralCurve& curve) {
  KeyholeSystem sys;
  sys.alpha = curve.frame_rotation;
  Frame f;
  f.alpha = sys.alpha;
  f.rot = rot_of(sys.alpha);
  f.unrot = std::conj(f.rot);

  std::vector<cplx> targets;
  for (const auto& bp : curve.branch.over_base) targets.push_back(bp.x);
  if (targets.empty()) throw Error("curve has no finite branch values");
  std::vector<cplx> avoid = curve.avoid_x();

  std::vector<cplx> wt(targets.size());
  for (size_t i = 0; i < targets.size(); ++i) wt[i] = f.rot * targets[i];
  std::vector<cplx> wa(avoid.size());
  for (size_t i = 0; i < avoid.size(); ++i) wa[i] = f.rot * avoid[i];

  std::vector<size_t> order(targets.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return wt[a].real() < wt[b].real(); });

  double min_re = wa[0].real(), max_re = wa[0].real();
  double max_im = wa[0].imag();
  double spread = 0;
  for (const cplx& p : wa) {
    min_re = std::min(min_re, p.real());
    max_re = std::max(max_re, p.real());
    max_im = std::max(max_im, p.imag());
    for (const cplx& q : wa) spread = std::max(spread, std::abs(p - q));
  }
  spread = std::max(spread, 1.0);
  double sep = spread;
  for (size_t i = 0; i < wa.size(); ++i)
    for (size_t j = i + 1; j < wa.size(); ++j)
      sep = std::min(sep, std::abs(wa[i].real() - wa[j].real()));
  if (!(sep > 1e-5 * spread))
    throw Error("rotated branch values have no usable horizontal separation");

  const double pad = 0.3 * spread + 0.2;
  const double spine_im = max_im + pad;
  const cplx corner_w(max_re + pad, spine_im);
  sys.corner = f.to_x(corner_w);

  const double ring = std::abs(curve.anchor_x);
  if (!(std::abs(corner_w) < 0.85 * ring))
    throw Error("staging corner is not clearly inside the anchor circle");
  const double phi_c = std::arg(corner_w);

  for (size_t oi = 0; oi < order.size(); ++oi) {
    size_t m = order[oi];
    KeyholeLoop kl;
    kl.center = targets[m];
    double radius = sep / 3.0;
    for (size_t j = 0; j < wa.size(); ++j) {
      double d = std::abs(wa[j] - wt[m]);
      if (d > 1e-12) radius = std::min(radius, d / 3.0);
    }
    radius = std::min(radius, pad / 2.0);
    kl.radius = radius;

    // Anchor, along the anchor circle, radially in to the corner, left along
    // the spine, down the tooth (refined near the bottom), once CCW around
    // the branch value, and the same way back.
    Path out;
    double dphi = std::remainder(phi_c - sys.alpha, 2.0 * kPi);
    out.push_back(arc_segment(cplx(0), ring, 0.0, f.xang(sys.alpha + dphi)));
    append_line_w(&out, f, std::polar(ring, phi_c), corner_w);
    cplx tooth_top(wt[m].real(), spine_im);
    append_line_w(&out, f, corner_w, tooth_top);
    cplx near_pt = wt[m] + cplx(0, 4.0 * radius);
    cplx circ_top = wt[m] + cplx(0, radius);
    if (spine_im > 4.0 * radius + wt[m].imag()) {
      append_line_w(&out, f, tooth_top, near_pt);
      append_line_w(&out, f, near_pt, circ_top);
    } else {
      append_line_w(&out, f, tooth_top, circ_top);
    }
    Path circle;
    circle.push_back(arc_segment(kl.center, radius, f.xang(kPi / 2.0),
                                 f.xang(kPi / 2.0 + 2.0 * kPi)));
    Path back = reversed(out);
    kl.loop = out;
    kl.loop.insert(kl.loop.end(), circle.begin(), circle.end());
    kl.loop.insert(kl.loop.end(), back.begin(), back.end());
    sys.loops.push_back(std::move(kl));
  }

  sys.big_circle = circle_path(cplx(0), ring, 0.0);
  return sys;
}

// ---------------------------------------------------------------------------
// Sampled lifts of one keyhole loop to every sheet at once.

struct LoopLift {
  std::vector<cplx> xs;                           // samples, xs[0] = anchor
  std::vector<std::vector<BaseFiberGerm>> fibers; // per sample, per sheet
  std::vector<int> perm;                          // monodromy of the loop
};

void sample_segment(const PathSegment& seg, double line_step, double arc_step,
                    std::vector<cplx>* out) {
  int n;
  if (seg.kind == PathSegment::Kind::Line) {
    n = std::clamp(static_cast<int>(seg.length() / line_step) + 1, 4, 2000);
  } else {
    n = std::clamp(static_cast<int>(std::abs(seg.ang1 - seg.ang0) / arc_step) + 1, 8, 2000);
  }
  for (int k = 1; k <= n; ++k)
    out->push_back(seg.eval(static_cast<double>(k) / n));
}

LoopLift lift_loop(const SpectralCurve& curve, const KeyholeLoop& kl, double line_step,
                   const std::vector<cplx>& avoid) {
  LoopLift lift;
  lift.xs.push_back(curve.anchor_x);
  for (const PathSegment& seg : kl.loop) {
    // Keep chords near any branch value much shorter than the fiber collision
    // scale there, so that germ interpolation stays crisp.
    double d = std::abs(curve.anchor_x);
    for (cplx a : avoid)
      d = std::min(d, std::min(std::abs(seg.start() - a), std::abs(seg.end() - a)));
    double ls = std::min(line_step, std::max(d / 6.0, kl.radius / 3.0));
    sample_segment(seg, ls, 0.08, &lift.xs);
  }
  // The last sample closes the loop at the anchor; drop the duplicate.
  if (std::abs(lift.xs.back() - curve.anchor_x) > 1e-9)
    throw Error("keyhole loop does not close at the anchor");
  lift.xs.pop_back();

  SheetTracker tracker(curve, curve.anchor_x);
  lift.fibers.push_back(tracker.germs());
  for (size_t k = 1; k < lift.xs.size(); ++k) {
    tracker.follow(line_segment(lift.xs[k - 1], lift.xs[k]));
    lift.fibers.push_back(tracker.germs());
  }
  tracker.follow(line_segment(lift.xs.back(), curve.anchor_x));
  lift.perm = match_fibers(tracker.germs(), lift.fibers[0]);
  return lift;
}

// ---------------------------------------------------------------------------
// The lifted graph and its chain bookkeeping. Edge m * sheets + i runs from
// sheet i to sheet perm_m[i].

struct LiftGraph {
  int sheets = 0;
  int nloops = 0;
  std::vector<std::vector<int>> perms;
  std::vector<int> tree_parent;      // vertex -> parent vertex (root: -1)
  std::vector<int> tree_edge;        // vertex -> edge id towards the parent
  std::vector<int> tree_dir;         // +1 when the edge runs parent -> vertex
  std::vector<int> nontree;          // fundamental cycle -> edge id

  int edge_count() const { return sheets * nloops; }
  int from(int e) const { return e % sheets; }
  int to(int e) const { return perms[static_cast<size_t>(e / sheets)]
                                  [static_cast<size_t>(e % sheets)]; }
};

LiftGraph build_graph(int sheets, const std::vector<std::vector<int>>& perms) {
  LiftGraph g;
  g.sheets = sheets;
  g.nloops = static_cast<int>(perms.size());
  g.perms = perms;
  g.tree_parent.assign(static_cast<size_t>(sheets), -2);
  g.tree_edge.assign(static_cast<size_t>(sheets), -1);
  g.tree_dir.assign(static_cast<size_t>(sheets), 0);
  std::vector<bool> in_tree(static_cast<size_t>(g.edge_count()), false);

  std::vector<int> queue{0};
  g.tree_parent[0] = -1;
  size_t head = 0;
  while (head < queue.size()) {
    int v = queue[head++];
    for (int e = 0; e < g.edge_count(); ++e) {
      int a = g.from(e), b = g.to(e);
      int other = -1;
      if (a == v) other = b;
      else if (b == v) other = a;
      else continue;
      if (g.tree_parent[static_cast<size_t>(other)] != -2) continue;
      g.tree_parent[static_cast<size_t>(other)] = v;
      g.tree_edge[static_cast<size_t>(other)] = e;
      g.tree_dir[static_cast<size_t>(other)] = (a == v) ? 1 : -1;
      in_tree[static_cast<size_t>(e)] = true;
      queue.push_back(other);
    }
  }
  for (int v = 0; v < sheets; ++v)
    if (g.tree_parent[static_cast<size_t>(v)] == -2)
      throw Error("the sheet monodromy is not transitive");
  for (int e = 0; e < g.edge_count(); ++e)
    if (!in_tree[static_cast<size_t>(e)]) g.nontree.push_back(e);
  return g;
}

using Walk = std::vector<std::pair<int, int>>; // (edge id, direction)

void push_reduced(Walk* w, int edge, int dir) {
  if (!w->empty() && w->back().first == edge && w->back().second == -dir)
    w->pop_back();
  else
    w->push_back({edge, dir});
}

Walk tree_path_from_root(const LiftGraph& g, int v) {
  Walk w;
  std::vector<std::pair<int, int>> rev;
  while (g.tree_parent[static_cast<size_t>(v)] >= 0 || v != 0) {
    rev.push_back({g.tree_edge[static_cast<size_t>(v)], g.tree_dir[static_cast<size_t>(v)]});
    v = g.tree_parent[static_cast<size_t>(v)];
  }
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) push_reduced(&w, it->first, it->second);
  return w;
}

Walk fundamental_walk(const LiftGraph& g, int nontree_edge) {
  Walk w = tree_path_from_root(g, g.from(nontree_edge));
  push_reduced(&w, nontree_edge, 1);
  Walk back = tree_path_from_root(g, g.to(nontree_edge));
  for (auto it = back.rbegin(); it != back.rend(); ++it)
    push_reduced(&w, it->first, -it->second);
  return w;
}

IVec walk_chain(const LiftGraph& g, const Walk& w) {
  IVec c = IVec::Zero(g.edge_count());
  for (const auto& [e, d] : w) c(e) += d;
  return c;
}

// Coordinates of a closed chain in the fundamental cycle basis are just its
// non tree components; verified against the chain matrix by the caller.
IVec chain_coords(const LiftGraph& g, const IVec& chain) {
  IVec c(static_cast<Eigen::Index>(g.nontree.size()));
  for (size_t r = 0; r < g.nontree.size(); ++r)
    c(static_cast<Eigen::Index>(r)) = chain(g.nontree[r]);
  return c;
}

// ---------------------------------------------------------------------------
// Crossing counts of pushed off representatives.

struct Strand {
  std::vector<cplx> q;        // jittered vertices (cyclic)
  std::vector<cplx> x;        // original vertices
  std::vector<cplx> y, lam;   // germ values at the original vertices
};

struct CrossingTrouble {};

Strand realize_strand(const LiftGraph& g, const Walk& walk,
                      const std::vector<LoopLift>& lifts, double delta) {
  Strand s;
  for (const auto& [e, d] : walk) {
    int m = e / g.sheets, i = e % g.sheets;
    const LoopLift& L = lifts[static_cast<size_t>(m)];
    size_t n = L.xs.size();
    if (d > 0) {
      for (size_t k = 0; k < n; ++k) {
        s.x.push_back(L.xs[k]);
        s.y.push_back(L.fibers[k][static_cast<size_t>(i)].y);
        s.lam.push_back(L.fibers[k][static_cast<size_t>(i)].lam);
      }
    } else {
      s.x.push_back(L.xs[0]);
      s.y.push_back(L.fibers[0][static_cast<size_t>(L.perm[static_cast<size_t>(i)])].y);
      s.lam.push_back(L.fibers[0][static_cast<size_t>(L.perm[static_cast<size_t>(i)])].lam);
      for (size_t k = n - 1; k >= 1; --k) {
        s.x.push_back(L.xs[k]);
        s.y.push_back(L.fibers[k][static_cast<size_t>(i)].y);
        s.lam.push_back(L.fibers[k][static_cast<size_t>(i)].lam);
      }
    }
  }
  size_t n = s.x.size();
  if (n < 3) throw Error("degenerate cycle representative");
  s.q.resize(n);
  for (size_t k = 0; k < n; ++k) {
    cplx prev = s.x[(k + n - 1) % n], next = s.x[(k + 1) % n];
    cplx t = next - prev;
    if (std::abs(t) < 1e-12) t = s.x[k] - prev;
    if (std::abs(t) < 1e-12) t = cplx(1, 0);
    s.q[k] = s.x[k] + delta * (cplx(0, 1) * t / std::abs(t));
  }
  return s;
}

double cross2(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

struct SegmentGrid {
  double cell = 1.0;
  std::map<std::pair<long, long>, std::vector<size_t>> buckets;
};

// Visits every grid cell whose closed box meets the segment from a to b. Long
// chords are cut into pieces of at most two cells first, so the box cover
// stays within a constant factor of the cells actually touched.
template <class F>
void for_segment_cells(cplx a, cplx b, double cell, F&& visit) {
  double len = std::abs(b - a);
  int pieces = std::max(1, static_cast<int>(std::ceil(len / (2.0 * cell))));
  for (int p = 0; p < pieces; ++p) {
    cplx u = a + (static_cast<double>(p) / pieces) * (b - a);
    cplx v = a + (static_cast<double>(p + 1) / pieces) * (b - a);
    long x0 = static_cast<long>(std::floor(std::min(u.real(), v.real()) / cell));
    long x1 = static_cast<long>(std::floor(std::max(u.real(), v.real()) / cell));
    long y0 = static_cast<long>(std::floor(std::min(u.imag(), v.imag()) / cell));
    long y1 = static_cast<long>(std::floor(std::max(u.imag(), v.imag()) / cell));
    for (long cx = x0; cx <= x1; ++cx)
      for (long cy = y0; cy <= y1; ++cy) visit(cx, cy);
  }
}

SegmentGrid segment_grid(const Strand& s) {
  SegmentGrid g;
  size_t n = s.q.size();
  double total = 0;
  for (size_t k = 0; k < n; ++k) total += std::abs(s.q[(k + 1) % n] - s.q[k]);
  g.cell = std::max(2.0 * total / static_cast<double>(n), 1e-9);
  for (size_t k = 0; k < n; ++k)
    for_segment_cells(s.q[k], s.q[(k + 1) % n], g.cell, [&](long cx, long cy) {
      auto& bucket = g.buckets[{cx, cy}];
      if (bucket.empty() || bucket.back() != k) bucket.push_back(k);
    });
  return g;
}

int crossing_number(const SpectralCurve& curve, const Strand& A, const SegmentGrid& grid,
                    const Strand& B) {
  size_t na = A.q.size(), nb = B.q.size();
  int total = 0;
  std::vector<uint32_t> stamp(na, 0);
  uint32_t tick = 0;
  for (size_t k = 0; k < nb; ++k) {
    cplx b1 = B.q[k], b2 = B.q[(k + 1) % nb];
    ++tick;
    for_segment_cells(b1, b2, grid.cell, [&](long cx, long cy) {
      auto it = grid.buckets.find({cx, cy});
      if (it == grid.buckets.end()) return;
      for (size_t j : it->second) {
        if (stamp[j] == tick) continue;
        stamp[j] = tick;
        cplx a1 = A.q[j], a2 = A.q[(j + 1) % na];
        double la = std::abs(a2 - a1), lb = std::abs(b2 - b1);
        // Orientation predicates degrade with roundoff of order machine
        // epsilon times coordinate size times segment length.
        double mag = std::max(std::max(std::abs(a1), std::abs(a2)),
                              std::max(std::abs(b1), std::abs(b2)));
        double eps = 1e-13 * (1.0 + mag) * (la + lb);
        double d1 = cross2(b2 - b1, a1 - b1);
        double d2 = cross2(b2 - b1, a2 - b1);
        double d3 = cross2(a2 - a1, b1 - a1);
        double d4 = cross2(a2 - a1, b2 - a1);
        bool proper = (d1 > 0) != (d2 > 0) && (d3 > 0) != (d4 > 0);
        double margin = std::min(std::min(std::abs(d1), std::abs(d2)),
                                 std::min(std::abs(d3), std::abs(d4)));
        if (margin < eps) {
          // Touching or collinear segments; only harmful when the pieces
          // come close for real, which a different push off resolves.
          double gap = std::min({std::abs(a1 - b1), std::abs(a1 - b2),
                                 std::abs(a2 - b1), std::abs(a2 - b2)});
          if (proper || gap < 0.5 * (la + lb)) throw CrossingTrouble{};
          continue;
        }
        if (!proper) continue;
        double ta = d1 / (d1 - d2);
        double tb = d3 / (d3 - d4);
        cplx xa = A.x[j] + ta * (A.x[(j + 1) % na] - A.x[j]);
        cplx xb = B.x[k] + tb * (B.x[(k + 1) % nb] - B.x[k]);
        cplx xm = 0.5 * (xa + xb);
        std::vector<BaseFiberGerm> fib = curve.fiber(xm);
        cplx ya = A.y[j] + ta * (A.y[(j + 1) % na] - A.y[j]);
        cplx la2 = A.lam[j] + ta * (A.lam[(j + 1) % na] - A.lam[j]);
        cplx yb = B.y[k] + tb * (B.y[(k + 1) % nb] - B.y[k]);
        cplx lb2 = B.lam[k] + tb * (B.lam[(k + 1) % nb] - B.lam[k]);
        auto match = [&](cplx yy, cplx ll) {
          double best = 0, second = 1e300;
          int arg = -1;
          for (size_t t = 0; t < fib.size(); ++t) {
            double d = std::abs(yy - fib[t].y) + std::abs(ll - fib[t].lam);
            if (arg < 0 || d < best) {
              second = (arg < 0) ? second : best;
              best = d;
              arg = static_cast<int>(t);
            } else if (d < second) {
              second = d;
            }
          }
          if (!(best < 0.4 * second)) throw CrossingTrouble{};
          return arg;
        };
        if (match(ya, la2) != match(yb, lb2)) continue;
        double orient = cross2(a2 - a1, b2 - b1);
        if (std::abs(orient) < eps) throw CrossingTrouble{};
        total += (orient > 0) ? 1 : -1;
      }
    });
  }
  return total;
}

IMat standard_symplectic(int ghat) {
  IMat j = IMat::Zero(2 * ghat, 2 * ghat);
  for (int i = 0; i < ghat; ++i) {
    j(i, ghat + i) = 1;
    j(ghat + i, i) = -1;
  }
  return j;
}

} // namespace

KeyholeSystem keyhole_system(const SpectralCurve& curve) {
  KeyholeSystem sys = keyhole_geometry(curve);
  const int k = static_cast<int>(sys.loops.size());
  std::vector<std::vector<int>> perms;
  perms.reserve(static_cast<size_t>(k));
  for (const KeyholeLoop& kl : sys.loops) perms.push_back(monodromy(curve, kl.loop));
  std::vector<int> big = monodromy(curve, sys.big_circle);

  std::vector<int> asc(perms[0].size());
  for (size_t i = 0; i < asc.size(); ++i) asc[i] = static_cast<int>(i);
  std::vector<int> desc = asc;
  for (int m = 0; m < k; ++m) asc = compose(asc, perms[static_cast<size_t>(m)]);
  for (int m = k - 1; m >= 0; --m) desc = compose(desc, perms[static_cast<size_t>(m)]);

  if (asc == big) {
    for (int m = 0; m < k; ++m) sys.product_word.push_back(m);
  } else if (desc == big) {
    for (int m = k - 1; m >= 0; --m) sys.product_word.push_back(m);
  } else {
    throw Error("keyhole loops do not compose to the boundary circle");
  }
  return sys;
}

SurfaceHomology surface_homology(const SpectralCurve& curve) {
  SurfaceHomology h;
  h.keyholes = keyhole_system(curve);
  h.sheets = curve.sheets;
  const int n = h.sheets;
  const int k = static_cast<int>(h.keyholes.loops.size());

  // Geometry scales for sampling and push offs.
  double feature = h.keyholes.loops[0].radius;
  for (const KeyholeLoop& kl : h.keyholes.loops) feature = std::min(feature, kl.radius);
  double extent = 0;
  for (const KeyholeLoop& kl : h.keyholes.loops)
    extent = std::max(extent, std::abs(kl.center - h.keyholes.corner));
  const double line_step = std::max(extent, 1.0) / 28.0;

  std::vector<LoopLift> lifts;
  lifts.reserve(static_cast<size_t>(k));
  const std::vector<cplx> avoid = curve.avoid_x();
  for (const KeyholeLoop& kl : h.keyholes.loops)
    lifts.push_back(lift_loop(curve, kl, line_step, avoid));

  for (const LoopLift& L : lifts) h.branch_mono.push_back(L.perm);
  h.infinity_mono = monodromy(curve, h.keyholes.big_circle);

  // The sampled lifts must reproduce the product relation that the keyhole
  // construction already certified.
  {
    std::vector<int> prod(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) prod[static_cast<size_t>(i)] = i;
    for (int m : h.keyholes.product_word)
      prod = compose(prod, h.branch_mono[static_cast<size_t>(m)]);
    if (prod != h.infinity_mono)
      throw Error("sampled lifts disagree with the keyhole monodromy");
  }

  LiftGraph graph = build_graph(n, h.branch_mono);
  const int nedges = graph.edge_count();
  const int nfund = static_cast<int>(graph.nontree.size());

  std::vector<Walk> walks;
  walks.reserve(static_cast<size_t>(nfund));
  h.fund_edges = IMat::Zero(nedges, nfund);
  for (int r = 0; r < nfund; ++r) {
    walks.push_back(fundamental_walk(graph, graph.nontree[static_cast<size_t>(r)]));
    h.fund_edges.col(r) = walk_chain(graph, walks.back());
  }

  // Puncture boundary chains: one per cycle of each finite permutation, one
  // per cycle of the product permutation (the points over infinity).
  std::vector<IVec> rel_chains;
  int finite_count = 0;
  for (int m = 0; m < k; ++m) {
    const auto& perm = h.branch_mono[static_cast<size_t>(m)];
    std::vector<bool> seen(static_cast<size_t>(n), false);
    for (int i = 0; i < n; ++i) {
      if (seen[static_cast<size_t>(i)]) continue;
      IVec chain = IVec::Zero(nedges);
      int j = i;
      do {
        seen[static_cast<size_t>(j)] = true;
        chain(m * n + j) += 1;
        j = perm[static_cast<size_t>(j)];
      } while (j != i);
      rel_chains.push_back(chain);
      ++finite_count;
    }
  }
  {
    std::vector<int> prod(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) prod[static_cast<size_t>(i)] = i;
    for (int m : h.keyholes.product_word)
      prod = compose(prod, h.branch_mono[static_cast<size_t>(m)]);
    std::vector<bool> seen(static_cast<size_t>(n), false);
    int inf_points = 0;
    for (int i = 0; i < n; ++i) {
      if (seen[static_cast<size_t>(i)]) continue;
      IVec chain = IVec::Zero(nedges);
      int j = i;
      do {
        seen[static_cast<size_t>(j)] = true;
        for (int m : h.keyholes.product_word) {
          chain(m * n + j) += 1;
          j = h.branch_mono[static_cast<size_t>(m)][static_cast<size_t>(j)];
        }
      } while (j != i);
      rel_chains.push_back(chain);
      ++inf_points;
    }
    if (inf_points != static_cast<int>(curve.infinity.size()))
      throw Error("points over infinity disagree between monodromy and expansion data");
  }
  h.finite_relations = finite_count;

  h.relations = IMat::Zero(nfund, static_cast<Eigen::Index>(rel_chains.size()));
  for (size_t c = 0; c < rel_chains.size(); ++c) {
    IVec coords = chain_coords(graph, rel_chains[c]);
    if (h.fund_edges * coords != rel_chains[c])
      throw Error("puncture boundary is not a cycle of the lift graph");
    h.relations.col(static_cast<Eigen::Index>(c)) = coords;
  }

  SmithResult sm = smith_normal_form(h.relations);
  const int nrel = static_cast<int>(rel_chains.size());
  if (sm.rank != nrel - 1)
    throw Error("puncture boundaries have unexpected rank");
  for (int i = 0; i < sm.rank; ++i)
    if (std::abs(sm.S(i, i)) != 1)
      throw Error("homology has torsion, which a surface cannot");
  const int rank2g = nfund - sm.rank;
  if (rank2g != 2 * curve.genus_hat)
    throw Error("homology rank disagrees with the genus computation");

  IMat uinv = unimodular_inverse(sm.U);
  IMat section = uinv.rightCols(rank2g);        // fund coords of the basis
  IMat proj = sm.U.bottomRows(rank2g);          // quotient coordinates
  if (!(proj * section).isIdentity())
    throw Error("quotient section is not a section");

  // Intersection numbers on the fundamental cycles, by counting transversal
  // crossings of pushed off representatives. Certified afterwards; a failed
  // certificate only restarts with a different push off scale.
  IMat xfund;
  IMat xq;
  bool have_x = false;
  for (int attempt = 0; attempt < 6 && !have_x; ++attempt) {
    double eps = feature / (6.0 + 2.0 * attempt) * (attempt % 2 ? 0.77 : 1.0);
    std::vector<Strand> strands;
    strands.reserve(static_cast<size_t>(nfund));
    try {
      for (int r = 0; r < nfund; ++r)
        strands.push_back(realize_strand(graph, walks[static_cast<size_t>(r)], lifts,
                                         eps * (1.0 + r) / (nfund + 1.0)));
      xfund = IMat::Zero(nfund, nfund);
      for (int r = 0; r < nfund; ++r) {
        SegmentGrid grid = segment_grid(strands[static_cast<size_t>(r)]);
        for (int s = r + 1; s < nfund; ++s) {
          int c = crossing_number(curve, strands[static_cast<size_t>(r)], grid,
                                  strands[static_cast<size_t>(s)]);
          xfund(r, s) = c;
          xfund(s, r) = -c;
        }
      }
      if (!(xfund * h.relations).isZero()) throw CrossingTrouble{};
      xq = section.transpose() * xfund * section;
      auto sk = skew_smith(xq);
      if (static_cast<int>(sk.divisors.size()) != curve.genus_hat)
        throw CrossingTrouble{};
      for (ilong d : sk.divisors)
        if (d != 1) throw CrossingTrouble{};
      have_x = true;
    } catch (const CrossingTrouble&) {
      continue;
    }
  }
  if (!have_x)
    throw NonTransversal("could not realize transversal cycle representatives");

  // Symplectic change of basis.
  auto sk = skew_smith(xq);
  const int ghat = curve.genus_hat;
  IMat reorder = IMat::Zero(2 * ghat, 2 * ghat);
  for (int i = 0; i < ghat; ++i) {
    reorder(i, 2 * i) = 1;
    reorder(ghat + i, 2 * i + 1) = 1;
  }
  IMat rows = reorder * sk.Q; // new basis vectors as rows, a block then b block
  IMat t = rows.transpose();
  IMat j0 = standard_symplectic(ghat);
  if (t.transpose() * xq * t != j0)
    throw Error("skew normal form did not yield the standard pairing");

  // Involution actions: both involutions cover the identity on the x sphere,
  // so they act on lifted loops by permuting the start sheets.
  const std::vector<BaseFiberGerm>& anchor = lifts[0].fibers[0];
  std::vector<BaseFiberGerm> img1 = anchor, img2 = anchor;
  for (int i = 0; i < n; ++i) {
    img1[static_cast<size_t>(i)].lam = -anchor[static_cast<size_t>(i)].lam;
    img2[static_cast<size_t>(i)].y = -anchor[static_cast<size_t>(i)].y;
    img2[static_cast<size_t>(i)].lam = -anchor[static_cast<size_t>(i)].lam;
  }
  std::vector<int> t1 = match_fibers(img1, anchor);
  std::vector<int> t2 = match_fibers(img2, anchor);
  for (int i = 0; i < n; ++i) {
    if (t1[static_cast<size_t>(t1[static_cast<size_t>(i)])] != i ||
        t2[static_cast<size_t>(t2[static_cast<size_t>(i)])] != i)
      throw Error("involution does not square to the identity on the anchor fiber");
  }
  for (int m = 0; m < k; ++m)
    for (int i = 0; i < n; ++i) {
      const auto& p = h.branch_mono[static_cast<size_t>(m)];
      if (p[static_cast<size_t>(t1[static_cast<size_t>(i)])] !=
              t1[static_cast<size_t>(p[static_cast<size_t>(i)])] ||
          p[static_cast<size_t>(t2[static_cast<size_t>(i)])] !=
              t2[static_cast<size_t>(p[static_cast<size_t>(i)])])
        throw Error("involution does not commute with the monodromy");
    }

  auto edge_action = [&](const std::vector<int>& tperm) {
    IMat act = IMat::Zero(nfund, nfund);
    for (int r = 0; r < nfund; ++r) {
      IVec chain = h.fund_edges.col(r);
      IVec image = IVec::Zero(nedges);
      for (int e = 0; e < nedges; ++e) {
        if (chain(e) == 0) continue;
        int m = e / n, i = e % n;
        image(m * n + tperm[static_cast<size_t>(i)]) += chain(e);
      }
      IVec coords = chain_coords(graph, image);
      if (h.fund_edges * coords != image)
        throw Error("involution image is not a cycle of the lift graph");
      act.col(r) = coords;
    }
    return act;
  };
  IMat m1f = edge_action(t1);
  IMat m2f = edge_action(t2);
  for (const IMat* mf : {&m1f, &m2f}) {
    for (Eigen::Index c = 0; c < h.relations.cols(); ++c) {
      IVec img = (*mf) * h.relations.col(c);
      if (!solve_integer(h.relations, img).has_value())
        throw Error("involution does not preserve the puncture relations");
    }
  }
  IMat tinv = unimodular_inverse(t);
  IMat m1 = tinv * (proj * m1f * section) * t;
  IMat m2 = tinv * (proj * m2f * section) * t;
  for (const IMat* m : {&m1, &m2}) {
    if (!((*m) * (*m)).isIdentity())
      throw Error("homology involution does not square to the identity");
    if (m->transpose() * j0 * (*m) != j0)
      throw Error("homology involution does not preserve the pairing");
  }
  if (m1 * m2 != m2 * m1)
    throw Error("homology involutions do not commute");

  h.basis = h.fund_edges * section * t;
  h.intersection = j0;
  h.tau1 = m1;
  h.tau2 = m2;
  return h;
}

AdaptedBasis adapt_for_involution(const SpectralCurve& curve, const SurfaceHomology& h) {
  AdaptedBasis out;
  out.g1 = curve.type.g1;
  out.h1 = curve.type.h1;
  out.n1 = curve.type.n1;
  const int ghat = h.genus();
  const int g1 = out.g1, h1 = out.h1, n1 = out.n1;
  if (n1 < 1)
    throw UnsupportedFamily("adapted cycle basis needs a fixed point of the involution");
  if (ghat != h1 + g1) throw Error("block sizes do not add up to the genus");

  const IMat j0 = h.intersection;
  const IMat& m = h.tau1;
  const IMat id = IMat::Identity(2 * ghat, 2 * ghat);

  IMat lminus = integer_kernel(m + id);
  IMat lplus = integer_kernel(m - id);
  if (lminus.cols() != 2 * h1 || lplus.cols() != 2 * g1)
    throw AdaptationFailed("eigenlattices have unexpected ranks");

  IMat gform = lminus.transpose() * j0 * lminus;
  auto skm = skew_smith(gform);
  if (static_cast<int>(skm.divisors.size()) != h1)
    throw AdaptationFailed("anti invariant pairing is degenerate");
  for (int i = 0; i < h1; ++i) {
    ilong want = (i < n1 - 1) ? 1 : 2;
    if (skm.divisors[static_cast<size_t>(i)] != want)
      throw AdaptationFailed("anti invariant pairing has unexpected divisors");
  }
  auto lminus_vec = [&](Eigen::Index row) -> IVec {
    return lminus * skm.Q.row(row).transpose();
  };

  IMat pair_plus = lplus.transpose() * j0 * lplus;
  for (Eigen::Index i = 0; i < pair_plus.rows(); ++i)
    for (Eigen::Index j = 0; j < pair_plus.cols(); ++j)
      if (pair_plus(i, j) % 2 != 0)
        throw AdaptationFailed("invariant vectors with odd pairing");
  auto skp = skew_smith(pair_plus / 2);
  if (static_cast<int>(skp.divisors.size()) != g1)
    throw AdaptationFailed("invariant pairing is degenerate");
  for (ilong d : skp.divisors)
    if (d != 1) throw AdaptationFailed("invariant half pairing is not unimodular");

  // Change to coordinates in which the halved pairing is the standard
  // interleaved symplectic form. Pairing values against short vectors then
  // stay small, which keeps the partner straightening below out of integer
  // overflow territory.
  IMat hc = IMat::Zero(2 * g1, 2 * g1);
  for (int i = 0; i < g1; ++i) {
    hc(2 * i, 2 * i + 1) = 1;
    hc(2 * i + 1, 2 * i) = -1;
  }
  if (skp.Q * (pair_plus / 2) * skp.Q.transpose() != hc)
    throw AdaptationFailed("normal form did not standardize the invariant pairing");
  lplus = (lplus * skp.Q.transpose()).eval();
  auto hpair = [&](const IVec& a, const IVec& b) -> ilong { return a.dot(hc * b); };

  // Coordinates of an invariant lattice vector matching the class of an anti
  // invariant one.
  auto lift_coords = [&](const IVec& w) -> IVec {
    auto c = solve_mod2(lplus, w);
    if (!c.has_value())
      throw AdaptationFailed("class of a cut cycle misses the invariant lattice");
    IVec amb = lplus * (*c);
    for (Eigen::Index i = 0; i < amb.size(); ++i)
      if ((amb(i) - w(i)) % 2 != 0)
        throw AdaptationFailed("mod 2 lift failed to match its class");
    return *c;
  };

  std::vector<IVec> mid_a, mid_b, us, vs;
  for (int i = 0; i < n1 - 1; ++i) {
    mid_a.push_back(lminus_vec(2 * i));
    mid_b.push_back(lminus_vec(2 * i + 1));
  }
  for (int i = 0; i < g1; ++i) {
    us.push_back(lminus_vec(2 * (n1 - 1 + i)));
    vs.push_back(lminus_vec(2 * (n1 - 1 + i) + 1));
  }

  // Build invariant partners pair by pair; every correction is by an even
  // coordinate vector, so the mod 2 classes never move. Each finished pair
  // is size reduced within its congruence coset, which keeps the corrections
  // applied to later pairs from compounding.
  // Babai rounding of v against twice the lattice spanned by the columns of
  // w. Shifts by two lattice vectors keep both the mod 2 class of v and any
  // pairing constraint the lattice was built to respect.
  auto nearest_plane = [](IVec& v, const IMat& w) {
    const Eigen::Index m = w.cols();
    if (m == 0) return;
    Eigen::MatrixXd wd = w.cast<double>();
    Eigen::MatrixXd star = wd;
    Eigen::VectorXd bb(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) {
        double mu = (bb(j) <= 0) ? 0.0 : wd.col(i).dot(star.col(j)) / bb(j);
        star.col(i) -= mu * star.col(j);
      }
      bb(i) = star.col(i).squaredNorm();
    }
    Eigen::VectorXd r = v.cast<double>();
    for (Eigen::Index j = m - 1; j >= 0; --j) {
      if (bb(j) <= 0) continue;
      ilong q = std::llround(r.dot(star.col(j)) / (2.0 * bb(j)));
      if (q != 0) {
        v -= 2 * q * w.col(j);
        r -= (2.0 * q) * wd.col(j);
      }
    }
  };
  std::vector<IVec> ax, ay;
  for (int i = 0; i < g1; ++i) {
    IVec a = lift_coords(us[static_cast<size_t>(i)]);
    IVec b = lift_coords(vs[static_cast<size_t>(i)]);
    for (int j = 0; j < i; ++j) {
      const IVec& xj = ax[static_cast<size_t>(j)];
      const IVec& yj = ay[static_cast<size_t>(j)];
      ilong c1 = hpair(a, yj), c2 = hpair(a, xj);
      ilong c3 = hpair(b, yj), c4 = hpair(b, xj);
      if (c1 % 2 != 0 || c2 % 2 != 0 || c3 % 2 != 0 || c4 % 2 != 0)
        throw AdaptationFailed("odd cross term while straightening partners");
      a = (a - c1 * xj + c2 * yj).eval();
      b = (b - c3 * xj + c4 * yj).eval();
    }
    ilong content = 0;
    for (Eigen::Index r = 0; r < a.size(); ++r)
      content = std::gcd(content, std::abs(a(r)));
    if (content % 2 == 0)
      throw AdaptationFailed("partner candidate has even content");
    if (content > 1) a /= content;
    ilong d = hpair(a, b);
    if (d % 2 == 0) throw AdaptationFailed("partner pair with even pairing");
    if (d != 1) {
      // Shift b by an even vector to make the pairing exactly one without
      // touching the pairings against the finished pairs.
      Eigen::Index rows = 1 + 2 * i;
      IMat sys(rows, hc.cols());
      IVec rhs = IVec::Zero(rows);
      sys.row(0) = a.transpose() * hc;
      rhs(0) = (1 - d) / 2;
      for (int j = 0; j < i; ++j) {
        sys.row(1 + 2 * j) = ax[static_cast<size_t>(j)].transpose() * hc;
        sys.row(2 + 2 * j) = ay[static_cast<size_t>(j)].transpose() * hc;
      }
      auto c = solve_integer(sys, rhs);
      if (!c.has_value())
        throw AdaptationFailed("cannot normalize a partner pair");
      b = (b + 2 * (*c)).eval();
      // The particular solution can be wild; pull b back toward the origin
      // along the solution lattice of the same system.
      IMat wf = integer_kernel(sys);
      lll_reduce(wf);
      nearest_plane(b, wf);
    }
    // Hyperbolic partners absorb even multiples of each other freely.
    auto shrink = [](IVec& tgt, const IVec& other) {
      ilong nn = other.dot(other);
      if (nn == 0) return;
      ilong mult = std::llround(static_cast<double>(tgt.dot(other)) /
                                static_cast<double>(2 * nn));
      if (mult != 0) tgt -= 2 * mult * other;
    };
    shrink(b, a);
    shrink(a, b);
    // Shifts by twice a vector paired to zero with every finished pair leave
    // the whole Gram data untouched; use them to shorten the pair.
    IMat cons(2 * (i + 1), hc.cols());
    cons.row(0) = a.transpose() * hc;
    cons.row(1) = b.transpose() * hc;
    for (int j = 0; j < i; ++j) {
      cons.row(2 + 2 * j) = ax[static_cast<size_t>(j)].transpose() * hc;
      cons.row(3 + 2 * j) = ay[static_cast<size_t>(j)].transpose() * hc;
    }
    IMat w = integer_kernel(cons);
    lll_reduce(w);
    nearest_plane(a, w);
    nearest_plane(b, w);
    ax.push_back(a);
    ay.push_back(b);
  }
  for (int i = 0; i < g1; ++i)
    for (int j = 0; j < g1; ++j) {
      ilong pxy = hpair(ax[static_cast<size_t>(i)], ay[static_cast<size_t>(j)]);
      ilong pxx = hpair(ax[static_cast<size_t>(i)], ax[static_cast<size_t>(j)]);
      ilong pyy = hpair(ay[static_cast<size_t>(i)], ay[static_cast<size_t>(j)]);
      if (pxy != (i == j ? 1 : 0) || pxx != 0 || pyy != 0)
        throw AdaptationFailed("invariant partners failed to straighten");
    }
  std::vector<IVec> xt, yt;
  for (int i = 0; i < g1; ++i) {
    xt.push_back(lplus * ax[static_cast<size_t>(i)]);
    yt.push_back(lplus * ay[static_cast<size_t>(i)]);
  }

  auto halve_sum = [&](const IVec& a, const IVec& b) -> IVec {
    IVec s = a + b;
    for (Eigen::Index r = 0; r < s.size(); ++r) {
      if (s(r) % 2 != 0) throw AdaptationFailed("partner sum is not divisible by two");
      s(r) /= 2;
    }
    return s;
  };

  IMat c = IMat::Zero(2 * ghat, 2 * ghat);
  for (int i = 0; i < g1; ++i) {
    IVec x = halve_sum(xt[static_cast<size_t>(i)], us[static_cast<size_t>(i)]);
    IVec y = halve_sum(yt[static_cast<size_t>(i)], vs[static_cast<size_t>(i)]);
    c.col(i) = x;
    c.col(h1 + g1 + i) = y;         // b_i
    c.col(h1 + i) = (-(m * x)).eval();        // a_{h1+i}
    c.col(ghat + h1 + i) = (-(m * y)).eval(); // b_{h1+i}
  }
  for (int i = 0; i < n1 - 1; ++i) {
    c.col(g1 + i) = mid_a[static_cast<size_t>(i)];
    c.col(ghat + g1 + i) = mid_b[static_cast<size_t>(i)];
  }

  if (c.transpose() * j0 * c != j0)
    throw AdaptationFailed("adapted candidate is not symplectic");

  IMat block = IMat::Zero(ghat, ghat);
  for (int i = 0; i < g1; ++i) {
    block(h1 + i, i) = -1;
    block(i, h1 + i) = -1;
  }
  for (int i = g1; i < h1; ++i) block(i, i) = -1;
  IMat pattern = IMat::Zero(2 * ghat, 2 * ghat);
  pattern.topLeftCorner(ghat, ghat) = block;
  pattern.bottomRightCorner(ghat, ghat) = block;

  if (m * c != c * pattern)
    throw AdaptationFailed("adapted candidate does not realize the block involution");

  out.columns = c;
  out.tau1 = pattern;
  out.a_edges = h.basis * c.leftCols(ghat);
  out.b_edges = h.basis * c.rightCols(ghat);
  return out;
}

} // namespace prym
