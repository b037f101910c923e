#include "prym/continuation.hpp"

#include <algorithm>
#include <cmath>

#include "prym/errors.hpp"

namespace prym {

cplx PathSegment::eval(double t) const {
  if (kind == Kind::Line) return a + t * (b - a);
  return center + std::polar(radius, ang0 + t * (ang1 - ang0));
}

double PathSegment::length() const {
  if (kind == Kind::Line) return std::abs(b - a);
  return radius * std::abs(ang1 - ang0);
}

PathSegment line_segment(cplx a, cplx b) {
  PathSegment s;
  s.kind = PathSegment::Kind::Line;
  s.a = a;
  s.b = b;
  return s;
}

PathSegment arc_segment(cplx center, double radius, double ang0, double ang1) {
  PathSegment s;
  s.kind = PathSegment::Kind::Arc;
  s.center = center;
  s.radius = radius;
  s.ang0 = ang0;
  s.ang1 = ang1;
  return s;
}

Path circle_path(cplx center, double radius, double ang0) {
  return {arc_segment(center, radius, ang0, ang0 + 2.0 * kPi)};
}

cplx path_start(const Path& p) { return p.front().start(); }
cplx path_end(const Path& p) { return p.back().end(); }

Path reversed(const Path& p) {
  Path out;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    PathSegment s = *it;
    if (s.kind == PathSegment::Kind::Line) {
      std::swap(s.a, s.b);
    } else {
      std::swap(s.ang0, s.ang1);
    }
    out.push_back(s);
  }
  return out;
}

namespace {

double germ_distance(const BaseFiberGerm& a, const BaseFiberGerm& b) {
  return std::abs(a.y - b.y) + std::abs(a.lam - b.lam);
}

// Matches each predicted germ to a fiber germ. Fills match[i] with the fiber
// index for prediction i; returns false when any match is ambiguous (the
// runner up closer than twice the best) or the assignment is not injective.
bool match_fiber(const std::vector<BaseFiberGerm>& pred,
                 const std::vector<BaseFiberGerm>& fib,
                 std::vector<int>& match) {
  const int n = static_cast<int>(pred.size());
  match.assign(static_cast<size_t>(n), -1);
  std::vector<char> used(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    double d1 = 1e300, d2 = 1e300;
    int best = -1;
    for (int j = 0; j < n; ++j) {
      double d = germ_distance(pred[static_cast<size_t>(i)], fib[static_cast<size_t>(j)]);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = j;
      } else if (d < d2) {
        d2 = d;
      }
    }
    if (best < 0 || used[static_cast<size_t>(best)] || d1 > 0.5 * d2) return false;
    used[static_cast<size_t>(best)] = 1;
    match[static_cast<size_t>(i)] = best;
  }
  return true;
}

double min_spacing(const std::vector<BaseFiberGerm>& fib) {
  double m = 1e300;
  for (size_t i = 0; i < fib.size(); ++i)
    for (size_t j = i + 1; j < fib.size(); ++j)
      m = std::min(m, germ_distance(fib[i], fib[j]));
  return m;
}

double germ_scale(const std::vector<BaseFiberGerm>& fib) {
  double s = 1.0;
  for (const auto& g : fib) s = std::max(s, std::abs(g.y) + std::abs(g.lam));
  return s;
}

} // namespace

BaseFiberGerm nearest_germ(const SpectralCurve& curve, cplx x, cplx y_hint,
                           cplx lam_hint) {
  auto fib = curve.fiber(x);
  BaseFiberGerm hint{y_hint, lam_hint, 0};
  double d1 = 1e300, d2 = 1e300;
  int best = -1;
  for (int j = 0; j < static_cast<int>(fib.size()); ++j) {
    double d = germ_distance(hint, fib[static_cast<size_t>(j)]);
    if (d < d1) {
      d2 = d1;
      d1 = d;
      best = j;
    } else if (d < d2) {
      d2 = d;
    }
  }
  if (best < 0 || d1 > 0.5 * d2)
    throw BranchAmbiguous("germ hint does not single out a sheet");
  return fib[static_cast<size_t>(best)];
}

SheetTracker::SheetTracker(const SpectralCurve& curve, cplx x0)
    : c_(&curve), x_(x0), g_(curve.fiber(x0)) {
  if (min_spacing(g_) < 1e-9 * germ_scale(g_))
    throw NearBranchPoint("tracking started on a nearly branched fiber");
}

bool SheetTracker::try_advance(cplx x_next) {
  auto fib = c_->fiber(x_next);
  if (min_spacing(fib) < 1e-9 * germ_scale(fib))
    throw NearBranchPoint("continuation path passes a branch fiber");
  std::vector<int> match;
  if (!match_fiber(g_, fib, match)) return false;
  std::vector<BaseFiberGerm> next(g_.size());
  for (size_t i = 0; i < g_.size(); ++i)
    next[i] = fib[static_cast<size_t>(match[i])];
  g_ = std::move(next);
  x_ = x_next;
  return true;
}

void SheetTracker::follow(const PathSegment& seg) {
  if (std::abs(seg.start() - x_) > 1e-9 * (1.0 + std::abs(x_)))
    throw Error("path segment does not start at the current position");
  double t = 0.0, dt = 0.25;
  while (t < 1.0) {
    double t2 = std::min(t + dt, 1.0);
    if (try_advance(seg.eval(t2))) {
      t = t2;
      dt = std::min(dt * 1.6, 0.5);
    } else {
      dt *= 0.5;
      if (dt < 1e-9) {
        // Distinguish a genuine tracking failure from a path that runs into
        // the branch locus, where germ collisions make matching impossible.
        double d = 1e300;
        for (cplx p : c_->avoid_x()) d = std::min(d, std::abs(x_ - p));
        if (d < 1e-3 * (1.0 + std::abs(x_)))
          throw NearBranchPoint("continuation stalled against a branch value");
        throw LostSheet("sheet matching failed at the smallest step size");
      }
    }
  }
}

void SheetTracker::follow(const Path& path) {
  for (const auto& seg : path) follow(seg);
}

std::vector<int> monodromy(const SpectralCurve& curve, const Path& loop) {
  cplx x0 = path_start(loop);
  if (std::abs(x0 - path_end(loop)) > 1e-9 * (1.0 + std::abs(x0)))
    throw Error("monodromy needs a closed loop");
  SheetTracker tracker(curve, x0);
  auto start = tracker.germs();
  tracker.follow(loop);
  std::vector<int> match;
  if (!match_fiber(tracker.germs(), start, match))
    throw LostSheet("loop continuation did not land back on the starting fiber");
  return match;
}

} // namespace prym
