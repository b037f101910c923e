// Sheet tracked analytic continuation over the x line. The fiber over any
// regular x is known in closed form, so continuation is matching: walk along
// a path, re-solve the fiber at each step, and identify the germs by
// proximity to the previous ones. A step is accepted only when the matching
// is a bijection with a clear margin; otherwise it is halved.

#pragma once

#include <vector>

#include "prym/curves.hpp"
#include "prym/types.hpp"

namespace prym {

struct PathSegment {
  enum class Kind { Line, Arc } kind = Kind::Line;
  cplx a, b;    // line endpoints
  cplx center;  // arc data: x = center + radius * exp(i * angle)
  double radius = 0.0, ang0 = 0.0, ang1 = 0.0;

  cplx eval(double t) const; // t in [0, 1]
  cplx start() const { return eval(0.0); }
  cplx end() const { return eval(1.0); }
  double length() const;
};

using Path = std::vector<PathSegment>;

PathSegment line_segment(cplx a, cplx b);
PathSegment arc_segment(cplx center, double radius, double ang0, double ang1);
// Full counterclockwise circle starting and ending at center + radius e^{i ang0}.
Path circle_path(cplx center, double radius, double ang0 = 0.0);
cplx path_start(const Path& p);
cplx path_end(const Path& p);
Path reversed(const Path& p);

// Exact fiber solve at x with the germ nearest to the hint. Throws
// BranchAmbiguous when the nearest germ does not beat the runner up clearly.
BaseFiberGerm nearest_germ(const SpectralCurve& curve, cplx x, cplx y_hint,
                           cplx lam_hint);

class SheetTracker {
 public:
  // Starts with the fiber over x0 in its deterministic order.
  SheetTracker(const SpectralCurve& curve, cplx x0);

  // Continues every sheet along the segment or path; the start of the
  // segment must coincide with the current position.
  void follow(const PathSegment& seg);
  void follow(const Path& path);

  const SpectralCurve& curve() const { return *c_; }
  const std::vector<BaseFiberGerm>& germs() const { return g_; }
  cplx x() const { return x_; }

 private:
  bool try_advance(cplx x_next);
  const SpectralCurve* c_;
  cplx x_;
  std::vector<BaseFiberGerm> g_;
};

// Permutation of the starting fiber induced by continuation around the loop:
// result[i] is the index the i-th starting germ occupies after one circuit.
// Throws LostSheet when the final germs fail to match the starting fiber.
std::vector<int> monodromy(const SpectralCurve& curve, const Path& loop);

} // namespace prym
