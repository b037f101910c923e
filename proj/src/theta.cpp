#include "prym/theta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

#include "prym/errors.hpp"

namespace prym {

namespace {

// Every multi index bounded componentwise by top, first coordinate varying
// fastest, starting at zero. The order is part of the contract: callers rely
// on entry zero being the underived sum.
std::vector<MultiIndex> box_indices(const MultiIndex& top) {
  std::vector<MultiIndex> out;
  MultiIndex g(top.size(), 0);
  while (true) {
    out.push_back(g);
    size_t d = 0;
    while (d < g.size()) {
      if (g[d] < top[d]) {
        ++g[d];
        std::fill(g.begin(), g.begin() + static_cast<long>(d), 0);
        break;
      }
      ++d;
    }
    if (d == g.size()) break;
  }
  return out;
}

double binom(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// One sup norm shell of the lattice sum. Points are visited in lexicographic
// order so repeated runs accumulate identically.
struct SeriesSweep {
  const CVec& z;
  const CMat& Pi;
  const std::vector<MultiIndex>& wants;
  std::vector<int> m;
  std::vector<cplx> acc;
  double peak = 0.0;
  double scale = 0.0;

  SeriesSweep(const CVec& z_, const CMat& Pi_, const std::vector<MultiIndex>& w)
      : z(z_), Pi(Pi_), wants(w), m(static_cast<size_t>(Pi_.rows()), 0) {}

  void add_term() {
    cplx e = 0.0;
    const int h = static_cast<int>(m.size());
    for (int i = 0; i < h; ++i) {
      cplx row = 0.0;
      for (int k = 0; k < h; ++k) row += Pi(i, k) * static_cast<double>(m[static_cast<size_t>(k)]);
      double mi = static_cast<double>(m[static_cast<size_t>(i)]);
      e += 0.5 * mi * row + mi * z(i);
    }
    cplx t = std::exp(e);
    double a = std::abs(t);
    scale += a;
    if (a > peak) peak = a;
    for (size_t w = 0; w < wants.size(); ++w) {
      double f = 1.0;
      const MultiIndex& g = wants[w];
      for (size_t d = 0; d < g.size(); ++d)
        for (int k = 0; k < g[d]; ++k) f *= m[d];
      if (f != 0.0) acc[w] += f * t;
    }
  }

  // Walk coordinates left to right; only vectors that touch the shell rim
  // somewhere belong to shell s, so the last coordinate collapses to the two
  // rim values when nothing earlier pinned the vector to the rim.
  void walk(size_t d, int s, bool pinned) {
    if (d + 1 == m.size()) {
      if (pinned) {
        for (int v = -s; v <= s; ++v) {
          m[d] = v;
          add_term();
        }
      } else {
        m[d] = -s;
        add_term();
        if (s > 0) {
          m[d] = s;
          add_term();
        }
      }
      return;
    }
    for (int v = -s; v <= s; ++v) {
      m[d] = v;
      walk(d + 1, s, pinned || std::abs(v) == s);
    }
  }

  void run_shell(int s) {
    acc.assign(wants.size(), cplx(0.0));
    peak = 0.0;
    scale = 0.0;
    walk(0, s, false);
  }
};

struct SumOut {
  std::vector<cplx> totals;
  double term_scale = 0.0;
  int radius = 0;
};

// Shared series core. Accumulates the plain sum and any requested monomial
// weighted sums in a single pass over the truncation box.
SumOut theta_sum(const CVec& z, const CMat& Pi, const std::vector<MultiIndex>& wants,
                 const ThetaParams& params) {
  const int h = static_cast<int>(Pi.rows());
  if (Pi.cols() != Pi.rows()) throw Error("period form must be square");
  if (z.size() != Pi.rows()) throw Error("argument length does not match the period form");
  int maxdeg = 0;
  for (const MultiIndex& w : wants) {
    if (static_cast<int>(w.size()) != h)
      throw Error("derivative index length does not match the period form");
    int total = 0;
    for (int o : w) {
      if (o < 0) throw Error("derivative orders must not be negative");
      total += o;
    }
    maxdeg = std::max(maxdeg, total);
  }

  RMat sym = 0.5 * (Pi.real() + Pi.real().transpose());
  Eigen::SelfAdjointEigenSolver<RMat> eig(sym);
  if (!(eig.eigenvalues().maxCoeff() < 0.0))
    throw NotConverged("real part of the period form is not negative definite");

  const bool grow = params.radius <= 0;
  const int cap = grow ? 64 : params.radius;
  // The automatic radius aims well below the requested tail target so the
  // geometric bound afterwards has slack.
  const double stop_tol = std::min(1e-14, 0.01 * params.target_tol);

  SeriesSweep sweep(z, Pi, wants);
  SumOut out;
  out.totals.assign(wants.size(), cplx(0.0));
  double peak_all = 0.0, prev_peak = 0.0, last_peak = 0.0;
  int quiet = 0;
  bool settled = false;
  for (int s = 0; s <= cap; ++s) {
    sweep.run_shell(s);
    for (size_t w = 0; w < wants.size(); ++w) out.totals[w] += sweep.acc[w];
    out.term_scale += sweep.scale;
    prev_peak = last_peak;
    last_peak = sweep.peak;
    peak_all = std::max(peak_all, sweep.peak);
    out.radius = s;
    if (grow && s >= 1) {
      // The monomial weights grow like s^maxdeg, so demand that much extra
      // decay before trusting the truncation, and ask for two quiet shells
      // in a row to dodge a single accidental dip.
      double guard = last_peak * std::pow(1.0 + s, maxdeg);
      if (guard <= stop_tol * std::max(1.0, peak_all)) {
        if (++quiet >= 2) {
          settled = true;
          break;
        }
      } else {
        quiet = 0;
      }
    }
  }
  if (grow && !settled) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "series terms still above target at the radius cap, last shell peak %.3g",
                  last_peak);
    throw NotConverged(msg);
  }

  // Geometric tail bound from the outermost pair of shells. A ratio close to
  // one means the bound is worthless and the truncation untrustworthy.
  if (last_peak > 0.0) {
    double rho = (prev_peak > 0.0) ? last_peak / prev_peak : 2.0;
    if (rho >= 0.9) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "shell decay ratio %.3g is too close to one", rho);
      throw NotConverged(msg);
    }
    double vmax = 0.0;
    for (const cplx& v : out.totals) vmax = std::max(vmax, std::abs(v));
    double tail = last_peak * rho / (1.0 - rho) * std::pow(1.0 + out.radius, maxdeg);
    if (tail > params.target_tol * std::max(1.0, vmax)) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "tail estimate %.3g exceeds the target %.3g",
                    tail, params.target_tol);
      throw NotConverged(msg);
    }
  }
  return out;
}

// Derivatives of the logarithm from derivatives of the sum itself, by the
// usual triangular recursion: differentiate theta = exp(log theta) once in
// the first active coordinate and solve for the top log derivative.
struct LogDerivTable {
  const std::map<MultiIndex, cplx>& dtheta;
  cplx th;
  std::map<MultiIndex, cplx> memo;

  cplx get(const MultiIndex& a) {
    auto hit = memo.find(a);
    if (hit != memo.end()) return hit->second;
    size_t d = 0;
    while (a[d] == 0) ++d;
    MultiIndex beta = a;
    beta[d] -= 1;
    cplx acc = dtheta.at(a);
    for (const MultiIndex& g : box_indices(beta)) {
      bool zero = true;
      for (int o : g) zero = zero && o == 0;
      if (zero) continue;
      double coef = 1.0;
      for (size_t i = 0; i < g.size(); ++i) coef *= binom(beta[i], g[i]);
      MultiIndex rest(a.size());
      for (size_t i = 0; i < a.size(); ++i) rest[i] = a[i] - g[i];
      acc -= coef * dtheta.at(g) * get(rest);
    }
    cplx val = acc / th;
    memo[a] = val;
    return val;
  }
};

} // namespace

cplx theta(const CVec& z, const CMat& Pi, const ThetaParams& params) {
  std::vector<MultiIndex> wants{MultiIndex(static_cast<size_t>(Pi.rows()), 0)};
  return theta_sum(z, Pi, wants, params).totals[0];
}

cplx theta_deriv(const CVec& z, const CMat& Pi, const MultiIndex& alpha,
                 const ThetaParams& params) {
  std::vector<MultiIndex> wants{alpha};
  return theta_sum(z, Pi, wants, params).totals[0];
}

int theta_radius(const CVec& z, const CMat& Pi, double target_tol) {
  ThetaParams params;
  params.radius = 0;
  params.target_tol = target_tol;
  std::vector<MultiIndex> wants{MultiIndex(static_cast<size_t>(Pi.rows()), 0)};
  return theta_sum(z, Pi, wants, params).radius;
}

cplx theta_logderiv(const CVec& z, const CMat& Pi, const MultiIndex& j, int direction,
                    const IVec& epsilon, const ThetaParams& params) {
  const int h = static_cast<int>(Pi.rows());
  if (static_cast<int>(j.size()) != h)
    throw Error("derivative index length does not match the period form");
  for (int o : j)
    if (o < 0) throw Error("derivative orders must not be negative");
  if (direction < 0 || direction >= h) throw Error("direction index out of range");
  if (epsilon.size() < h) throw Error("need a cycle weight for every coordinate");
  for (int k = 0; k < h; ++k)
    if (epsilon(k) < 1) throw Error("cycle weights must be positive");

  MultiIndex full = j;
  full[static_cast<size_t>(direction)] += 1;
  std::vector<MultiIndex> wants = box_indices(full);
  SumOut out = theta_sum(z, Pi, wants, params);
  std::map<MultiIndex, cplx> dtheta;
  for (size_t w = 0; w < wants.size(); ++w) dtheta[wants[w]] = out.totals[w];
  cplx th = dtheta.at(MultiIndex(static_cast<size_t>(h), 0));
  if (std::abs(th) < 1e-10 * out.term_scale) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "the sum vanishes here (%.3g against term scale %.3g)",
                  std::abs(th), out.term_scale);
    throw ThetaZero(msg);
  }

  LogDerivTable table{dtheta, th, {}};
  cplx val = table.get(full);
  // Each listed derivative acts through the map argument, which enters the
  // sum scaled by minus the reciprocal cycle weight; the power over factorial
  // shape comes from reading off a Taylor coefficient in that argument.
  cplx chain = 1.0;
  for (int k = 0; k < h; ++k) {
    double w = -1.0 / static_cast<double>(epsilon(k));
    for (int n = 0; n < j[static_cast<size_t>(k)]; ++n) chain *= w / (n + 1.0);
  }
  chain *= -1.0 / static_cast<double>(epsilon(direction));
  return chain * val;
}

} // namespace prym
