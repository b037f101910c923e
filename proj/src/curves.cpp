#include "prym/curves.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "prym/errors.hpp"

namespace prym {

namespace {

// Roots of a layer polynomial grouped by multiplicity. Companion matrix roots
// of a polynomial with an exact double root split by about the square root of
// machine precision, so grouping uses a loose tolerance and positions are then
// repolished: simple roots on f itself, double roots on f' (where they are
// simple). Multiplicity three or higher is outside what the path machinery
// can handle downstream.
struct LayerRoot {
  cplx x;
  int mult;
};

cplx newton_polish(const Poly& f, const Poly& fp, cplx x0) {
  cplx x = x0;
  for (int it = 0; it < 40; ++it) {
    cplx fx = f(x);
    cplx d = fp(x);
    if (std::abs(d) == 0.0) break;
    cplx step = fx / d;
    x -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}

std::vector<LayerRoot> layer_roots(const Poly& f, const char* layer) {
  std::vector<LayerRoot> out;
  if (f.degree() < 1) return out;
  auto raw = f.roots();
  auto groups = cluster_points(raw, 1e-5);
  Poly fp = f.derivative();
  Poly fpp = fp.derivative();
  for (const auto& gr : groups) {
    if (gr.multiplicity == 1) {
      out.push_back({newton_polish(f, fp, gr.value), 1});
    } else if (gr.multiplicity == 2) {
      out.push_back({newton_polish(fp, fpp, gr.value), 2});
    } else {
      std::ostringstream os;
      os << layer << " root of multiplicity " << gr.multiplicity << " near ("
         << gr.value.real() << ", " << gr.value.imag() << ")";
      throw DegenerateDiscriminant(os.str());
    }
  }
  return out;
}

double point_scale(const std::vector<cplx>& pts) {
  double s = 1.0;
  for (cplx p : pts) s = std::max(s, std::abs(p));
  return s;
}

// Both roots of mu^2 + b mu + c without cancellation.
std::array<cplx, 2> quadratic_roots(cplx b, cplx c) {
  cplx s = std::sqrt(b * b - 4.0 * c);
  if (std::real(std::conj(b) * s) > 0.0) s = -s;
  cplx big = (-b + s) / 2.0;
  if (std::abs(big) == 0.0) return {cplx(0), cplx(0)};
  return {big, c / big};
}

int match_germ(const std::vector<BaseFiberGerm>& germs, cplx y, cplx lam,
               const char* what) {
  std::vector<std::pair<double, int>> dist;
  for (int i = 0; i < static_cast<int>(germs.size()); ++i)
    dist.push_back({std::abs(germs[static_cast<size_t>(i)].y - y) +
                        std::abs(germs[static_cast<size_t>(i)].lam - lam),
                    i});
  std::sort(dist.begin(), dist.end());
  double mag = std::abs(y) + std::abs(lam) + 1.0;
  bool ok = !dist.empty() && dist[0].first <= 1e-6 * mag &&
            (dist.size() < 2 || dist[1].first >= 8.0 * std::max(dist[0].first, 1e-14 * mag));
  if (!ok) {
    std::ostringstream os;
    os << "could not identify the germ for " << what;
    throw MalformedSpec(os.str());
  }
  return dist[0].second;
}

Poly poly_from_map(const std::map<std::pair<int, int>, cplx>& m, int j,
                   int max_deg, const char* what) {
  int top = -1;
  for (const auto& [key, val] : m) {
    if (key.first != j) continue;
    if (key.second < 0 || key.second > max_deg) {
      std::ostringstream os;
      os << what << " coefficient (" << key.first << ", " << key.second
         << ") outside the admissible degree range";
      throw MalformedSpec(os.str());
    }
    if (std::abs(val) != 0.0) top = std::max(top, key.second);
  }
  std::vector<cplx> c(static_cast<size_t>(std::max(top, 0)) + 1, cplx(0));
  for (const auto& [key, val] : m)
    if (key.first == j) c[static_cast<size_t>(key.second)] = val;
  if (top < 0) return Poly({cplx(0)});
  return Poly(c);
}

// Checks that f is the exact square of some polynomial (up to roundoff).
bool is_polynomial_square(const Poly& f) {
  int d = f.degree();
  if (d < 0) return true; // zero polynomial
  if (d % 2 != 0) return false;
  int m = d / 2;
  std::vector<cplx> q(static_cast<size_t>(m) + 1, cplx(0));
  q[static_cast<size_t>(m)] = std::sqrt(f.leading());
  for (int t = m - 1; t >= 0; --t) {
    cplx s = f.coeff(t + m);
    for (int i = t + 1; i < m; ++i) {
      int jj = t + m - i;
      if (jj > t && jj < m) s -= q[static_cast<size_t>(i)] * q[static_cast<size_t>(jj)];
    }
    q[static_cast<size_t>(t)] = s / (2.0 * q[static_cast<size_t>(m)]);
  }
  Poly qq(q);
  Poly diff = f + (qq * qq) * cplx(-1.0);
  double norm = 0.0, err = 0.0;
  for (int k = 0; k <= d; ++k) {
    norm = std::max(norm, std::abs(f.coeff(k)));
    err = std::max(err, std::abs(diff.coeff(k)));
  }
  return err <= 1e-9 * std::max(norm, 1.0);
}

double rotation_for(const std::vector<cplx>& specials) {
  if (specials.size() < 2) return 0.4711;
  double best_alpha = 0.4711, best_sep = -1.0;
  for (int k = 0; k < 100; ++k) {
    double alpha = 0.4711 + 0.0137 * k;
    cplx rot = std::polar(1.0, alpha);
    double sep = 1e300;
    for (size_t i = 0; i < specials.size(); ++i)
      for (size_t j = i + 1; j < specials.size(); ++j)
        sep = std::min(sep,
                       std::abs(std::real(rot * (specials[i] - specials[j]))));
    if (sep > best_sep) {
      best_sep = sep;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

} // namespace

std::string group_name(Group g) {
  switch (g) {
    case Group::SL2: return "sl2";
    case Group::Sp2n: return "sp2n";
    case Group::SO2n: return "so2n";
  }
  return "?";
}

std::vector<cplx> SpectralCurve::avoid_x() const {
  std::vector<cplx> out;
  for (const auto& b : branch.over_base) out.push_back(b.x);
  for (const auto& s : branch.singular) out.push_back(s.x);
  return out;
}

cplx SpectralCurve::equation(cplx lam, cplx x, cplx y) const {
  int n = spec.rank;
  cplx l2 = lam * lam;
  cplx val = 1.0; // Horner in lambda^2
  for (int j = 1; j <= n; ++j) {
    val = val * l2 + (r[static_cast<size_t>(j - 1)](x) +
                      y * r_odd[static_cast<size_t>(j - 1)](x));
  }
  return val;
}

cplx SpectralCurve::equation_dlambda(cplx lam, cplx x, cplx y) const {
  int n = spec.rank;
  cplx l2 = lam * lam;
  // d/dlambda of lambda^{2n} + sum c_j lambda^{2(n-j)} with c_n constant term
  cplx val = 2.0 * n;
  for (int j = 1; j < n; ++j) {
    val = val * l2 + 2.0 * (n - j) *
                         (r[static_cast<size_t>(j - 1)](x) +
                          y * r_odd[static_cast<size_t>(j - 1)](x));
  }
  return val * lam;
}

std::vector<BaseFiberGerm> SpectralCurve::fiber(cplx x) const {
  std::vector<BaseFiberGerm> out;
  cplx y0 = std::sqrt(base(x));
  for (int sy = 0; sy < 2; ++sy) {
    cplx y = (sy == 0) ? y0 : -y0;
    if (spec.rank == 1) {
      cplx mu = -(r[0](x) + y * r_odd[0](x));
      cplx l = std::sqrt(mu);
      out.push_back({y, l, 0});
      out.push_back({y, -l, 0});
    } else {
      cplx p = r[0](x) + y * r_odd[0](x);
      cplx q = r[1](x) + y * r_odd[1](x);
      auto mu = quadratic_roots(p, q);
      int big = (std::abs(mu[0]) >= std::abs(mu[1])) ? 0 : 1;
      for (int k = 0; k < 2; ++k) {
        cplx l = std::sqrt(mu[static_cast<size_t>(k)]);
        int tag = (k == big) ? 0 : 1;
        out.push_back({y, l, tag});
        out.push_back({y, -l, tag});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const BaseFiberGerm& a, const BaseFiberGerm& b) {
    if (a.y.real() != b.y.real()) return a.y.real() < b.y.real();
    if (a.y.imag() != b.y.imag()) return a.y.imag() < b.y.imag();
    if (a.lam.real() != b.lam.real()) return a.lam.real() < b.lam.real();
    return a.lam.imag() < b.lam.imag();
  });
  return out;
}

SpectralCurve build_curve(const CurveSpec& spec) {
  SpectralCurve c;
  c.spec = spec;
  int n = spec.rank;
  int g = spec.base_genus;
  if (spec.group == Group::SL2 && n != 1)
    throw MalformedSpec("sl2 curves have rank 1");
  if (spec.group != Group::SL2 && n != 2)
    throw UnsupportedFamily("only rank 2 symplectic and orthogonal families are implemented");
  if (g < 1) throw MalformedSpec("base genus must be at least 1");
  if (spec.base_coeffs.size() != static_cast<size_t>(2 * g + 2))
    throw MalformedSpec("base polynomial needs 2g+2 coefficients");
  if (std::abs(spec.base_coeffs.back()) == 0.0)
    throw MalformedSpec("base polynomial must have odd degree 2g+1");
  c.base = Poly(spec.base_coeffs);

  for (const auto& [key, val] : spec.h0_coeffs)
    if (key.first < 1 || key.first > n)
      throw MalformedSpec("even invariant index outside 1..n");
  for (const auto& [key, val] : spec.h1_coeffs)
    if (key.first < 1 || key.first > n)
      throw MalformedSpec("odd invariant index outside 1..n");

  bool odd_present = false;
  for (int j = 1; j <= n; ++j) {
    c.r.push_back(poly_from_map(spec.h0_coeffs, j, 2 * j * (g - 1), "even invariant"));
    Poly oj = poly_from_map(spec.h1_coeffs, j,
                            std::max((2 * j - 1) * (g - 1) - 2, 0), "odd invariant");
    if (!oj.is_zero()) odd_present = true;
    c.r_odd.push_back(oj);
  }
  c.has_second_involution = !odd_present;
  c.sheets = 4 * n;
  if (c.r[static_cast<size_t>(n - 1)].is_zero())
    throw MalformedSpec("the top even invariant r_n must not vanish identically");
  if (spec.group == Group::SO2n && !is_polynomial_square(c.r[static_cast<size_t>(n - 1)]))
    throw MalformedSpec("orthogonal family requires r_n to be a polynomial square");

  // Base roots are always needed; a repeated one is a singular base.
  auto base_raw = c.base.roots();
  double scale = point_scale(base_raw);
  auto base_groups = cluster_points(base_raw, 1e-6);
  for (const auto& gr : base_groups)
    if (gr.multiplicity > 1) throw SingularBase("base polynomial has a repeated root");

  if (!c.has_second_involution) {
    // The involution pair does not exist; leave the topology unset so that
    // classify_pair can report the failure.
    return c;
  }

  Poly fp = c.base.derivative();
  std::vector<LayerRoot> yroots;
  for (cplx xr : base_raw) yroots.push_back({newton_polish(c.base, fp, xr), 1});

  const Poly& rn = c.r[static_cast<size_t>(n - 1)];
  auto lam_layer = layer_roots(rn, "top invariant");
  std::vector<LayerRoot> coll_layer;
  if (n == 2) {
    Poly disc = c.r[0] * c.r[0] + rn * cplx(-4.0);
    coll_layer = layer_roots(disc, "lambda discriminant");
    for (const auto& lr : coll_layer)
      if (lr.mult != 1)
        throw DegenerateDiscriminant("lambda discriminant has a repeated root");
  }

  // Cross layer separation: every special x value must be isolated, otherwise
  // two branch mechanisms collide and the local analysis below is wrong.
  std::vector<cplx> specials;
  for (const auto& lr : yroots) specials.push_back(lr.x);
  for (const auto& lr : lam_layer) specials.push_back(lr.x);
  for (const auto& lr : coll_layer) specials.push_back(lr.x);
  scale = point_scale(specials);
  double sep = min_pairwise_distance(specials);
  if (specials.size() > 1 && sep < 1e-6 * scale)
    throw DegenerateDiscriminant("branch values of different layers coincide or nearly coincide");

  for (const auto& lr : yroots)
    c.branch.over_base.push_back({lr.x, BranchPointX::Kind::YRoot, 2 * n});
  for (const auto& lr : lam_layer) {
    if (lr.mult == 1) {
      c.branch.over_base.push_back({lr.x, BranchPointX::Kind::LambdaZero, 2});
      c.branch.over_sigma1.push_back(lr.x);
    } else {
      c.branch.singular.push_back({lr.x});
    }
  }
  for (const auto& lr : coll_layer)
    c.branch.over_base.push_back({lr.x, BranchPointX::Kind::LambdaCollision, 4});

  // Behaviour of lambda at x = infinity. Each branch is modelled as
  // mu = lambda^2 ~ mu_const * x^{mu_order}; both the order and the constant
  // are needed because two branches can share the order and differ only in
  // the constant (square top invariants do exactly that).
  struct BranchModel {
    int mu_order;
    cplx mu_const;
  };
  std::vector<BranchModel> models;
  if (n == 1) {
    models.push_back({c.r[0].degree(), -c.r[0].leading()});
  } else {
    int dp = c.r[0].degree(), dr = rn.degree();
    cplx ptop = (dp >= 0) ? c.r[0].leading() : cplx(0);
    cplx rtop = rn.leading();
    if (2 * dp > dr) {
      models.push_back({dp, -ptop});
      models.push_back({dr - dp, -rtop / ptop});
    } else if (2 * dp == dr) {
      auto cs = quadratic_roots(ptop, rtop);
      if (std::abs(cs[0] - cs[1]) < 1e-3 * (std::abs(cs[0]) + std::abs(cs[1])))
        throw UnsupportedFamily("lambda branches collide at infinity");
      models.push_back({dp, cs[0]});
      models.push_back({dp, cs[1]});
    } else {
      if (dr % 2 != 0)
        throw UnsupportedFamily("lambda branch orders at infinity are not integral");
      cplx s = std::sqrt(-rtop);
      models.push_back({dr / 2, s});
      models.push_back({dr / 2, -s});
    }
  }

  int y_pow = -(2 * g + 1);
  double X0 = 4.0 * scale;
  std::vector<int> model_of;
  for (int attempt = 0;; ++attempt) {
    c.anchor_x = cplx(X0, 0.0);
    c.infinity_fiber = c.fiber(c.anchor_x);
    model_of.assign(c.infinity_fiber.size(), -1);
    std::vector<int> population(models.size(), 0);
    double worst = 0.0;
    for (size_t i = 0; i < c.infinity_fiber.size(); ++i) {
      cplx mu = c.infinity_fiber[i].lam * c.infinity_fiber[i].lam;
      int best = -1;
      double best_err = 1e300;
      for (size_t k = 0; k < models.size(); ++k) {
        cplx pred = models[k].mu_const *
                    std::pow(c.anchor_x, static_cast<double>(models[k].mu_order));
        double err = std::abs(mu - pred) / std::abs(pred);
        if (err < best_err) {
          best_err = err;
          best = static_cast<int>(k);
        }
      }
      model_of[i] = best;
      ++population[static_cast<size_t>(best)];
      worst = std::max(worst, best_err);
    }
    bool balanced = true;
    for (int cnt : population)
      if (cnt != c.sheets / static_cast<int>(models.size())) balanced = false;
    if (balanced && worst < 0.25) break;
    if (attempt >= 8)
      throw UnsupportedFamily("lambda branches at infinity failed to separate numerically");
    X0 *= 2.0;
  }

  cplx z0 = 1.0 / std::sqrt(c.anchor_x);
  int m = static_cast<int>(c.infinity_fiber.size());
  std::vector<int> partner(static_cast<size_t>(m), -1);
  std::vector<int> lam_pow(static_cast<size_t>(m), 0);
  for (int i = 0; i < m; ++i) {
    const auto& germ = c.infinity_fiber[static_cast<size_t>(i)];
    lam_pow[static_cast<size_t>(i)] = -models[static_cast<size_t>(model_of[static_cast<size_t>(i)])].mu_order;
    double sy = -1.0; // y order 2g+1 is odd, so y always flips with z
    double sl = (lam_pow[static_cast<size_t>(i)] % 2 == 0) ? 1.0 : -1.0;
    partner[static_cast<size_t>(i)] =
        match_germ(c.infinity_fiber, sy * germ.y, sl * germ.lam, "the infinity chart partner");
  }
  for (int i = 0; i < m; ++i) {
    if (partner[static_cast<size_t>(i)] == i ||
        partner[static_cast<size_t>(partner[static_cast<size_t>(i)])] != i)
      throw MalformedSpec("infinity chart pairing is not a free involution");
  }
  std::vector<int> orbit_of(static_cast<size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    if (orbit_of[static_cast<size_t>(i)] >= 0) continue;
    InfinityPoint pt;
    pt.id = static_cast<int>(c.infinity.size());
    pt.germs = {i, partner[static_cast<size_t>(i)]};
    pt.y_pow = y_pow;
    pt.lam_pow = lam_pow[static_cast<size_t>(i)];
    const auto& germ = c.infinity_fiber[static_cast<size_t>(i)];
    pt.y_lead = germ.y * std::pow(z0, -y_pow);
    pt.lam_lead = germ.lam * std::pow(z0, -pt.lam_pow);
    orbit_of[static_cast<size_t>(i)] = pt.id;
    orbit_of[static_cast<size_t>(partner[static_cast<size_t>(i)])] = pt.id;
    c.infinity.push_back(pt);
  }
  if (static_cast<int>(c.infinity.size()) != 2 * n)
    throw MalformedSpec("unexpected number of points over x = infinity");
  for (auto& pt : c.infinity) {
    const auto& germ = c.infinity_fiber[static_cast<size_t>(pt.germs[0])];
    int i1 = match_germ(c.infinity_fiber, germ.y, -germ.lam, "the tau1 image at infinity");
    int i2 = match_germ(c.infinity_fiber, -germ.y, -germ.lam, "the tau2 image at infinity");
    pt.tau1_image = orbit_of[static_cast<size_t>(i1)];
    pt.tau2_image = orbit_of[static_cast<size_t>(i2)];
    pt.tau1_fixed = (pt.tau1_image == pt.id);
    pt.tau2_fixed = (pt.tau2_image == pt.id);
  }

  // Genus from the x projection: each simple ramification point contributes
  // one to the total branching B, each infinity point (always of multiplicity
  // two here) one more, and 2 ghat - 2 = B - 2 (number of sheets).
  int B = 0;
  for (const auto& b : c.branch.over_base) B += b.expected_transpositions;
  B += static_cast<int>(c.infinity.size());
  if ((B - 2 * c.sheets) % 2 != 0)
    throw MalformedSpec("total branching has the wrong parity");
  c.genus_hat = (B - 2 * c.sheets + 2) / 2;

  int fixed1 = 2 * static_cast<int>(c.branch.over_sigma1.size());
  int fixed2 = 0;
  for (const auto& pt : c.infinity) {
    if (pt.tau1_fixed) ++fixed1;
    if (pt.tau2_fixed) ++fixed2;
  }
  c.branch.count_2n1 = fixed1;
  c.branch.count_2n2 = fixed2;

  InvolutionType t;
  if (fixed1 % 2 == 0 && fixed2 % 2 == 0) {
    t.n1 = fixed1 / 2;
    t.n2 = fixed2 / 2;
  } else {
    throw MalformedSpec("odd involution fixed point count");
  }
  if (t.n1 == 1 && t.n2 == 1) t.case_id = 1;
  else if (t.n1 == 2 && t.n2 == 0) t.case_id = 2;
  else if (t.n1 == 0 && t.n2 == 2) t.case_id = 3;
  else if (t.n1 == 0 && t.n2 == 0) t.case_id = 4;
  else t.case_id = 0;
  if (t.case_id != 0) {
    int num1 = c.genus_hat + 1 - t.n1;
    int num2 = c.genus_hat + 1 - t.n2;
    if (num1 % 2 != 0 || num2 % 2 != 0) {
      t.case_id = 0;
    } else {
      t.g1 = num1 / 2;
      t.g2 = num2 / 2;
      t.h1 = t.g1 + t.n1 - 1;
      t.h2 = t.g2 + t.n2 - 1;
    }
  }
  c.type = t;

  specials.clear();
  for (cplx x : c.avoid_x()) specials.push_back(x);
  c.frame_rotation = rotation_for(specials);
  return c;
}

const std::vector<BranchPointX>& branch_points(const SpectralCurve& curve) {
  return curve.branch.over_base;
}

InvolutionType classify_pair(const SpectralCurve& curve) {
  if (!curve.has_second_involution)
    throw NoSecondInvolution("odd invariants present, the hyperelliptic flip does not lift");
  if (curve.type.case_id == 0)
    throw NotFirstType("fixed point counts match none of the admissible patterns");
  return curve.type;
}

namespace {

void set_h0(CurveSpec& s, int j, const Poly& f) {
  for (int k = 0; k <= f.degree(); ++k)
    if (std::abs(f.coeff(k)) != 0.0) s.h0_coeffs[{j, k}] = f.coeff(k);
}

std::vector<CatalogEntry> make_catalog() {
  std::vector<CatalogEntry> cat;

  {
    CatalogEntry e;
    e.name = "sl2-g2";
    e.summary = "rank 1 over a genus 2 base, quadratic invariant";
    e.spec.group = Group::SL2;
    e.spec.rank = 1;
    e.spec.base_genus = 2;
    e.spec.base_coeffs = {cplx(-1), cplx(0), cplx(0), cplx(0), cplx(0), cplx(1)};
    set_h0(e.spec, 1, Poly({cplx(-0.4697, -0.1529), cplx(0.46, -0.97), cplx(1)}));
    e.spec.label = e.name;
    e.expected_type = {2, 2, 0, 2, 3, 3, 2};
    e.expected_genus_hat = 5;
    e.expected_finite_branch = 7;
    cat.push_back(e);
  }
  {
    CatalogEntry e;
    e.name = "sl2-g3";
    e.summary = "rank 1 over a genus 3 base, cubic invariant with a double root";
    e.spec.group = Group::SL2;
    e.spec.rank = 1;
    e.spec.base_genus = 3;
    e.spec.base_coeffs = {cplx(-1), cplx(0), cplx(0), cplx(0),
                          cplx(0),  cplx(0), cplx(0), cplx(1)};
    cplx b(0.35, 0.20), cc(-0.60, 0.45);
    set_h0(e.spec, 1, Poly::from_roots({b, b, cc}));
    e.spec.label = e.name;
    e.expected_type = {1, 1, 1, 3, 3, 3, 3};
    e.expected_genus_hat = 6;
    e.expected_finite_branch = 8;
    cat.push_back(e);
  }
  {
    CatalogEntry e;
    e.name = "so4-g2";
    e.summary = "rank 2 orthogonal over a genus 2 base, square top invariant";
    e.spec.group = Group::SO2n;
    e.spec.rank = 2;
    e.spec.base_genus = 2;
    e.spec.base_coeffs = {cplx(-1), cplx(0), cplx(0), cplx(0), cplx(0), cplx(1)};
    Poly p({cplx(-0.25, 0.20), cplx(0.30), cplx(1)});
    Poly q({cplx(0.55), cplx(-0.40), cplx(0.70)});
    set_h0(e.spec, 1, p);
    set_h0(e.spec, 2, q * q);
    e.spec.label = e.name;
    e.expected_type = {4, 0, 0, 7, 7, 6, 6};
    e.expected_genus_hat = 13;
    e.expected_finite_branch = 9;
    cat.push_back(e);
  }
  {
    CatalogEntry e;
    e.name = "sp4-generic";
    e.summary = "rank 2 symplectic over a genus 2 base, simple top invariant";
    e.spec.group = Group::Sp2n;
    e.spec.rank = 2;
    e.spec.base_genus = 2;
    e.spec.base_coeffs = {cplx(-1), cplx(0), cplx(0), cplx(0), cplx(0), cplx(1)};
    Poly p({cplx(-0.25, 0.20), cplx(0.30), cplx(1)});
    Poly q({cplx(0.55), cplx(-0.40), cplx(0.70)});
    set_h0(e.spec, 1, p);
    set_h0(e.spec, 2, q);
    e.spec.label = e.name;
    e.expected_type = {2, 2, 0, 7, 8, 8, 7};
    e.expected_genus_hat = 15;
    e.expected_finite_branch = 11;
    cat.push_back(e);
  }
  {
    CatalogEntry e;
    e.name = "sp4-degenerate";
    e.summary = "rank 2 symplectic, cubic top invariant with a double root";
    e.spec.group = Group::Sp2n;
    e.spec.rank = 2;
    e.spec.base_genus = 2;
    e.spec.base_coeffs = {cplx(-1), cplx(0), cplx(0), cplx(0), cplx(0), cplx(1)};
    Poly p({cplx(-0.25, 0.20), cplx(0.30), cplx(1)});
    cplx d(0.45, -0.30), ee(-0.85, 0.25);
    set_h0(e.spec, 1, p);
    set_h0(e.spec, 2, Poly::from_roots({d, d, ee}));
    e.spec.label = e.name;
    e.expected_type = {1, 1, 1, 7, 7, 7, 7};
    e.expected_genus_hat = 14;
    e.expected_finite_branch = 10;
    cat.push_back(e);
  }
  {
    CatalogEntry e;
    e.name = "kowalewski";
    e.summary = "rigid body curve, classification metadata only";
    e.has_equations = false;
    e.expected_type = {3, 0, 2, 3, 2, 2, 3};
    e.expected_genus_hat = 5;
    e.expected_finite_branch = 0;
    cat.push_back(e);
  }
  return cat;
}

} // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> cat = make_catalog();
  return cat;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw UnsupportedFamily("no catalog entry named '" + name + "'");
}

SpectralCurve catalog_curve(const std::string& name) {
  const CatalogEntry& e = catalog_entry(name);
  if (!e.has_equations)
    throw UnsupportedFamily("catalog entry '" + name + "' carries no defining equations");
  SpectralCurve c = build_curve(e.spec);
  InvolutionType t = classify_pair(c);
  bool ok = t.case_id == e.expected_type.case_id && t.n1 == e.expected_type.n1 &&
            t.n2 == e.expected_type.n2 && t.g1 == e.expected_type.g1 &&
            t.g2 == e.expected_type.g2 && t.h1 == e.expected_type.h1 &&
            t.h2 == e.expected_type.h2 && c.genus_hat == e.expected_genus_hat &&
            static_cast<int>(c.branch.over_base.size()) == e.expected_finite_branch;
  if (!ok)
    throw Error("catalog metadata mismatch for '" + name + "'");
  return c;
}

} // namespace prym
