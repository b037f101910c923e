#include "prym/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "prym/errors.hpp"

namespace prym {

namespace {
constexpr double kTrimTol = 0.0; // exact zeros only; callers decide about noise
}

Poly::Poly(std::vector<cplx> ascending_coeffs) : c_(std::move(ascending_coeffs)) {
  while (!c_.empty() && std::abs(c_.back()) <= kTrimTol) c_.pop_back();
}

Poly::Poly(std::initializer_list<cplx> ascending_coeffs)
    : Poly(std::vector<cplx>(ascending_coeffs)) {}

Poly Poly::from_roots(const std::vector<cplx>& roots, cplx leading) {
  std::vector<cplx> c{leading};
  for (cplx r : roots) {
    c.push_back(0.0);
    for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k)
      c[static_cast<size_t>(k)] = c[static_cast<size_t>(k) - 1] - r * c[static_cast<size_t>(k)];
    c[0] *= -r;
  }
  return Poly(std::move(c));
}

Poly Poly::monomial(int degree, cplx coeff) {
  std::vector<cplx> c(static_cast<size_t>(degree) + 1, cplx(0.0));
  c.back() = coeff;
  return Poly(std::move(c));
}

cplx Poly::coeff(int k) const {
  if (k < 0 || k >= static_cast<int>(c_.size())) return 0.0;
  return c_[static_cast<size_t>(k)];
}

cplx Poly::leading() const {
  if (c_.empty()) return 0.0;
  return c_.back();
}

cplx Poly::operator()(cplx x) const {
  cplx acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly();
  std::vector<cplx> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * cplx(static_cast<double>(k));
  return Poly(std::move(d));
}

Poly Poly::operator+(const Poly& o) const {
  std::vector<cplx> c(std::max(c_.size(), o.c_.size()), cplx(0.0));
  for (size_t k = 0; k < c_.size(); ++k) c[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) c[k] += o.c_[k];
  return Poly(std::move(c));
}

Poly Poly::operator-(const Poly& o) const {
  std::vector<cplx> c(std::max(c_.size(), o.c_.size()), cplx(0.0));
  for (size_t k = 0; k < c_.size(); ++k) c[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) c[k] -= o.c_[k];
  return Poly(std::move(c));
}

Poly Poly::operator*(const Poly& o) const {
  if (is_zero() || o.is_zero()) return Poly();
  std::vector<cplx> c(c_.size() + o.c_.size() - 1, cplx(0.0));
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) c[i + j] += c_[i] * o.c_[j];
  return Poly(std::move(c));
}

Poly Poly::operator*(cplx s) const {
  std::vector<cplx> c = c_;
  for (auto& v : c) v *= s;
  return Poly(std::move(c));
}

std::vector<cplx> Poly::roots() const {
  const int n = degree();
  if (n < 1) throw MalformedSpec("root finding needs degree >= 1");
  if (n == 1) return {-c_[0] / c_[1]};
  CMat companion = CMat::Zero(n, n);
  const cplx lead = c_.back();
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -c_[static_cast<size_t>(i)] / lead;
  Eigen::ComplexEigenSolver<CMat> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw DegenerateDiscriminant("companion eigenvalue iteration failed");
  std::vector<cplx> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = es.eigenvalues()(i);
  // One Newton step per root sharpens the companion eigenvalues noticeably
  // for the moderately clustered configurations we feed in.
  const Poly d = derivative();
  for (auto& r : out) {
    for (int it = 0; it < 2; ++it) {
      const cplx fp = d(r);
      if (std::abs(fp) < 1e-300) break;
      const cplx step = (*this)(r) / fp;
      if (!std::isfinite(std::abs(step))) break;
      r -= step;
    }
  }
  return out;
}

std::vector<ClusteredRoot> cluster_points(const std::vector<cplx>& pts, double rel_tol) {
  std::vector<ClusteredRoot> out;
  if (pts.empty()) return out;
  double spread = 0.0;
  for (cplx p : pts) spread = std::max(spread, std::abs(p));
  const double tol = std::max(spread, 1.0) * rel_tol;
  std::vector<bool> used(pts.size(), false);
  for (size_t i = 0; i < pts.size(); ++i) {
    if (used[i]) continue;
    cplx sum = pts[i];
    int count = 1;
    used[i] = true;
    for (size_t j = i + 1; j < pts.size(); ++j) {
      if (!used[j] && std::abs(pts[j] - pts[i]) <= tol) {
        sum += pts[j];
        ++count;
        used[j] = true;
      }
    }
    out.push_back({sum / cplx(static_cast<double>(count)), count});
  }
  return out;
}

double min_pairwise_distance(const std::vector<cplx>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      best = std::min(best, std::abs(pts[i] - pts[j]));
  return best;
}

} // namespace prym
