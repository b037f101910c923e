#include "prym/intmat.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "prym/errors.hpp"

namespace prym {

namespace {

// Guard against silent overflow during the reduction sweeps. Entries of the
// matrices we reduce are tiny; anything this large means a logic error.
void check_magnitude(const IMat& A) {
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      if (std::llabs(A(i, j)) > (1LL << 56))
        throw Error("integer matrix entries overflowed during reduction");
}

ilong nearest_quotient(ilong a, ilong d) {
  // Round a/d to the nearest integer so remainders are at most |d|/2.
  const double q = static_cast<double>(a) / static_cast<double>(d);
  return static_cast<ilong>(std::llround(q));
}

} // namespace

SmithResult smith_normal_form(const IMat& A) {
  const Eigen::Index m = A.rows(), n = A.cols();
  SmithResult r;
  r.S = A;
  r.U = IMat::Identity(m, m);
  r.V = IMat::Identity(n, n);
  IMat& S = r.S;
  IMat& U = r.U;
  IMat& V = r.V;

  const Eigen::Index steps = std::min(m, n);
  Eigen::Index t = 0;
  for (; t < steps; ++t) {
    // Locate the smallest nonzero entry in the trailing block.
    Eigen::Index pi = -1, pj = -1;
    ilong best = 0;
    for (Eigen::Index i = t; i < m; ++i)
      for (Eigen::Index j = t; j < n; ++j)
        if (S(i, j) != 0 && (pi < 0 || std::llabs(S(i, j)) < best)) {
          best = std::llabs(S(i, j));
          pi = i;
          pj = j;
        }
    if (pi < 0) break; // trailing block is zero

    if (pi != t) {
      S.row(pi).swap(S.row(t));
      U.row(pi).swap(U.row(t));
    }
    if (pj != t) {
      S.col(pj).swap(S.col(t));
      V.col(pj).swap(V.col(t));
    }

    bool clean = false;
    while (!clean) {
      clean = true;
      for (Eigen::Index i = t + 1; i < m; ++i) {
        if (S(i, t) == 0) continue;
        const ilong q = nearest_quotient(S(i, t), S(t, t));
        if (q != 0) {
          S.row(i) -= q * S.row(t);
          U.row(i) -= q * U.row(t);
        }
        if (S(i, t) != 0) {
          // Remainder strictly smaller than the pivot; promote it.
          S.row(i).swap(S.row(t));
          U.row(i).swap(U.row(t));
          clean = false;
        }
      }
      for (Eigen::Index j = t + 1; j < n; ++j) {
        if (S(t, j) == 0) continue;
        const ilong q = nearest_quotient(S(t, j), S(t, t));
        if (q != 0) {
          S.col(j) -= q * S.col(t);
          V.col(j) -= q * V.col(t);
        }
        if (S(t, j) != 0) {
          S.col(j).swap(S.col(t));
          V.col(j).swap(V.col(t));
          clean = false;
        }
      }
      if (clean) {
        // Enforce divisibility of the trailing block by the pivot.
        for (Eigen::Index i = t + 1; i < m && clean; ++i)
          for (Eigen::Index j = t + 1; j < n && clean; ++j)
            if (S(i, j) % S(t, t) != 0) {
              S.row(t) += S.row(i);
              U.row(t) += U.row(i);
              clean = false;
            }
      }
      check_magnitude(S);
      check_magnitude(U);
      check_magnitude(V);
    }
    if (S(t, t) < 0) {
      S.row(t) = -S.row(t);
      U.row(t) = -U.row(t);
    }
  }
  r.rank = static_cast<int>(t);
  return r;
}

std::optional<IVec> solve_integer(const IMat& A, const IVec& b) {
  const SmithResult sm = smith_normal_form(A);
  const IVec c = sm.U * b;
  IVec y = IVec::Zero(A.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (i < sm.rank) {
      if (c(i) % sm.S(i, i) != 0) return std::nullopt;
      y(i) = c(i) / sm.S(i, i);
    } else if (c(i) != 0) {
      return std::nullopt;
    }
  }
  return IVec(sm.V * y);
}

IMat integer_kernel(const IMat& A) {
  const SmithResult sm = smith_normal_form(A);
  const Eigen::Index n = A.cols();
  const Eigen::Index k = n - sm.rank;
  IMat basis(n, k);
  for (Eigen::Index j = 0; j < k; ++j) basis.col(j) = sm.V.col(sm.rank + j);
  return basis;
}

SkewSmithResult skew_smith(const IMat& J) {
  const Eigen::Index n = J.rows();
  if (J.cols() != n || (J + J.transpose()).cwiseAbs().maxCoeff() != 0)
    throw Error("skew_smith requires an antisymmetric square matrix");

  SkewSmithResult r;
  IMat B = J;
  r.Q = IMat::Identity(n, n);
  IMat& Q = r.Q;

  // Congruence operations: every row operation is paired with the matching
  // column operation so B stays antisymmetric and equal to Q * J * Q^T.
  auto swap_rc = [&](Eigen::Index a, Eigen::Index b) {
    if (a == b) return;
    B.row(a).swap(B.row(b));
    B.col(a).swap(B.col(b));
    Q.row(a).swap(Q.row(b));
  };
  auto add_rc = [&](Eigen::Index dst, Eigen::Index src, ilong q) {
    if (q == 0) return;
    B.row(dst) += q * B.row(src);
    B.col(dst) += q * B.col(src);
    Q.row(dst) += q * Q.row(src);
  };
  auto place_pivot = [&](Eigen::Index p) {
    // Move the smallest nonzero entry of the trailing block to (p, p+1) and
    // make it positive. Returns false when the block is entirely zero.
    Eigen::Index pi = -1, pj = -1;
    ilong best = 0;
    for (Eigen::Index i = p; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        if (B(i, j) != 0 && (pi < 0 || std::llabs(B(i, j)) < best)) {
          best = std::llabs(B(i, j));
          pi = i;
          pj = j;
        }
    if (pi < 0) return false;
    swap_rc(pi, p);
    if (pj == p) pj = pi; // the first swap moved the partner entry
    swap_rc(pj, p + 1);
    if (B(p, p + 1) < 0) swap_rc(p, p + 1);
    return true;
  };

  Eigen::Index p = 0;
  while (p + 1 < n) {
    if (!place_pivot(p)) break;
    bool clean = false;
    while (!clean) {
      clean = true;
      const ilong d = B(p, p + 1);
      for (Eigen::Index rr = p + 2; rr < n; ++rr) {
        // add_rc(rr, p+1, q) shifts B(p, rr) by q*d and leaves B(p+1, rr)
        // alone since B(p+1, p+1) = 0; the second operation is symmetric.
        if (B(p, rr) != 0) add_rc(rr, p + 1, -nearest_quotient(B(p, rr), d));
        if (B(p, rr) != 0) { clean = false; break; }
        if (B(p + 1, rr) != 0) add_rc(rr, p, nearest_quotient(B(p + 1, rr), d));
        if (B(p + 1, rr) != 0) { clean = false; break; }
      }
      if (!clean) {
        // A remainder smaller than the pivot appeared; re-pivot on it.
        place_pivot(p);
        continue;
      }
      // Divisibility of the trailing block by the current pivot.
      const ilong dd = B(p, p + 1);
      for (Eigen::Index i = p + 2; i < n && clean; ++i)
        for (Eigen::Index j = i + 1; j < n && clean; ++j)
          if (B(i, j) % dd != 0) {
            add_rc(p, i, 1);
            clean = false;
          }
      check_magnitude(B);
      check_magnitude(r.Q);
    }
    r.divisors.push_back(B(p, p + 1));
    p += 2;
  }
  return r;
}

ilong integer_determinant(const IMat& A) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw Error("determinant of a non square matrix");
  if (n == 0) return 1;
  // Fraction free elimination. Intermediates are k by k minors of A, which
  // outgrow 64 bits well before the result does, hence the wide scalar and
  // the explicit guard.
  using wide = __int128;
  const wide limit = wide(1) << 120;
  std::vector<wide> M(static_cast<size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      M[static_cast<size_t>(i * n + j)] = A(i, j);
  auto at = [&](Eigen::Index i, Eigen::Index j) -> wide& {
    return M[static_cast<size_t>(i * n + j)];
  };
  wide sign = 1, prev = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      Eigen::Index s = -1;
      for (Eigen::Index i = k + 1; i < n; ++i)
        if (at(i, k) != 0) { s = i; break; }
      if (s < 0) return 0;
      for (Eigen::Index j = 0; j < n; ++j) std::swap(at(k, j), at(s, j));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j) {
        at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
        if (at(i, j) > limit || at(i, j) < -limit)
          throw Error("determinant intermediates overflowed");
      }
    prev = at(k, k);
  }
  wide det = sign * at(n - 1, n - 1);
  if (det > wide(std::numeric_limits<ilong>::max()) ||
      det < wide(std::numeric_limits<ilong>::min()))
    throw Error("determinant exceeds the 64 bit range");
  return static_cast<ilong>(det);
}

IMat unimodular_inverse(const IMat& U) {
  if (U.rows() != U.cols()) throw Error("inverse of a non square matrix");
  SmithResult s = smith_normal_form(U);
  if (s.rank != U.rows() || !s.S.diagonal().cwiseAbs().isOnes())
    throw Error("matrix is not unimodular");
  // U2 * U * V2 = S with S = diag(+-1), hence U^{-1} = V2 * S * U2.
  IMat inv = s.V * s.S * s.U;
  if (!(inv * U).isIdentity() || !(U * inv).isIdentity())
    throw Error("unimodular inverse failed the identity check");
  return inv;
}

std::optional<IVec> solve_mod2(const IMat& A, const IVec& b) {
  const Eigen::Index rows = A.rows(), cols = A.cols();
  if (b.size() != rows) throw Error("mod 2 solve dimension mismatch");
  std::vector<std::vector<int>> M(static_cast<size_t>(rows));
  for (Eigen::Index i = 0; i < rows; ++i) {
    M[static_cast<size_t>(i)].resize(static_cast<size_t>(cols) + 1);
    for (Eigen::Index j = 0; j < cols; ++j)
      M[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          static_cast<int>(((A(i, j) % 2) + 2) % 2);
    M[static_cast<size_t>(i)][static_cast<size_t>(cols)] =
        static_cast<int>(((b(i) % 2) + 2) % 2);
  }
  std::vector<Eigen::Index> pivot_col;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < cols && row < rows; ++col) {
    Eigen::Index p = -1;
    for (Eigen::Index i = row; i < rows; ++i)
      if (M[static_cast<size_t>(i)][static_cast<size_t>(col)]) { p = i; break; }
    if (p < 0) continue;
    std::swap(M[static_cast<size_t>(p)], M[static_cast<size_t>(row)]);
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == row || !M[static_cast<size_t>(i)][static_cast<size_t>(col)]) continue;
      for (Eigen::Index j = col; j <= cols; ++j)
        M[static_cast<size_t>(i)][static_cast<size_t>(j)] ^=
            M[static_cast<size_t>(row)][static_cast<size_t>(j)];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (Eigen::Index i = row; i < rows; ++i)
    if (M[static_cast<size_t>(i)][static_cast<size_t>(cols)]) return std::nullopt;
  IVec x = IVec::Zero(cols);
  for (Eigen::Index i = 0; i < row; ++i)
    x(pivot_col[static_cast<size_t>(i)]) =
        M[static_cast<size_t>(i)][static_cast<size_t>(cols)];
  return x;
}

void lll_reduce(IMat& B) {
  const Eigen::Index n = B.cols();
  if (n < 2 || B.rows() == 0) return;
  Eigen::MatrixXd bd, star, mu;
  Eigen::VectorXd bb(n);
  auto gram = [&]() {
    bd = B.cast<double>();
    star = bd;
    mu = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) {
        mu(i, j) = (bb(j) <= 0) ? 0.0 : bd.col(i).dot(star.col(j)) / bb(j);
        star.col(i) -= mu(i, j) * star.col(j);
      }
      bb(i) = star.col(i).squaredNorm();
    }
  };
  gram();
  Eigen::Index k = 1;
  // The iteration cap makes termination unconditional; a capped run still
  // returns a basis of the same lattice, just less aggressively shortened.
  for (int guard = 0; guard < 20000 && k < n; ++guard) {
    bool changed = false;
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      ilong q = std::llround(mu(k, j));
      if (q != 0) {
        B.col(k) -= q * B.col(j);
        changed = true;
      }
    }
    if (changed) gram();
    if (bb(k) < (0.99 - mu(k, k - 1) * mu(k, k - 1)) * bb(k - 1)) {
      B.col(k).swap(B.col(k - 1));
      gram();
      k = std::max<Eigen::Index>(1, k - 1);
    } else {
      ++k;
    }
  }
}

} // namespace prym
