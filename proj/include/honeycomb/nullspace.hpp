#ifndef HONEYCOMB_NULLSPACE_HPP
#define HONEYCOMB_NULLSPACE_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "honeycomb/common.hpp"

namespace honeycomb {

struct GammaResult {
  int j = 0;  // deleted row, 0-based
  int k = 0;  // deleted column, 0-based
  CVec vector;
  cplx subdet{};  // det A^(j,k)
};

/// A with row j and column k removed.
inline CMat minor_matrix(const CMat& A, int j, int k) {
  const Eigen::Index n = A.rows();
  CMat m(n - 1, n - 1);
  for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
    if (r == j) continue;
    for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
      if (c == k) continue;
      m(rr, cc++) = A(r, c);
    }
    ++rr;
  }
  return m;
}

/// Nullvector candidate built from the (j, k) minor: v_k = (det A^(j,k))^2 and the other
/// coordinates solve A^(j,k) v' = -(column k of A without row j) (det A^(j,k))^2.
/// Every component is a polynomial of degree 2N-2 in the entries of A. The vector is
/// zero when the minor is singular to working precision.
inline GammaResult gamma_jk(const CMat& A, int j, int k) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || n < 1) throw DomainError("gamma_jk needs a non-empty square matrix");
  if (j < 0 || k < 0 || j >= n || k >= n) throw DomainError("gamma_jk index out of range");
  GammaResult g{j, k, CVec::Zero(n), cplx{1.0, 0.0}};
  if (n == 1) {
    g.vector(0) = 1.0;
    return g;
  }
  const CMat m = minor_matrix(A, j, k);
  Eigen::FullPivLU<CMat> lu(m);
  g.subdet = lu.determinant();
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if (std::abs(g.subdet) <= 1e-13 * std::pow(scale, double(n - 1)) || !lu.isInvertible()) {
    g.subdet = 0.0;
    return g;
  }
  const cplx d2 = g.subdet * g.subdet;
  CVec rhs(n - 1);
  for (Eigen::Index r = 0, rr = 0; r < n; ++r)
    if (r != j) rhs(rr++) = -A(r, k) * d2;
  const CVec sol = lu.solve(rhs);
  for (Eigen::Index c = 0, cc = 0; c < n; ++c) g.vector(c) = c == k ? d2 : sol(cc++);
  return g;
}

/// The Gamma_jk of largest norm for a rank N-1 matrix. The choice is not continuous in A.
/// Rank N-1 is checked from the singular values: the smallest must be below
/// rank_tol * s_max and the next one above it.
inline CVec best_nullvector(const CMat& A, double rank_tol = 1e-8) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || n < 1) throw DomainError("best_nullvector needs a non-empty square matrix");
  if (n > 1) {
    Eigen::JacobiSVD<CMat> svd(A);
    const auto& s = svd.singularValues();
    const double smax = s(0);
    if (!(smax > 0.0) || s(n - 1) > rank_tol * smax || s(n - 2) <= rank_tol * smax)
      throw DomainError("matrix is not of rank N-1 (singular values do not show a single null direction)");
  }
  CVec best;
  double bn = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      auto g = gamma_jk(A, j, k);
      const double nv = g.vector.norm();
      if (nv > bn) {
        bn = nv;
        best = std::move(g.vector);
      }
    }
  if (bn == 0.0) throw NumericalError("all Gamma_jk vanish; the rank N-1 assumption is violated");
  return best;
}

/// The rank-one family A(v) = conj(v) (J v)^T with J = [[0, 1], [-1, 0]]; A(v) v = 0.
inline CMat rank_one_family(const CVec& v) {
  if (v.size() != 2) throw DomainError("rank_one_family is defined for 2-vectors");
  CVec Jv(2);
  Jv << v(1), -v(0);
  return v.conjugate() * Jv.transpose();
}

/// Sine of the angle between two complex lines, from the part of b orthogonal to a.
inline double line_sine(const CVec& a, const CVec& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  const CVec u = a / na, w = b / nb;
  return std::min(1.0, (w - u * u.dot(w)).norm());
}

}  // namespace honeycomb

#endif  // HONEYCOMB_NULLSPACE_HPP
