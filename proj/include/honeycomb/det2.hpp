#ifndef HONEYCOMB_DET2_HPP
#define HONEYCOMB_DET2_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "honeycomb/common.hpp"
#include "honeycomb/lattice.hpp"
#include "honeycomb/potential.hpp"
#include "honeycomb/spectral.hpp"

namespace honeycomb {

/// det2(I + A) = prod_j (1 + a_j) exp(-a_j) from the eigenvalues a_j of A.
inline cplx det2_of(const std::vector<cplx>& a) {
  cplx p{1.0, 0.0};
  for (const cplx& x : a) p *= (1.0 + x) * std::exp(-x);
  return p;
}

struct Det2Evaluation {
  double mu = 0.0;
  double eps = 0.0;
  SymmetrySector sigma = SymmetrySector::tau;
  int M = 0;
  cplx value{};
  bool shifted = false;  // eps < 0: V_max branch
};

/// mu -> E_sigma(mu, eps) = det2(I - z T) at fixed (sigma, eps, M), with T the inverse of the
/// truncated sector matrix of I - Laplacian + eps V' and V' = V - min V >= 0. For eps < 0
/// the base matrix is shifted by -eps max V' and z = mu' + 1 - eps max V', otherwise
/// z = mu' + 1, where mu' = mu - eps min V.
/// The base matrix does not depend on mu, so its spectrum b_j is computed once and the
/// eigenvalues of A = -z T are -z / b_j.
class Det2Function {
 public:
  Det2Function(const LatticeGeometry& g, const PotentialSpectrum& V, SymmetrySector sigma, double eps,
               int M = default_truncation, int range_grid = 96)
      : sigma_(sigma), eps_(eps), M_(M) {
    std::tie(vmin_, vmax_) = sampled_range(g, V, range_grid);
    const PotentialSpectrum Vs = V.shifted(-vmin_);
    CMat B = assemble_sector(g, Vs, g.K, sigma, eps, M).matrix;
    shifted_ = eps < 0.0;
    base_shift_ = 1.0 + (shifted_ ? -eps * (vmax_ - vmin_) : 0.0);
    B.diagonal().array() += base_shift_;
    b_ = eigenvalues(B, B.rows());
    if (b_.empty() || !(b_.front() > 1e-12 * std::max(1.0, std::abs(b_.back()))))
      throw NumericalError("base operator of the determinant is not invertible");
  }

  double z_of(double mu) const { return mu - eps_ * vmin_ + base_shift_; }

  std::vector<cplx> a_eigenvalues(double mu) const {
    const double z = z_of(mu);
    std::vector<cplx> a;
    a.reserve(b_.size());
    for (double b : b_) a.emplace_back(-z / b, 0.0);
    return a;
  }

  Det2Evaluation operator()(double mu) const {
    return {mu, eps_, sigma_, M_, det2_of(a_eigenvalues(mu)), shifted_};
  }

  double vmin() const { return vmin_; }
  double vmax() const { return vmax_; }

 private:
  SymmetrySector sigma_;
  double eps_;
  int M_;
  double vmin_ = 0.0, vmax_ = 0.0;
  bool shifted_ = false;
  double base_shift_ = 1.0;
  std::vector<double> b_;
};

inline Det2Evaluation evaluate_E(const LatticeGeometry& g, const PotentialSpectrum& V, SymmetrySector sigma,
                                 double mu, double eps, int M = default_truncation) {
  return Det2Function(g, V, sigma, eps, M)(mu);
}

struct Det2Zero {
  double lo = 0.0, hi = 0.0;  // final bracket
  double mu_zero = 0.0;       // bracket midpoint
  double matched_eigenvalue = 0.0;
  double defect = 0.0;        // |mu_zero - matched| / (1 + |matched|)
  bool matched = false;
};

struct ZeroScan {
  std::vector<Det2Zero> zeros;
  std::vector<double> eigenvalues_in_window;  // sector eigensolve
  std::vector<double> unbracketed;            // eigenvalues with no zero
  std::vector<std::pair<double, double>> samples;  // (mu, Re E)
  double match_tol = 1e-8;
  std::string diagnostic;

  bool consistent() const {
    if (!unbracketed.empty() || zeros.size() != eigenvalues_in_window.size()) return false;
    return std::all_of(zeros.begin(), zeros.end(), [](const Det2Zero& z) { return z.matched; });
  }
};

/// Sign changes of E_sigma on a uniform grid over [mu_lo, mu_hi], refined by bisection to
/// width 1e-9 (1 + |mu|), and matched 1-to-1 against the sector eigenvalues in the window.
/// Zeros of even multiplicity produce no sign change and show up as unbracketed eigenvalues.
inline ZeroScan zero_scan(const LatticeGeometry& g, const PotentialSpectrum& V, SymmetrySector sigma,
                          double eps, std::pair<double, double> window, int grid_n,
                          int M = default_truncation, double match_tol = 1e-8) {
  const auto [lo, hi] = window;
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("invalid mu window");
  if (grid_n < 8) throw DomainError("grid_n must be at least 8");
  const Det2Function E(g, V, sigma, eps, M);
  ZeroScan s;
  s.match_tol = match_tol;

  auto val = [&](double mu) { return E(mu).value.real(); };
  const auto vals = parallel_map(std::size_t(grid_n) + 1, [&](std::size_t i) {
    const double mu = lo + (hi - lo) * double(i) / grid_n;
    return std::pair{mu, val(mu)};
  });
  s.samples = vals;

  for (int i = 0; i < grid_n; ++i) {
    double a = vals[i].first, b = vals[i + 1].first;
    double fa = vals[i].second, fb = vals[i + 1].second;
    if (fa == 0.0) {
      // exact zero on a grid node: record it once
      s.zeros.push_back({a, a, a});
      continue;
    }
    if (fa * fb >= 0.0) continue;
    while (b - a > 1e-9 * (1.0 + std::abs(0.5 * (a + b)))) {
      const double c = 0.5 * (a + b);
      const double fc = val(c);
      if (fc == 0.0) {
        a = b = c;
        break;
      }
      if ((fc < 0.0) == (fa < 0.0)) {
        a = c;
        fa = fc;
      } else {
        b = c;
      }
    }
    s.zeros.push_back({a, b, 0.5 * (a + b)});
  }
  if (vals.back().second == 0.0) s.zeros.push_back({hi, hi, hi});

  const auto spec = sector_spectrum(g, V, g.K, sigma, eps, M);
  for (double x : spec)
    if (x >= lo && x <= hi) s.eigenvalues_in_window.push_back(x);

  std::vector<bool> used(s.eigenvalues_in_window.size(), false);
  for (auto& z : s.zeros) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    for (std::size_t i = 0; i < s.eigenvalues_in_window.size(); ++i) {
      const double d = std::abs(z.mu_zero - s.eigenvalues_in_window[i]);
      if (!used[i] && d < best) {
        best = d;
        bi = i;
      }
    }
    if (std::isfinite(best)) {
      z.matched_eigenvalue = s.eigenvalues_in_window[bi];
      z.defect = best / (1.0 + std::abs(z.matched_eigenvalue));
      z.matched = z.defect <= match_tol;
      if (z.matched) used[bi] = true;
    }
  }
  for (std::size_t i = 0; i < used.size(); ++i)
    if (!used[i]) s.unbracketed.push_back(s.eigenvalues_in_window[i]);
  if (!s.consistent())
    s.diagnostic = std::to_string(s.zeros.size()) + " zeros vs " +
                   std::to_string(s.eigenvalues_in_window.size()) + " eigenvalues; " +
                   std::to_string(s.unbracketed.size()) + " eigenvalues unbracketed";
  return s;
}

}  // namespace honeycomb

#endif  // HONEYCOMB_DET2_HPP
