#ifndef HONEYCOMB_PERTURB_HPP
#define HONEYCOMB_PERTURB_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "honeycomb/common.hpp"
#include "honeycomb/dirac.hpp"
#include "honeycomb/lattice.hpp"
#include "honeycomb/potential.hpp"
#include "honeycomb/spectral.hpp"

namespace honeycomb {

// ---------------------------------------------------------------------------
// Small-eps splitting of the free triple eigenvalue |K|^2

struct SplitPrediction {
  double mu_double_1st = 0.0;  // |K|^2 + eps (V00 - V11)
  double mu_simple_1st = 0.0;  // |K|^2 + eps (V00 + 2 V11)
  std::pair<int, int> crossing_case{1, 2};  // bands carrying the double eigenvalue
};

inline SplitPrediction split_prediction(const LatticeGeometry& g, const PotentialSpectrum& V, double eps) {
  if (!V.is_honeycomb()) throw SymmetryError("splitting formulas require a honeycomb potential");
  const double K2 = g.K.squaredNorm();
  const double V00 = V[{0, 0}].real();
  const double V11 = coefficient_V11(V);
  SplitPrediction p;
  p.mu_double_1st = K2 + eps * (V00 - V11);
  p.mu_simple_1st = K2 + eps * (V00 + 2.0 * V11);
  p.crossing_case = eps * V11 > 0.0 ? std::pair{1, 2} : std::pair{2, 3};
  return p;
}

struct SplitRow {
  double eps = 0.0;
  double measured_double = 0.0;
  double measured_simple = 0.0;
  double defect_double = 0.0;
  double defect_simple = 0.0;
};

struct SplitTable {
  std::vector<SplitRow> rows;  // in the order given
  // Observed exponents log(d_j+1/d_j) / log(eps_j+1/eps_j) between consecutive rows
  // sorted by |eps|, for the double and the simple eigenvalue.
  std::vector<double> exponent_double;
  std::vector<double> exponent_simple;
  std::string diagnostic;
};

/// Measures the lowest tau-sector (double) and sector-1 (simple) eigenvalues at K for each
/// eps and compares them with the first-order predictions.
inline SplitTable verify_split(const LatticeGeometry& g, const PotentialSpectrum& V,
                               const std::vector<double>& eps_list, int M = default_truncation) {
  SplitTable t;
  t.rows = parallel_map(eps_list.size(), [&](std::size_t i) {
    const double eps = eps_list[i];
    const auto p = split_prediction(g, V, eps);
    const auto st = sector_spectrum(g, V, g.K, SymmetrySector::tau, eps, M);
    const auto sb = sector_spectrum(g, V, g.K, SymmetrySector::tau_bar, eps, M);
    const auto s1 = sector_spectrum(g, V, g.K, SymmetrySector::one, eps, M);
    if (std::abs(st[0] - sb[0]) > degeneracy_threshold(st[0]))
      throw NumericalError("tau and tau-bar ground levels differ; the double eigenvalue is misidentified");
    SplitRow r;
    r.eps = eps;
    r.measured_double = st[0];
    r.measured_simple = s1[0];
    r.defect_double = std::abs(r.measured_double - p.mu_double_1st);
    r.defect_simple = std::abs(r.measured_simple - p.mu_simple_1st);
    return r;
  });
  auto sorted = t.rows;
  std::sort(sorted.begin(), sorted.end(),
            [](const SplitRow& a, const SplitRow& b) { return std::abs(a.eps) < std::abs(b.eps); });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    const auto& a = sorted[i];
    const auto& b = sorted[i + 1];
    if (a.eps == 0.0 || std::abs(b.eps) == std::abs(a.eps)) continue;
    const double le = std::log(std::abs(b.eps / a.eps));
    t.exponent_double.push_back(std::log(b.defect_double / a.defect_double) / le);
    t.exponent_simple.push_back(std::log(b.defect_simple / a.defect_simple) / le);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Deformations eps V + eta W

/// |cell| sum_{n, n'} conj(A(n)) W_{n - n'} B(n') for plane-wave coefficient maps.
inline cplx inner_product_W(const LatticeGeometry& g, const std::map<FourierIndex, cplx>& A,
                            const std::map<FourierIndex, cplx>& B, const PotentialSpectrum& W) {
  cplx s{};
  for (const auto& [np, b] : B) {
    for (const auto& [p, w] : W.coeffs()) {
      auto it = A.find(np + p);
      if (it != A.end()) s += std::conj(it->second) * w * b;
    }
  }
  return g.cell_area * s;
}

enum class WParity { even, non_even };

inline const char* to_string(WParity p) { return p == WParity::even ? "even" : "non-even"; }

struct DeformationReport {
  double eta = 0.0;
  WParity W_parity = WParity::even;
  Vec2 K_star = Vec2::Zero();
  Vec2 K_shifted = Vec2::Zero();
  Vec2 K_first_order = Vec2::Zero();
  double shift_defect = 0.0;   // |K_shifted - K_first_order|
  double gap_at_optimum = 0.0;
  double gap_at_first_order = 0.0;
  double predicted_gap = 0.0;
  double mu_at_optimum = 0.0;  // midpoint of the two bands at K_shifted
  double mu_first_order = 0.0; // mu* + eta <Phi1, W Phi1>
  int band_lo = 0;             // 1-based
  int band_hi = 0;
  int iterations = 0;
  bool converged = false;
  std::string diagnostic;
};

struct DeformationOptions {
  double trust_factor = 0.1;  // trust radius = trust_factor * q * |eta|
  double step_tol = 1e-10;    // in units of q
  int max_iter = 4000;
};

namespace detail {

struct GapProblem {
  const LatticeGeometry* g;
  const PotentialSpectrum* U;  // eps V + eta W, already combined
  int M;
  int lo, hi;  // 0-based
  Vec2 center;
  double radius;
};

inline std::pair<double, double> band_pair(const GapProblem& p, const Vec2& k) {
  const auto e = eigenvalues(assemble_full(*p.g, *p.U, k, 1.0, p.M).matrix, p.hi + 1);
  return {e[p.lo], e[p.hi]};
}

// Squared gap, which is smooth through a conical touching; outside the trust
// region the value grows with the excursion so the simplex is pushed back.
inline double gap_objective(const gsl_vector* x, void* params) {
  const auto& p = *static_cast<const GapProblem*>(params);
  const Vec2 k(gsl_vector_get(x, 0), gsl_vector_get(x, 1));
  const auto [a, b] = band_pair(p, k);
  const double gap = b - a;
  const double out = (k - p.center).norm() - p.radius;
  return gap * gap + (out > 0.0 ? 1e6 * out * out * (1.0 + gap * gap) + 1.0 : 0.0);
}

struct MinResult {
  Vec2 k;
  int iterations = 0;
  bool converged = false;
};

inline MinResult minimize_gap(GapProblem& p, const Vec2& seed, double step_tol) {
  const gsl_multimin_fminimizer_type* T = gsl_multimin_fminimizer_nmsimplex2;
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(T, 2);
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, seed.x());
  gsl_vector_set(x, 1, seed.y());
  gsl_vector_set_all(step, 0.25 * p.radius);
  gsl_multimin_function f{&gap_objective, 2, &p};
  gsl_multimin_fminimizer_set(s, &f, x, step);

  MinResult r;
  int status = GSL_CONTINUE;
  const int max_iter = 4000;
  while (status == GSL_CONTINUE && r.iterations < max_iter) {
    ++r.iterations;
    if (gsl_multimin_fminimizer_iterate(s)) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), step_tol);
  }
  r.converged = status == GSL_SUCCESS;
  r.k = Vec2(gsl_vector_get(s->x, 0), gsl_vector_get(s->x, 1));
  gsl_vector_free(step);
  gsl_vector_free(x);
  gsl_multimin_fminimizer_free(s);
  return r;
}

inline DeformationReport deform_impl(const LatticeGeometry& g, const PotentialSpectrum& V,
                                     double eps, const PotentialSpectrum& W, double eta, int M,
                                     WParity parity, const DeformationOptions& opt) {
  gsl_set_error_handler_off();
  const DiracReport base = detect_dirac(g, V, eps, M);
  if (!base.verdict()) throw DomainError("unperturbed problem has no Dirac point: " + base.diagnostic);

  const auto phi1 = expand_sector(base.table, SymmetrySector::tau, base.coeffs);
  const auto phi2 = conj_reflect(phi1);
  const cplx w11 = inner_product_W(g, phi1, phi1, W);
  const cplx w12 = inner_product_W(g, phi1, phi2, W);
  const cplx K1 = -w12 / std::conj(base.lambda_sharp);

  DeformationReport r;
  r.eta = eta;
  r.W_parity = parity;
  r.K_star = base.K_star;
  r.band_lo = base.band_lo;
  r.band_hi = base.band_hi;
  r.K_first_order = base.K_star + eta * Vec2(K1.real(), K1.imag());
  r.mu_first_order = base.mu_star + eta * w11.real();
  if (parity == WParity::non_even)
    r.predicted_gap = 2.0 * std::abs(eta) * std::abs(inner_product_W(g, phi1, phi1, W.odd_part()));

  const PotentialSpectrum U = V.scaled(eps).plus(W, eta);
  GapProblem p{&g, &U, M, base.band_lo - 1, base.band_hi - 1, base.K_star,
               opt.trust_factor * g.q * std::abs(eta)};
  {
    const auto [a, b] = band_pair(p, r.K_first_order);
    r.gap_at_first_order = b - a;
  }
  if (eta == 0.0) {
    r.K_shifted = base.K_star;
    r.converged = true;
  } else {
    const auto m = minimize_gap(p, base.K_star, opt.step_tol * g.q);
    r.K_shifted = m.k;
    r.iterations = m.iterations;
    r.converged = m.converged;
    if (!m.converged) r.diagnostic = "gap minimizer did not reach the step tolerance";
    if ((m.k - base.K_star).norm() > p.radius * (1.0 - 1e-6))
      r.diagnostic = "gap minimum lies on the trust-region boundary";
  }
  const auto [a, b] = band_pair(p, r.K_shifted);
  r.gap_at_optimum = b - a;
  r.mu_at_optimum = 0.5 * (a + b);
  r.shift_defect = (r.K_shifted - r.K_first_order).norm();
  return r;
}

}  // namespace detail

/// Locates the shifted Dirac point of eps V + eta W for an even W by minimizing the gap
/// between the two crossing bands near K, and compares it with the first-order shift
/// K + eta K1, where conj(lambda_sharp) (K1_x + i K1_y) = -<Phi1, W Phi2>.
inline DeformationReport deform_even(const LatticeGeometry& g, const PotentialSpectrum& V, double eps,
                                     const PotentialSpectrum& W, double eta, int M = default_truncation,
                                     const DeformationOptions& opt = {}) {
  if (!W.is_real_valued()) throw SymmetryError("deformation W must be real-valued");
  if (!W.is_even()) throw SymmetryError("deform_even requires an even W");
  auto r = detail::deform_impl(g, V, eps, W, eta, M, WParity::even, opt);
  const double floor = 1e-9 * (1.0 + std::abs(r.mu_at_optimum));
  if (r.gap_at_optimum > std::max(floor, 10.0 * eta * eta) && r.diagnostic.empty())
    r.diagnostic = "gap does not close to O(eta^2)";
  return r;
}

/// Gap opened by a W without inversion symmetry. The predicted minimal gap is
/// 2 |eta| |<Phi1, W_odd Phi1>|. Falls back to deform_even when the odd part vanishes.
inline DeformationReport deform_odd_gap(const LatticeGeometry& g, const PotentialSpectrum& V, double eps,
                                        const PotentialSpectrum& W, double eta,
                                        int M = default_truncation, const DeformationOptions& opt = {}) {
  if (!W.is_real_valued()) throw SymmetryError("deformation W must be real-valued");
  if (W.is_even()) return deform_even(g, V, eps, W, eta, M, opt);
  return detail::deform_impl(g, V, eps, W, eta, M, WParity::non_even, opt);
}

}  // namespace honeycomb

#endif  // HONEYCOMB_PERTURB_HPP
