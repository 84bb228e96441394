#ifndef HONEYCOMB_DIRAC_HPP
#define HONEYCOMB_DIRAC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "honeycomb/common.hpp"
#include "honeycomb/lattice.hpp"
#include "honeycomb/potential.hpp"
#include "honeycomb/spectral.hpp"

namespace honeycomb {

/// Cone coefficient 3 |cell| sum_m c(m)^2 (1, i).K^m over orbit representatives.
/// `coeffs` are the tau-sector coefficients of a unit-norm eigenfunction.
inline cplx lambda_sharp(const LatticeGeometry& g, const Vec2& K_star,
                         const std::vector<FourierIndex>& reps, const CVec& coeffs) {
  cplx s{};
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const Vec2 Km = kvec_of_index(g, K_star, reps[i]);
    const cplx c = coeffs(static_cast<Eigen::Index>(i));
    s += c * c * cplx(Km.x(), Km.y());
  }
  return 3.0 * g.cell_area * s;
}

/// <A, kappa.grad B> for functions given by plane-wave coefficients around K_star.
inline cplx gradient_matrix_element(const LatticeGeometry& g, const Vec2& K_star,
                                    const std::map<FourierIndex, cplx>& A,
                                    const std::map<FourierIndex, cplx>& B, const Vec2& kappa) {
  cplx s{};
  for (const auto& [n, b] : B) {
    auto it = A.find(n);
    if (it == A.end()) continue;
    s += std::conj(it->second) * b * kappa.dot(kvec_of_index(g, K_star, n));
  }
  return cplx(0.0, 1.0) * g.cell_area * s;
}

/// Plane-wave coefficients of Phi2(x) = conj(Phi1(-x)): the same index set, conjugated.
inline std::map<FourierIndex, cplx> conj_reflect(const std::map<FourierIndex, cplx>& phi) {
  std::map<FourierIndex, cplx> out;
  for (const auto& [n, c] : phi) out[n] = std::conj(c);
  return out;
}

struct M0Elements {
  cplx diag;     // <Phi1, kappa.grad Phi1>
  cplx offdiag;  // 2i <Phi1, kappa.grad Phi2>
};

inline M0Elements matrix_elements_M0(const LatticeGeometry& g, const Vec2& K_star,
                                     const CycleTable& table, const CVec& coeffs_tau,
                                     const Vec2& kappa) {
  const auto phi1 = expand_sector(table, SymmetrySector::tau, coeffs_tau);
  const auto phi2 = conj_reflect(phi1);
  return {gradient_matrix_element(g, K_star, phi1, phi1, kappa),
          cplx(0.0, 2.0) * gradient_matrix_element(g, K_star, phi1, phi2, kappa)};
}

// ---------------------------------------------------------------------------

struct ConeFit {
  Vec2 direction = Vec2::UnitX();
  std::vector<double> radii;  // ascending
  std::vector<double> slopes_plus;
  std::vector<double> slopes_minus;
  double extrapolated_slope = 0.0;
  double extrapolated_plus = 0.0;
  double extrapolated_minus = 0.0;
  std::vector<double> even_part;  // mu+ + mu- - 2 mu*, per radius
};

enum class DiracStatus { ok, exceptional_epsilon, degenerate_lambda, no_pair, cone_mismatch };

inline const char* to_string(DiracStatus s) {
  switch (s) {
    case DiracStatus::ok: return "ok";
    case DiracStatus::exceptional_epsilon: return "exceptional_epsilon";
    case DiracStatus::degenerate_lambda: return "degenerate_lambda";
    case DiracStatus::no_pair: return "no_pair";
    case DiracStatus::cone_mismatch: return "cone_mismatch";
  }
  return "?";
}

struct DiracTolerances {
  double lambda_threshold = 1e-6;  // minimum |lambda_sharp|
  double pair_match = 1e-9;        // tau vs tau-bar, relative to 1 + |mu|
  double slope_match = 5e-3;       // |extrapolated - |lambda|| / |lambda|
  double isotropy = 1e-2;          // spread of extrapolated slopes / mean
  double sector_one_window = 10.0; // in units of q^2 above mu*
};

struct DiracReport {
  Vec2 K_star = Vec2::Zero();
  double epsilon = 0.0;
  int M = 0;
  double mu_star = 0.0;
  cplx lambda_sharp{};
  int band_lo = 0;  // 1-based
  int band_hi = 0;
  double separation = 0.0;  // distance from mu* to the nearest other eigenvalue at K_star
  CycleTable table;
  CVec coeffs;  // normalized tau-sector eigenvector, phase fixed
  std::vector<ConeFit> fits;
  double max_anisotropy = 0.0;
  double max_slope_defect = 0.0;
  DiracStatus status = DiracStatus::no_pair;
  std::string diagnostic;
  DiracTolerances tolerances;

  bool verdict() const { return status == DiracStatus::ok; }
};

/// Locates the Dirac pair at K_star from the three sector problems. The tau eigenvalue
/// at position `level` (0 = lowest) must be tau-simple, reappear in the tau-bar sector,
/// and stay clear of the sector-1 spectrum. Failures are reported through `status`.
inline DiracReport detect_dirac(const LatticeGeometry& g, const PotentialSpectrum& V, double eps,
                                int M = default_truncation, const Vec2& K_star_in = Vec2::Constant(std::numeric_limits<double>::quiet_NaN()),
                                int level = 0, DiracTolerances tol = {}) {
  const Vec2 K_star = K_star_in.allFinite() ? K_star_in : g.K;
  DiracReport r;
  r.K_star = K_star;
  r.epsilon = eps;
  r.M = M;
  r.tolerances = tol;

  const auto H_tau = assemble_sector(g, V, K_star, SymmetrySector::tau, eps, M);
  const auto sol_tau = solve(H_tau, H_tau.dimension());
  const auto spec_bar = sector_spectrum(g, V, K_star, SymmetrySector::tau_bar, eps, M);
  const auto spec_one = sector_spectrum(g, V, K_star, SymmetrySector::one, eps, M);
  r.table = H_tau.sector->table;

  const auto& ev = sol_tau.eigenvalues;
  if (level < 0 || level + 1 >= static_cast<int>(ev.size())) {
    r.diagnostic = "requested tau level out of range";
    return r;
  }
  const double mu = ev[level];
  r.mu_star = mu;
  r.coeffs = normalize_sector_coeffs(g, sol_tau.eigenvectors.col(level));
  fix_phase(r.coeffs);
  r.lambda_sharp = lambda_sharp(g, K_star, r.table.representatives, r.coeffs);

  // Band position: count every eigenvalue of the union strictly below the pair.
  int below = 0;
  for (const auto* spec : {&ev, &spec_bar, &spec_one})
    for (double x : *spec)
      if (x < mu - degeneracy_threshold(mu)) ++below;
  r.band_lo = below + 1;
  r.band_hi = below + 2;

  double sep = std::numeric_limits<double>::infinity();
  auto near = [&](double x) { return std::abs(x - mu); };
  for (int i = 0; i < static_cast<int>(ev.size()); ++i)
    if (i != level) sep = std::min(sep, near(ev[i]));
  std::optional<std::size_t> partner;
  for (std::size_t i = 0; i < spec_bar.size(); ++i) {
    if (near(spec_bar[i]) <= tol.pair_match * (1.0 + std::abs(mu)) && !partner) partner = i;
    else sep = std::min(sep, near(spec_bar[i]));
  }
  double sep_one = std::numeric_limits<double>::infinity();
  for (double x : spec_one)
    if (x <= mu + tol.sector_one_window * g.q * g.q) sep_one = std::min(sep_one, near(x));
  sep = std::min(sep, sep_one);
  r.separation = sep;

  const double thr = degeneracy_threshold(mu);
  if (level > 0 && near(ev[level - 1]) <= thr) {
    r.diagnostic = "tau eigenvalue is not simple within the tau sector";
  } else if (near(ev[level + 1]) <= thr) {
    r.diagnostic = "tau eigenvalue is not simple within the tau sector";
  } else if (!partner) {
    r.diagnostic = "no matching tau-bar eigenvalue";
  } else if (sep_one <= thr) {
    r.status = DiracStatus::exceptional_epsilon;
    r.diagnostic = "mu* is also a sector-1 eigenvalue (multiplicity three); epsilon is exceptional";
  } else if (std::abs(r.lambda_sharp) <= tol.lambda_threshold) {
    r.status = DiracStatus::degenerate_lambda;
    r.diagnostic = "|lambda_sharp| below threshold; cone is degenerate";
  } else {
    r.status = DiracStatus::ok;
  }
  return r;
}

/// Least-squares line through (x_i, y_i); returns the intercept at x = 0.
inline double linear_extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n == 1) return y[0];
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return (sy - slope * sx) / n;
}

/// Default radius ladder: the largest radius keeps |lambda| r at 1% of the gap to the
/// nearest non-Dirac eigenvalue, and never exceeds 1e-2 q.
inline std::vector<double> default_radii(const LatticeGeometry& g, const DiracReport& r) {
  double r0 = 1e-2 * g.q;
  const double lam = std::abs(r.lambda_sharp);
  if (lam > 0.0 && std::isfinite(r.separation)) r0 = std::min(r0, 1e-2 * r.separation / lam);
  return {r0 / 4.0, r0 / 2.0, r0};
}

/// Cone slopes from direct eigensolves at K_star + r u along each direction, with
/// first-order extrapolation r -> 0. Updates the report's status.
inline void fit_cone(const LatticeGeometry& g, const PotentialSpectrum& V, DiracReport& r,
                     const std::vector<Vec2>& directions, std::vector<double> radii = {}) {
  if (r.status != DiracStatus::ok && r.status != DiracStatus::cone_mismatch)
    throw DomainError("cone fit requires a detected Dirac point: " + r.diagnostic);
  if (radii.empty()) radii = default_radii(g, r);
  std::sort(radii.begin(), radii.end());
  const int lo = r.band_lo - 1;
  const int hi = r.band_hi - 1;

  const auto at_K = eigenvalues(assemble_full(g, V, r.K_star, r.epsilon, r.M).matrix, hi + 1);
  if (std::abs(at_K[hi] - at_K[lo]) > 1e-7 * (1.0 + std::abs(r.mu_star)))
    throw NumericalError("bands " + std::to_string(r.band_lo) + "," + std::to_string(r.band_hi) +
                         " are not degenerate in the full problem; band indices do not bracket the pair");
  const double mu0 = 0.5 * (at_K[lo] + at_K[hi]);

  const std::size_t nr = radii.size();
  const auto spectra = parallel_map(directions.size() * nr, [&](std::size_t i) {
    const Vec2 u = directions[i / nr].normalized();
    const Vec2 k = r.K_star + radii[i % nr] * u;
    return eigenvalues(assemble_full(g, V, k, r.epsilon, r.M).matrix, hi + 1);
  });

  r.fits.clear();
  const double lam = std::abs(r.lambda_sharp);
  double smin = std::numeric_limits<double>::infinity(), smax = 0.0, ssum = 0.0;
  r.max_slope_defect = 0.0;
  for (std::size_t d = 0; d < directions.size(); ++d) {
    ConeFit f;
    f.direction = directions[d].normalized();
    f.radii = radii;
    std::vector<double> mean;
    for (std::size_t j = 0; j < nr; ++j) {
      const auto& e = spectra[d * nr + j];
      f.slopes_plus.push_back((e[hi] - mu0) / radii[j]);
      f.slopes_minus.push_back((mu0 - e[lo]) / radii[j]);
      f.even_part.push_back(e[hi] + e[lo] - 2.0 * mu0);
      mean.push_back(0.5 * (f.slopes_plus.back() + f.slopes_minus.back()));
    }
    f.extrapolated_plus = linear_extrapolate_to_zero(radii, f.slopes_plus);
    f.extrapolated_minus = linear_extrapolate_to_zero(radii, f.slopes_minus);
    f.extrapolated_slope = linear_extrapolate_to_zero(radii, mean);
    smin = std::min(smin, f.extrapolated_slope);
    smax = std::max(smax, f.extrapolated_slope);
    ssum += f.extrapolated_slope;
    r.max_slope_defect = std::max(r.max_slope_defect, std::abs(f.extrapolated_slope - lam) / lam);
    r.fits.push_back(std::move(f));
  }
  r.max_anisotropy = directions.empty() ? 0.0 : (smax - smin) / (ssum / directions.size());
  if (r.max_slope_defect > r.tolerances.slope_match || r.max_anisotropy > r.tolerances.isotropy) {
    r.status = DiracStatus::cone_mismatch;
    r.diagnostic = "fitted cone slopes disagree with |lambda_sharp|";
  } else {
    r.status = DiracStatus::ok;
    r.diagnostic.clear();
  }
}

/// n directions evenly spaced in angle starting at `offset` radians.
inline std::vector<Vec2> uniform_directions(int n, double offset = 0.0) {
  std::vector<Vec2> d;
  for (int j = 0; j < n; ++j) {
    const double th = offset + 2.0 * pi * j / n;
    d.emplace_back(std::cos(th), std::sin(th));
  }
  return d;
}

}  // namespace honeycomb

#endif  // HONEYCOMB_DIRAC_HPP
