#ifndef HONEYCOMB_POTENTIAL_HPP
#define HONEYCOMB_POTENTIAL_HPP

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "honeycomb/common.hpp"
#include "honeycomb/lattice.hpp"

namespace honeycomb {

inline constexpr double default_symmetry_tol = 1e-10;

struct HoneycombCheckReport {
  double max_reality_defect = 0.0;
  double max_evenness_defect = 0.0;
  double max_Rinvariance_defect = 0.0;
  double tolerance = default_symmetry_tol;
  bool real_valued = true;
  bool even = true;
  bool R_invariant = true;

  bool honeycomb() const { return real_valued && even && R_invariant; }
};

/// A lattice-periodic potential held as a finite map of Fourier coefficients,
/// V(x) = sum_m V_m exp(i m.k x). Symmetry flags are derived from the data.
class PotentialSpectrum {
 public:
  using Map = std::map<FourierIndex, cplx>;

  PotentialSpectrum() { refresh(); }
  explicit PotentialSpectrum(Map coeffs, std::string kind = "fourier")
      : coeffs_(std::move(coeffs)), kind_(std::move(kind)) {
    refresh();
  }

  const Map& coeffs() const { return coeffs_; }
  const std::string& kind() const { return kind_; }

  cplx operator[](FourierIndex m) const {
    auto it = coeffs_.find(m);
    return it == coeffs_.end() ? cplx{} : it->second;
  }

  double sup_norm() const {
    double s = 0.0;
    for (const auto& [_, c] : coeffs_) s = std::max(s, std::abs(c));
    return s;
  }
  double l1_norm() const {
    double s = 0.0;
    for (const auto& [_, c] : coeffs_) s += std::abs(c);
    return s;
  }

  const HoneycombCheckReport& symmetry() const { return report_; }
  bool is_real_valued() const { return report_.real_valued; }
  bool is_even() const { return report_.even; }
  bool is_R_invariant() const { return report_.R_invariant; }
  bool is_honeycomb() const { return report_.honeycomb(); }

  HoneycombCheckReport check(double rel_tol = default_symmetry_tol) const {
    HoneycombCheckReport r;
    r.tolerance = rel_tol;
    for (const auto& [m, c] : coeffs_) {
      const cplx neg = (*this)[-m];
      r.max_reality_defect = std::max(r.max_reality_defect, std::abs(neg - std::conj(c)));
      r.max_evenness_defect = std::max(r.max_evenness_defect, std::abs(neg - c));
      const FourierIndex t1 = index_tR_action(m);
      const FourierIndex t2 = index_tR_action(t1);
      r.max_Rinvariance_defect = std::max(
          {r.max_Rinvariance_defect, std::abs((*this)[t1] - c), std::abs((*this)[t2] - c)});
    }
    const double tol = rel_tol * std::max(sup_norm(), 1e-300);
    const bool empty = coeffs_.empty();
    r.real_valued = empty || r.max_reality_defect <= tol;
    r.even = empty || r.max_evenness_defect <= tol;
    r.R_invariant = empty || r.max_Rinvariance_defect <= tol;
    return r;
  }

  /// this + s * other
  PotentialSpectrum plus(const PotentialSpectrum& other, double s = 1.0) const {
    Map out = coeffs_;
    for (const auto& [m, c] : other.coeffs_) out[m] += s * c;
    return PotentialSpectrum(std::move(out), kind_ == other.kind_ ? kind_ : "combined");
  }
  PotentialSpectrum scaled(double s) const {
    Map out;
    for (const auto& [m, c] : coeffs_) out[m] = s * c;
    return PotentialSpectrum(std::move(out), kind_);
  }
  PotentialSpectrum shifted(double c) const {
    Map out = coeffs_;
    out[{0, 0}] += c;
    return PotentialSpectrum(std::move(out), kind_);
  }
  /// (V(x) + V(-x)) / 2
  PotentialSpectrum even_part() const { return parity_part(+1.0); }
  /// (V(x) - V(-x)) / 2
  PotentialSpectrum odd_part() const { return parity_part(-1.0); }

 private:
  PotentialSpectrum parity_part(double sign) const {
    Map out;
    for (const auto& [m, c] : coeffs_) {
      const cplx v = 0.5 * (c + sign * (*this)[-m]);
      if (v != cplx{}) out[m] = v;
    }
    return PotentialSpectrum(std::move(out), kind_);
  }

  void refresh() { report_ = check(); }

  Map coeffs_;
  std::string kind_ = "fourier";
  HoneycombCheckReport report_;
};

/// Duplicate indices are summed.
inline PotentialSpectrum from_fourier(const std::vector<std::pair<FourierIndex, cplx>>& entries) {
  PotentialSpectrum::Map m;
  for (const auto& [idx, c] : entries) m[idx] += c;
  return PotentialSpectrum(std::move(m), "fourier");
}

/// V0 (cos(k1.x) + cos(k2.x) + cos((k1+k2).x))
inline PotentialSpectrum optical_lattice(double V0) {
  PotentialSpectrum::Map m;
  if (V0 != 0.0) {
    for (FourierIndex idx : {FourierIndex{1, 0}, FourierIndex{0, 1}, FourierIndex{1, 1}}) {
      m[idx] = V0 / 2.0;
      m[-idx] = V0 / 2.0;
    }
  }
  return PotentialSpectrum(std::move(m), "optical");
}

/// Gaussian "atoms" V0 exp(-|x|^2 / (2 s^2)) on both honeycomb sublattices, with the
/// origin moved to a hexagon center so the result is even and rotation invariant.
/// With atoms at A = 0 and B = a(1/sqrt3, 0), the hexagon center sits at -B (mod the
/// lattice), so relative to it the atoms are at +-B and
///   V_m = (2 pi s^2 V0 / |cell|) exp(-|m.k|^2 s^2 / 2) * 2 cos(m.k . B).
/// The plane Gaussian transform is used; periodization error is exp(-O(a^2/s^2)).
inline PotentialSpectrum atomic_lattice(const LatticeGeometry& g, double V0, double s, int M) {
  if (!(s > 0.0)) throw DomainError("Gaussian width must be positive");
  if (M < 1) throw DomainError("truncation must be at least 1");
  const Vec2 B = g.a * Vec2(1.0 / std::sqrt(3.0), 0.0);
  const double amp = V0 * 2.0 * pi * s * s / g.cell_area;
  PotentialSpectrum::Map m;
  for (int m1 = -M; m1 <= M; ++m1) {
    for (int m2 = -M; m2 <= M; ++m2) {
      const Vec2 G = g.dual({m1, m2});
      const double v = amp * std::exp(-G.squaredNorm() * s * s / 2.0) * 2.0 * std::cos(G.dot(B));
      if (v != 0.0) m[{m1, m2}] = v;
    }
  }
  return PotentialSpectrum(std::move(m), "atomic");
}

/// V_{1,1} as a real number. Throws if the coefficient is not real.
inline double coefficient_V11(const PotentialSpectrum& V, double rel_tol = default_symmetry_tol) {
  const cplx c = V[{1, 1}];
  if (std::abs(c.imag()) > rel_tol * std::max(V.sup_norm(), 1e-300))
    throw SymmetryError("V_{1,1} is not real; potential is not real and even");
  return c.real();
}

/// Complex partial Fourier sum at x.
inline cplx evaluate_complex(const LatticeGeometry& g, const PotentialSpectrum& V, const Vec2& x) {
  cplx s{};
  for (const auto& [m, c] : V.coeffs()) s += c * std::polar(1.0, g.dual(m).dot(x));
  return s;
}

inline double evaluate(const LatticeGeometry& g, const PotentialSpectrum& V, const Vec2& x) {
  return evaluate_complex(g, V, x).real();
}

/// Minimum and maximum of V sampled on an n x n grid over the unit cell.
inline std::pair<double, double> sampled_range(const LatticeGeometry& g, const PotentialSpectrum& V,
                                               int n = 96) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 x = (double(i) / n) * g.v1 + (double(j) / n) * g.v2;
      const double v = evaluate(g, V, x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (V.coeffs().empty()) lo = hi = 0.0;
  return {lo, hi};
}

}  // namespace honeycomb

#endif  // HONEYCOMB_POTENTIAL_HPP
