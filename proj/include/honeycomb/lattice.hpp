#ifndef HONEYCOMB_LATTICE_HPP
#define HONEYCOMB_LATTICE_HPP

#include <array>
#include <cmath>
#include <compare>
#include <map>
#include <utility>
#include <vector>

#include "honeycomb/common.hpp"

namespace honeycomb {

/// Integer coordinates (m1, m2) of the dual-lattice vector m1*k1 + m2*k2.
struct FourierIndex {
  int m1 = 0;
  int m2 = 0;

  friend auto operator<=>(const FourierIndex&, const FourierIndex&) = default;
  friend constexpr FourierIndex operator+(FourierIndex a, FourierIndex b) { return {a.m1 + b.m1, a.m2 + b.m2}; }
  friend constexpr FourierIndex operator-(FourierIndex a, FourierIndex b) { return {a.m1 - b.m1, a.m2 - b.m2}; }
  constexpr FourierIndex operator-() const { return {-m1, -m2}; }
};

/// One of the three eigenvalues 1, tau, conj(tau) of the rotation operator.
enum class SymmetrySector { one, tau, tau_bar };

inline cplx sector_value(SymmetrySector s) {
  switch (s) {
    case SymmetrySector::one: return {1.0, 0.0};
    case SymmetrySector::tau: return tau;
    case SymmetrySector::tau_bar: return std::conj(tau);
  }
  return {1.0, 0.0};
}

inline SymmetrySector conjugate(SymmetrySector s) {
  if (s == SymmetrySector::tau) return SymmetrySector::tau_bar;
  if (s == SymmetrySector::tau_bar) return SymmetrySector::tau;
  return s;
}

inline const char* to_string(SymmetrySector s) {
  switch (s) {
    case SymmetrySector::one: return "1";
    case SymmetrySector::tau: return "tau";
    case SymmetrySector::tau_bar: return "tau_bar";
  }
  return "?";
}

/// The honeycomb period lattice with lattice constant a, its dual, and the
/// Brillouin-zone vertices. Everything is a closed form in a.
struct LatticeGeometry {
  double a = 1.0;
  Vec2 v1, v2;
  Vec2 k1, k2;
  double q = 0.0;
  Vec2 K, Kprime;
  Mat2 R;  // clockwise rotation by 2*pi/3
  double cell_area = 0.0;

  Vec2 dual(FourierIndex m) const { return m.m1 * k1 + m.m2 * k2; }
};

inline LatticeGeometry build_geometry(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("lattice constant must be positive");
  const double s3 = std::sqrt(3.0);
  LatticeGeometry g;
  g.a = a;
  g.v1 = a * Vec2(s3 / 2.0, 0.5);
  g.v2 = a * Vec2(s3 / 2.0, -0.5);
  g.q = 4.0 * pi / (a * s3);
  g.k1 = g.q * Vec2(0.5, s3 / 2.0);
  g.k2 = g.q * Vec2(0.5, -s3 / 2.0);
  g.K = (g.k1 - g.k2) / 3.0;
  g.Kprime = -g.K;
  g.R << -0.5, s3 / 2.0, -s3 / 2.0, -0.5;
  g.cell_area = a * a * s3 / 2.0;
  return g;
}

/// Index rotation acting on potential coefficients: (m1, m2) -> (-m2, m1 - m2).
constexpr FourierIndex index_tR_action(FourierIndex m) { return {-m.m2, m.m1 - m.m2}; }

/// Index rotation about a vertex whose rotation offset is d, i.e. R*Kstar = Kstar + d.k.
/// Then R (Kstar + m.k) = Kstar + (tR m + d).k.
constexpr FourierIndex index_R_action(FourierIndex m, FourierIndex offset) {
  return index_tR_action(m) + offset;
}

/// Offset of the K point itself: R K = K + k2.
inline constexpr FourierIndex K_offset{0, 1};

/// (m1, m2) -> (-m2, m1 - m2 + 1), the rotation seen from K.
constexpr FourierIndex index_R_action(FourierIndex m) { return index_R_action(m, K_offset); }

inline Vec2 kvec_of_index(const LatticeGeometry& g, const Vec2& K_star, FourierIndex m) {
  return K_star + g.dual(m);
}

/// Integer offset d with R*Kstar = Kstar + d1 k1 + d2 k2. Throws unless Kstar is a
/// Brillouin-zone vertex (the only points where the rotation acts without fixed indices).
inline FourierIndex vertex_offset(const LatticeGeometry& g, const Vec2& K_star) {
  const Vec2 diff = g.R * K_star - K_star;
  const double x1 = diff.dot(g.v1) / (2.0 * pi);
  const double x2 = diff.dot(g.v2) / (2.0 * pi);
  const FourierIndex d{static_cast<int>(std::lround(x1)), static_cast<int>(std::lround(x2))};
  if (std::abs(x1 - d.m1) > 1e-9 || std::abs(x2 - d.m2) > 1e-9)
    throw DomainError("quasi-momentum is not a rotation-compatible vertex");
  // (I - tR) m = d has an integer solution iff the orbit has a fixed point.
  // I - tR = [[1, 1], [-1, 2]], det 3.
  const int n1 = 2 * d.m1 - d.m2;
  const int n2 = d.m1 + d.m2;
  if (n1 % 3 == 0 && n2 % 3 == 0)
    throw DomainError("quasi-momentum is rotation-invariant (not a K or K' point)");
  return d;
}

/// Orbit representatives of the vertex rotation over the square |m1|,|m2| <= M,
/// closed so that every orbit touching the square is kept whole.
struct CycleTable {
  int M = 0;
  FourierIndex offset = K_offset;
  std::vector<FourierIndex> representatives;             // ascending
  std::map<FourierIndex, std::pair<FourierIndex, FourierIndex>> cycle_map;  // m -> (Rm, R^2 m)
  std::map<FourierIndex, FourierIndex> representative_of;

  FourierIndex rotate(FourierIndex m) const { return index_R_action(m, offset); }

  std::vector<FourierIndex> universe() const {
    std::vector<FourierIndex> all;
    all.reserve(cycle_map.size());
    for (const auto& [m, _] : cycle_map) all.push_back(m);
    return all;
  }
};

inline CycleTable cycle_representatives(int M, FourierIndex offset = K_offset) {
  if (M < 1) throw DomainError("truncation must be at least 1");
  CycleTable t;
  t.M = M;
  t.offset = offset;
  for (int m1 = -M; m1 <= M; ++m1) {
    for (int m2 = -M; m2 <= M; ++m2) {
      const FourierIndex m{m1, m2};
      if (t.cycle_map.contains(m)) continue;
      const FourierIndex r1 = index_R_action(m, offset);
      const FourierIndex r2 = index_R_action(r1, offset);
      if (index_R_action(r2, offset) != m || r1 == m)
        throw DomainError("rotation offset produces orbits that are not 3-cycles");
      const FourierIndex rep = std::min({m, r1, r2});
      t.cycle_map[m] = {r1, r2};
      t.cycle_map[r1] = {r2, m};
      t.cycle_map[r2] = {m, r1};
      for (auto x : {m, r1, r2}) t.representative_of[x] = rep;
      t.representatives.push_back(rep);
    }
  }
  std::sort(t.representatives.begin(), t.representatives.end());
  return t;
}

inline CycleTable cycle_representatives(const LatticeGeometry& g, const Vec2& K_star, int M) {
  return cycle_representatives(M, vertex_offset(g, K_star));
}

}  // namespace honeycomb

#endif  // HONEYCOMB_LATTICE_HPP
