#ifndef HONEYCOMB_SPECTRAL_HPP
#define HONEYCOMB_SPECTRAL_HPP

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "honeycomb/common.hpp"
#include "honeycomb/lattice.hpp"
#include "honeycomb/potential.hpp"

namespace honeycomb {

inline constexpr int default_truncation = 8;

/// Eigenvalues closer than this are treated as one degenerate level.
inline double degeneracy_threshold(double mu) { return 1e-8 * (1.0 + std::abs(mu)); }

/// Plane waves exp(i (k + m.k) x) for |m1|, |m2| <= M in lexicographic order.
struct PlanewaveBasis {
  Vec2 k = Vec2::Zero();
  int M = 0;
  std::vector<FourierIndex> indices;
};

inline PlanewaveBasis make_planewave_basis(const Vec2& k, int M) {
  if (M < 1) throw DomainError("truncation must be at least 1");
  PlanewaveBasis b{k, M, {}};
  b.indices.reserve(std::size_t(2 * M + 1) * std::size_t(2 * M + 1));
  for (int m1 = -M; m1 <= M; ++m1)
    for (int m2 = -M; m2 <= M; ++m2) b.indices.push_back({m1, m2});
  return b;
}

/// Symmetry-adapted basis at a vertex: one three-term function per orbit,
///   c(m) [ e^{i K^m x} + conj(sigma) e^{i R K^m x} + sigma e^{i R^2 K^m x} ].
struct SectorBasis {
  Vec2 K_star = Vec2::Zero();
  SymmetrySector sigma = SymmetrySector::tau;
  int M = 0;
  CycleTable table;

  const std::vector<FourierIndex>& reps() const { return table.representatives; }
};

struct BlochHamiltonian {
  CMat matrix;
  double epsilon = 0.0;
  Vec2 k = Vec2::Zero();
  std::vector<FourierIndex> indices;   // row labels (plane waves or orbit representatives)
  std::optional<SectorBasis> sector;   // set for sector-reduced problems

  Eigen::Index dimension() const { return matrix.rows(); }
};

struct EigenSolution {
  std::vector<double> eigenvalues;  // ascending
  CMat eigenvectors;                // column j belongs to eigenvalues[j]
  double max_residual = 0.0;
};

/// Relative Frobenius defect ||H - H^*|| / ||H||.
inline double hermitian_defect(const CMat& H) {
  const double n = H.norm();
  return n == 0.0 ? 0.0 : (H - H.adjoint()).norm() / n;
}

inline BlochHamiltonian assemble_full(const LatticeGeometry& g, const PotentialSpectrum& V,
                                      const Vec2& k, double eps,
                                      const std::vector<FourierIndex>& indices) {
  const auto n = static_cast<Eigen::Index>(indices.size());
  BlochHamiltonian h;
  h.epsilon = eps;
  h.k = k;
  h.indices = indices;
  h.matrix.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h.matrix(i, i) = (k + g.dual(indices[i])).squaredNorm();
    if (eps == 0.0) continue;
    for (Eigen::Index j = 0; j < n; ++j) h.matrix(i, j) += eps * V[indices[i] - indices[j]];
  }
  return h;
}

/// H[m, n] = |k + m.k|^2 delta_mn + eps V_{m-n} over the square truncation.
inline BlochHamiltonian assemble_full(const LatticeGeometry& g, const PotentialSpectrum& V,
                                      const Vec2& k, double eps, int M = default_truncation) {
  return assemble_full(g, V, k, eps, make_planewave_basis(k, M).indices);
}

/// Coupling kernel between orbit representatives m and r in sector sigma.
inline cplx sector_kernel(const PotentialSpectrum& V, const CycleTable& t, SymmetrySector sigma,
                          FourierIndex m, FourierIndex r) {
  const cplx s = sector_value(sigma);
  const FourierIndex r1 = t.rotate(r);
  const FourierIndex r2 = t.rotate(r1);
  return V[m - r] + std::conj(s) * V[m - r1] + s * V[m - r2];
}

/// Sector-reduced matrix |K^m|^2 delta_mr + eps K_sigma(m, r) over orbit representatives.
inline BlochHamiltonian assemble_sector(const LatticeGeometry& g, const PotentialSpectrum& V,
                                        const Vec2& K_star, SymmetrySector sigma, double eps,
                                        int M = default_truncation) {
  if (!V.is_honeycomb())
    throw SymmetryError("sector reduction requires a real, even, rotation-invariant potential");
  SectorBasis basis{K_star, sigma, M, cycle_representatives(g, K_star, M)};
  const auto& reps = basis.reps();
  const auto n = static_cast<Eigen::Index>(reps.size());
  BlochHamiltonian h;
  h.epsilon = eps;
  h.k = K_star;
  h.indices = reps;
  h.matrix.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h.matrix(i, i) = kvec_of_index(g, K_star, reps[i]).squaredNorm();
    if (eps == 0.0) continue;
    for (Eigen::Index j = 0; j < n; ++j)
      h.matrix(i, j) += eps * sector_kernel(V, basis.table, sigma, reps[i], reps[j]);
  }
  h.sector = std::move(basis);
  return h;
}

/// Rotates v so its largest-magnitude entry is real and positive. Entries within
/// a relative 1e-10 of the maximum count as ties; the first one wins.
inline void fix_phase(Eigen::Ref<CVec> v) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) best = std::max(best, std::abs(v(i)));
  if (best == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= best * (1.0 - 1e-10)) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      return;
    }
  }
}

/// Lowest n_lowest eigenvalues only.
inline std::vector<double> eigenvalues(const CMat& H, Eigen::Index n_lowest) {
  Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  n_lowest = std::min(n_lowest, H.rows());
  return {es.eigenvalues().data(), es.eigenvalues().data() + n_lowest};
}

inline EigenSolution solve(const BlochHamiltonian& H, Eigen::Index n_lowest) {
  const Eigen::Index n = H.dimension();
  if (n_lowest < 0 || n_lowest > n) throw DomainError("requested more eigenvalues than the dimension");
  Eigen::SelfAdjointEigenSolver<CMat> es(H.matrix);
  if (es.info() != Eigen::Success)
    throw NumericalError("Hermitian eigensolver did not converge (dimension " + std::to_string(n) + ")");
  EigenSolution sol;
  sol.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n_lowest);
  sol.eigenvectors = es.eigenvectors().leftCols(n_lowest);
  for (Eigen::Index j = 0; j < n_lowest; ++j) {
    fix_phase(sol.eigenvectors.col(j));
    const double mu = sol.eigenvalues[j];
    const double res = (H.matrix * sol.eigenvectors.col(j) - mu * sol.eigenvectors.col(j)).norm();
    sol.max_residual = std::max(sol.max_residual, res / (1.0 + std::abs(mu)));
  }
  if (sol.max_residual > 1e-9)
    throw NumericalError("eigenpair residual " + std::to_string(sol.max_residual) + " exceeds 1e-9");
  return sol;
}

/// All eigenvalues of a sector problem; convenience for the analyses below.
inline std::vector<double> sector_spectrum(const LatticeGeometry& g, const PotentialSpectrum& V,
                                           const Vec2& K_star, SymmetrySector sigma, double eps,
                                           int M = default_truncation) {
  const auto H = assemble_sector(g, V, K_star, sigma, eps, M);
  return eigenvalues(H.matrix, H.dimension());
}

/// Full plane-wave coefficients of a sector function given its representative coefficients.
inline std::map<FourierIndex, cplx> expand_sector(const CycleTable& t, SymmetrySector sigma,
                                                  const CVec& c) {
  const cplx s = sector_value(sigma);
  std::map<FourierIndex, cplx> out;
  for (std::size_t i = 0; i < t.representatives.size(); ++i) {
    const FourierIndex m = t.representatives[i];
    const auto& [r1, r2] = t.cycle_map.at(m);
    const cplx ci = c(static_cast<Eigen::Index>(i));
    out[m] = ci;
    out[r1] = std::conj(s) * ci;
    out[r2] = s * ci;
  }
  return out;
}

/// Scales c so the sector function it represents has unit L2 norm over the cell:
/// 3 |cell| sum |c|^2 = 1.
inline CVec normalize_sector_coeffs(const LatticeGeometry& g, const CVec& c) {
  const double n2 = 3.0 * g.cell_area * c.squaredNorm();
  if (n2 == 0.0) throw NumericalError("cannot normalize a zero coefficient vector");
  return c / std::sqrt(n2);
}

// ---------------------------------------------------------------------------
// Band paths

struct BandRow {
  int idx = 0;
  double s = 0.0;  // cumulative arclength along the path
  Vec2 k = Vec2::Zero();
  std::vector<double> bands;
};

struct BandTable {
  std::vector<BandRow> rows;
  int n_bands = 0;
};

inline BandTable band_path(const LatticeGeometry& g, const PotentialSpectrum& V, double eps, int M,
                           const std::vector<Vec2>& kpoints, int n_bands) {
  if (kpoints.empty()) throw DomainError("k-path must not be empty");
  if (n_bands < 1) throw DomainError("need at least one band");
  const auto spectra = parallel_map(kpoints.size(), [&](std::size_t i) {
    return eigenvalues(assemble_full(g, V, kpoints[i], eps, M).matrix, n_bands);
  });
  BandTable t;
  t.n_bands = n_bands;
  double s = 0.0;
  for (std::size_t i = 0; i < kpoints.size(); ++i) {
    if (i > 0) s += (kpoints[i] - kpoints[i - 1]).norm();
    t.rows.push_back({static_cast<int>(i), s, kpoints[i], spectra[i]});
  }
  return t;
}

/// Piecewise-linear path through named high-symmetry points, e.g. "G-K-M-G".
/// G = 0, K = (k1 - k2)/3, K' = -K, M = k1/2. Each segment gets `samples` steps.
inline std::vector<Vec2> named_path(const LatticeGeometry& g, const std::string& spec, int samples) {
  if (samples < 1) throw DomainError("samples per segment must be positive");
  std::vector<Vec2> vertices;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t next = spec.find('-', pos);
    const std::string name = spec.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (name == "G") vertices.push_back(Vec2::Zero());
    else if (name == "K") vertices.push_back(g.K);
    else if (name == "K'") vertices.push_back(g.Kprime);
    else if (name == "M") vertices.push_back(g.k1 / 2.0);
    else throw DomainError("unknown path vertex '" + name + "'");
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (vertices.size() < 2) throw DomainError("path needs at least two vertices");
  std::vector<Vec2> pts;
  for (std::size_t v = 0; v + 1 < vertices.size(); ++v)
    for (int i = 0; i < samples; ++i)
      pts.push_back(vertices[v] + (double(i) / samples) * (vertices[v + 1] - vertices[v]));
  pts.push_back(vertices.back());
  return pts;
}

inline void write_band_csv(std::ostream& os, const BandTable& t) {
  os << "idx,s,kx,ky";
  for (int b = 1; b <= t.n_bands; ++b) os << ",band_" << b;
  os << '\n';
  char buf[64];
  for (const auto& r : t.rows) {
    os << r.idx;
    for (double x : {r.s, r.k.x(), r.k.y()}) {
      std::snprintf(buf, sizeof buf, ",%.12g", x);
      os << buf;
    }
    for (double x : r.bands) {
      std::snprintf(buf, sizeof buf, ",%.12g", x);
      os << buf;
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Truncation convergence

struct ConvergenceStudy {
  std::vector<int> M_list;
  std::vector<std::vector<double>> eigenvalues;  // per M
  std::vector<double> deltas;                    // max change between consecutive M
  std::optional<bool> converged;
};

inline ConvergenceStudy convergence_study(const LatticeGeometry& g, const PotentialSpectrum& V,
                                          double eps, const Vec2& k, const std::vector<int>& M_list,
                                          int n_lowest = 3, double tol = 1e-8) {
  if (M_list.empty()) throw DomainError("M list must not be empty");
  if (!std::is_sorted(M_list.begin(), M_list.end())) throw DomainError("M list must be ascending");
  ConvergenceStudy c;
  c.M_list = M_list;
  for (int M : M_list) c.eigenvalues.push_back(eigenvalues(assemble_full(g, V, k, eps, M).matrix, n_lowest));
  for (std::size_t i = 1; i < c.eigenvalues.size(); ++i) {
    double d = 0.0;
    for (int j = 0; j < n_lowest; ++j) d = std::max(d, std::abs(c.eigenvalues[i][j] - c.eigenvalues[i - 1][j]));
    c.deltas.push_back(d);
  }
  if (!c.deltas.empty()) c.converged = c.deltas.back() < tol;
  return c;
}

}  // namespace honeycomb

#endif  // HONEYCOMB_SPECTRAL_HPP
