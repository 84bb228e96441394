#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "honeycomb/perturb.hpp"

using namespace honeycomb;

namespace {

const auto g1 = build_geometry(1.0);
const auto optical = optical_lattice(1.0);
const double K2 = 16 * pi * pi / 9;

const auto W_cos = from_fourier({{{1, 0}, 0.5}, {{-1, 0}, 0.5}});
const auto W_sin = from_fourier({{{1, 0}, cplx(0, -0.5)}, {{-1, 0}, cplx(0, 0.5)}});

cplx eval_planewaves(const std::map<FourierIndex, cplx>& d, const Vec2& x) {
  cplx s{};
  for (const auto& [m, c] : d) s += c * std::polar(1.0, kvec_of_index(g1, g1.K, m).dot(x));
  return s;
}

}  // namespace

TEST(SplitPrediction, OpticalClosedForms) {
  const auto p = split_prediction(g1, optical, 0.1);
  EXPECT_NEAR(p.mu_double_1st, K2 - 0.05, 1e-12);
  EXPECT_NEAR(p.mu_simple_1st, K2 + 0.1, 1e-12);
  EXPECT_EQ(p.crossing_case, (std::pair{1, 2}));
  EXPECT_EQ(split_prediction(g1, optical, -0.1).crossing_case, (std::pair{2, 3}));
  const auto z = split_prediction(g1, optical, 0.0);
  EXPECT_NEAR(z.mu_double_1st, K2, 1e-12);
  EXPECT_NEAR(z.mu_simple_1st, K2, 1e-12);
  EXPECT_THROW(split_prediction(g1, W_cos, 0.1), SymmetryError);
}

TEST(SplitPrediction, SignRuleAgreesWithSolver) {
  for (double eps : {0.05, -0.05, 0.2, -0.2}) {
    const auto p = split_prediction(g1, optical, eps);
    const auto r = detect_dirac(g1, optical, eps, 8);
    ASSERT_TRUE(r.verdict());
    EXPECT_EQ(std::pair(r.band_lo, r.band_hi), p.crossing_case) << eps;
    const double simple = sector_spectrum(g1, optical, g1.K, SymmetrySector::one, eps, 8)[0];
    EXPECT_EQ(r.mu_star < simple, eps * coefficient_V11(optical) > 0) << eps;
  }
}

TEST(VerifySplit, QuadraticRemainder) {
  const auto t = verify_split(g1, optical, {0.01, 0.02, 0.04}, 8);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_LE(t.rows[0].defect_double, 1e-3);
  for (double e : t.exponent_double) EXPECT_NEAR(e, 2.0, 0.3);
  for (double e : t.exponent_simple) EXPECT_NEAR(e, 2.0, 0.3);
  for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
    const double ratio = t.rows[i + 1].defect_double / t.rows[i].defect_double;
    EXPECT_GE(ratio, 3.0);
    EXPECT_LE(ratio, 5.0);
  }
}

TEST(VerifySplit, ZeroEps) {
  const auto t = verify_split(g1, optical, {0.0}, 6);
  EXPECT_LE(t.rows[0].defect_double, 1e-10);
  EXPECT_LE(t.rows[0].defect_simple, 1e-10);
  EXPECT_TRUE(t.exponent_double.empty());
}

TEST(InnerProduct, ConstantWIsScaledIdentity) {
  const auto r = detect_dirac(g1, optical, 0.3, 6);
  const auto phi1 = expand_sector(r.table, SymmetrySector::tau, r.coeffs);
  const auto phi2 = conj_reflect(phi1);
  const auto c = from_fourier({{{0, 0}, 2.5}});
  EXPECT_NEAR(std::abs(inner_product_W(g1, phi1, phi1, c) - 2.5), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(inner_product_W(g1, phi1, phi2, c)), 0.0, 1e-12);
}

TEST(InnerProduct, HermitianSymmetry) {
  const auto r = detect_dirac(g1, optical, 0.3, 6);
  const auto phi1 = expand_sector(r.table, SymmetrySector::tau, r.coeffs);
  const auto phi2 = conj_reflect(phi1);
  for (const auto& W : {W_cos, W_sin, optical}) {
    const cplx a = inner_product_W(g1, phi1, phi2, W);
    const cplx b = inner_product_W(g1, phi2, phi1, W);
    EXPECT_LT(std::abs(a - std::conj(b)), 1e-13);
    EXPECT_LT(std::abs(inner_product_W(g1, phi1, phi1, W).imag()), 1e-13);
  }
}

TEST(InnerProduct, MatchesQuadrature) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  std::map<FourierIndex, cplx> A, B;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) {
      A[{a, b}] = cplx(nd(rng), nd(rng));
      if ((a + b) % 2 == 0) B[{a, b}] = cplx(nd(rng), nd(rng));
    }
  const auto W = from_fourier({{{1, 0}, cplx(0.3, 0.1)}, {{-1, 0}, cplx(0.3, -0.1)}, {{0, 2}, 0.7}, {{0, -2}, 0.7}});
  const int n = 40;
  cplx q{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 x = (double(i) / n) * g1.v1 + (double(j) / n) * g1.v2;
      q += std::conj(eval_planewaves(A, x)) * evaluate_complex(g1, W, x) * eval_planewaves(B, x);
    }
  q *= g1.cell_area / double(n * n);
  const cplx s = inner_product_W(g1, A, B, W);
  EXPECT_LE(std::abs(s - q), 1e-8 * std::abs(q));
}

TEST(Deform, ZeroEtaKeepsK) {
  const auto r = deform_even(g1, optical, 0.3, W_cos, 0.0, 5);
  EXPECT_LT((r.K_shifted - g1.K).norm(), 1e-15);
  EXPECT_LT(r.gap_at_optimum, 1e-9);
  EXPECT_TRUE(r.diagnostic.empty());
}

TEST(Deform, HoneycombWLeavesVertexFixed) {
  const auto r = deform_even(g1, optical, 0.3, optical, 1e-2, 5);
  EXPECT_LT((r.K_first_order - g1.K).norm(), 1e-13);
  EXPECT_LT((r.K_shifted - g1.K).norm(), 1e-8);
  EXPECT_LT(r.gap_at_optimum, 1e-8);
}

TEST(Deform, EvenWShiftsAndCloses) {
  const auto r = deform_even(g1, optical, 0.3, W_cos, 1e-2, 6);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.diagnostic.empty()) << r.diagnostic;
  EXPECT_LT(r.gap_at_optimum, 1e-3 * 1e-2);
  EXPECT_GT((r.K_shifted - g1.K).norm(), 1e-4);
  EXPECT_LT(r.shift_defect, 0.1 * (r.K_first_order - g1.K).norm());
  EXPECT_LT(std::abs(r.mu_at_optimum - r.mu_first_order), 1e-3);
  EXPECT_EQ(r.predicted_gap, 0.0);
}

TEST(Deform, OddWOpensPredictedGap) {
  const auto r = deform_odd_gap(g1, optical, 0.3, W_sin, 1e-2, 6);
  EXPECT_EQ(r.W_parity, WParity::non_even);
  EXPECT_GT(r.predicted_gap, 0.0);
  EXPECT_NEAR(r.gap_at_optimum, r.predicted_gap, 0.1 * r.predicted_gap);
}

TEST(Deform, OddPathFallsBackForEvenW) {
  const auto r = deform_odd_gap(g1, optical, 0.3, W_cos, 1e-2, 5);
  EXPECT_EQ(r.W_parity, WParity::even);
  EXPECT_EQ(r.predicted_gap, 0.0);
}

TEST(Deform, Preconditions) {
  EXPECT_THROW(deform_even(g1, optical, 0.3, W_sin, 1e-2, 5), SymmetryError);
  const auto complexW = from_fourier({{{1, 0}, 0.5}});
  EXPECT_THROW(deform_odd_gap(g1, optical, 0.3, complexW, 1e-2, 5), SymmetryError);
  EXPECT_THROW(deform_even(g1, optical, 0.0, W_cos, 1e-2, 5), DomainError);
}
