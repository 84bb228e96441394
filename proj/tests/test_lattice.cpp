#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "honeycomb/lattice.hpp"

using namespace honeycomb;

namespace {
const double s3 = std::sqrt(3.0);
}

TEST(Geometry, ClosedFormConstants) {
  const auto g = build_geometry(1.0);
  EXPECT_NEAR(g.q, 4.0 * pi / s3, 1e-14);
  EXPECT_NEAR(g.q, 7.255197, 1e-6);
  EXPECT_NEAR(g.K.squaredNorm(), 16.0 * pi * pi / 9.0, 1e-12);
  EXPECT_NEAR(g.K.squaredNorm(), 17.54596, 1e-5);
  EXPECT_NEAR(build_geometry(2.0).cell_area, 2.0 * s3, 1e-14);
}

TEST(Geometry, DualityAndNorms) {
  for (double a : {0.5, 1.0, 2.7}) {
    const auto g = build_geometry(a);
    EXPECT_NEAR(g.k1.dot(g.v1), 2 * pi, 1e-12);
    EXPECT_NEAR(g.k2.dot(g.v2), 2 * pi, 1e-12);
    EXPECT_NEAR(g.k1.dot(g.v2), 0.0, 1e-12);
    EXPECT_NEAR(g.k2.dot(g.v1), 0.0, 1e-12);
    EXPECT_NEAR(g.v1.norm(), a, 1e-14);
    EXPECT_NEAR(g.v2.norm(), a, 1e-14);
    EXPECT_NEAR(g.v1.dot(g.v2), a * a / 2, 1e-13);
    EXPECT_NEAR(g.k1.norm(), g.q, 1e-12);
    EXPECT_NEAR(g.k1.dot(g.k2), -g.q * g.q / 2, 1e-11);
    EXPECT_NEAR(g.cell_area, std::abs(g.v1.x() * g.v2.y() - g.v1.y() * g.v2.x()), 1e-13);
  }
}

TEST(Geometry, RotationAndVertices) {
  const auto g = build_geometry(1.0);
  const Mat2 R3 = g.R * g.R * g.R;
  EXPECT_LT((R3 - Mat2::Identity()).norm(), 1e-14);
  EXPECT_LT((Mat2::Identity() + g.R + g.R * g.R).norm(), 1e-15);
  EXPECT_LT((g.R * g.K - (g.K + g.k2)).norm(), 1e-12);
  EXPECT_LT((g.R * g.R * g.K - (g.K - g.k1)).norm(), 1e-12);
  EXPECT_LT((g.Kprime + g.K).norm(), 1e-15);
}

TEST(Geometry, RotationEigenvector) {
  const auto g = build_geometry(1.0);
  Eigen::Vector2cd zeta(1.0 / std::sqrt(2.0), cplx(0, 1) / std::sqrt(2.0));
  const Eigen::Vector2cd lhs = g.R.cast<cplx>() * zeta;
  EXPECT_LT(std::abs(lhs(0) - tau * zeta(0)), 1e-14);
  EXPECT_LT(std::abs(lhs(1) - tau * zeta(1)), 1e-14);
}

TEST(Geometry, RejectsNonPositiveLatticeConstant) {
  EXPECT_THROW(build_geometry(0.0), DomainError);
  EXPECT_THROW(build_geometry(-1.0), DomainError);
  EXPECT_THROW(build_geometry(std::nan("")), DomainError);
}

TEST(IndexAction, Examples) {
  EXPECT_EQ(index_R_action(FourierIndex{0, 0}), (FourierIndex{0, 1}));
  EXPECT_EQ(index_R_action(FourierIndex{0, 1}), (FourierIndex{-1, 0}));
  EXPECT_EQ(index_R_action(FourierIndex{2, -1}), (FourierIndex{1, 4}));
  EXPECT_EQ(index_tR_action({1, 1}), (FourierIndex{-1, 0}));
  EXPECT_EQ(index_tR_action({0, 0}), (FourierIndex{0, 0}));
  EXPECT_EQ(index_tR_action({1, 0}), (FourierIndex{0, 1}));
}

TEST(IndexAction, OrbitsHaveLengthThree) {
  for (int m1 = -20; m1 <= 20; ++m1)
    for (int m2 = -20; m2 <= 20; ++m2) {
      const FourierIndex m{m1, m2};
      const auto r1 = index_R_action(m);
      const auto r2 = index_R_action(r1);
      EXPECT_EQ(index_R_action(r2), m);
      EXPECT_NE(r1, m);
      EXPECT_NE(r2, m);
      EXPECT_EQ(index_tR_action(index_tR_action(index_tR_action(m))), m);
    }
}

TEST(IndexAction, MatchesGeometricRotation) {
  const auto g = build_geometry(1.3);
  for (const Vec2& Ks : {g.K, g.Kprime}) {
    const FourierIndex d = vertex_offset(g, Ks);
    for (int m1 = -6; m1 <= 6; ++m1)
      for (int m2 = -6; m2 <= 6; ++m2) {
        const FourierIndex m{m1, m2};
        const auto r1 = index_R_action(m, d);
        EXPECT_LT((g.R * kvec_of_index(g, Ks, m) - kvec_of_index(g, Ks, r1)).norm(), 1e-12);
        EXPECT_LT((g.R * g.R * kvec_of_index(g, Ks, m) - kvec_of_index(g, Ks, index_R_action(r1, d))).norm(),
                  1e-12);
      }
  }
}

TEST(IndexAction, VertexOffsets) {
  const auto g = build_geometry(1.0);
  EXPECT_EQ(vertex_offset(g, g.K), K_offset);
  EXPECT_EQ(vertex_offset(g, g.Kprime), (FourierIndex{0, -1}));
  EXPECT_THROW(vertex_offset(g, Vec2::Zero()), DomainError);
  EXPECT_THROW(vertex_offset(g, g.k1 / 2.0), DomainError);
}

TEST(KVec, Examples) {
  const auto g = build_geometry(1.0);
  EXPECT_LT((kvec_of_index(g, g.K, {0, 0}) - g.K).norm(), 1e-15);
  EXPECT_LT((kvec_of_index(g, g.K, {0, 1}) - Vec2(g.q / 2, -g.q * s3 / 6)).norm(), 1e-12);
}

TEST(Cycles, DistinguishedOrbitRepresentative) {
  const auto t = cycle_representatives(1);
  ASSERT_TRUE(t.representative_of.contains({0, 0}));
  EXPECT_EQ(t.representative_of.at({0, 0}), (FourierIndex{-1, 0}));
  EXPECT_EQ(t.representative_of.at({0, 1}), (FourierIndex{-1, 0}));
  EXPECT_EQ(t.representative_of.at({-1, 0}), (FourierIndex{-1, 0}));
}

TEST(Cycles, PartitionAndClosure) {
  const auto t = cycle_representatives(5);
  EXPECT_TRUE(std::is_sorted(t.representatives.begin(), t.representatives.end()));
  EXPECT_EQ(t.cycle_map.size(), 3 * t.representatives.size());
  std::set<FourierIndex> seen;
  for (auto rep : t.representatives) {
    const auto [r1, r2] = t.cycle_map.at(rep);
    EXPECT_TRUE(seen.insert(rep).second);
    EXPECT_TRUE(seen.insert(r1).second);
    EXPECT_TRUE(seen.insert(r2).second);
    EXPECT_LE(rep, r1);
    EXPECT_LE(rep, r2);
    EXPECT_TRUE(t.cycle_map.contains(r1));
    EXPECT_TRUE(t.cycle_map.contains(r2));
  }
  for (int m1 = -5; m1 <= 5; ++m1)
    for (int m2 = -5; m2 <= 5; ++m2) EXPECT_TRUE(seen.contains({m1, m2}));
}

TEST(Cycles, RepresentativesStableUnderTruncation) {
  const auto a = cycle_representatives(3);
  const auto b = cycle_representatives(4);
  for (const auto& [m, rep] : a.representative_of) EXPECT_EQ(b.representative_of.at(m), rep);
}

TEST(Cycles, RejectsBadTruncation) { EXPECT_THROW(cycle_representatives(0), DomainError); }

TEST(Sectors, ValuesAndConjugation) {
  for (auto s : {SymmetrySector::one, SymmetrySector::tau, SymmetrySector::tau_bar}) {
    const cplx v = sector_value(s);
    EXPECT_LT(std::abs(v * v * v - 1.0), 1e-15);
    EXPECT_LT(std::abs(sector_value(conjugate(s)) - std::conj(v)), 1e-15);
  }
}
