#include <gtest/gtest.h>

#include <random>

#include "geoqm/error.hpp"
#include "geoqm/riemann.hpp"
#include "oracles.hpp"

using namespace geoqm;

namespace {
AlgebraElement e(int k) { return AlgebraElement::basis(k); }

// Curvature tensor from matrix commutators: R(X,Y)Z = (1/4)[[X,Y],Z].
Vec3 curvature_oracle(const Vec3& x, const Vec3& y, const Vec3& z) {
  using namespace oracle;
  const Mat2 c = commutator(commutator(algebra_matrix(x), algebra_matrix(y)), algebra_matrix(z));
  return 0.25 * algebra_coords(c);
}
}  // namespace

TEST(Connection, TorsionFreeAndMetricCompatible) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 200; ++k) {
    const AlgebraElement x(oracle::random_vec3(rng)), y(oracle::random_vec3(rng)), z(oracle::random_vec3(rng));
    EXPECT_TRUE((connection_coeff(x, y) - connection_coeff(y, x)).approx(commutator(x, y), 1e-13));
    const double lhs = killing_inner(connection_coeff(x, y), z) + killing_inner(y, connection_coeff(x, z));
    EXPECT_NEAR(lhs, 0.0, 1e-12);
  }
}

TEST(Curvature, MatchesMatrixFormulaAndBianchi) {
  std::mt19937_64 rng(22);
  for (int k = 0; k < 200; ++k) {
    const Vec3 a = oracle::random_vec3(rng), b = oracle::random_vec3(rng), c = oracle::random_vec3(rng);
    const AlgebraElement x(a), y(b), z(c);
    EXPECT_LE((curvature(x, y, z).coords() - curvature_oracle(a, b, c)).cwiseAbs().maxCoeff(), 1e-12);
    const AlgebraElement bianchi = curvature(x, y, z) + curvature(y, z, x) + curvature(z, x, y);
    EXPECT_TRUE(bianchi.approx(AlgebraElement(), 1e-12));
    EXPECT_TRUE((curvature(x, y, z) + curvature(y, x, z)).approx(AlgebraElement(), 1e-14));
  }
}

TEST(Curvature, ComponentsOfConstantCurvature) {
  for (int i = 1; i <= 3; ++i)
    for (int k = 1; k <= 3; ++k)
      for (int l = 1; l <= 3; ++l)
        for (int m = 1; m <= 3; ++m) {
          const double expected = ((i == l) * (k == m) - (i == m) * (k == l)) / 16.0;
          EXPECT_NEAR(riemann_component(i, k, l, m), expected, 1e-16) << i << k << l << m;
          const double direct =
              oracle::killing(curvature_oracle(Vec3::Unit(l - 1), Vec3::Unit(m - 1), Vec3::Unit(i - 1)),
                              Vec3::Unit(k - 1));
          EXPECT_NEAR(riemann_component(i, k, l, m), direct, 1e-16);
        }
}

TEST(SectionalCurvature, CoordinatePlanesAreOne) {
  EXPECT_NEAR(sectional_curvature(e(1), e(2)), 1.0, 1e-15);
  EXPECT_NEAR(sectional_curvature(e(2), e(3)), 1.0, 1e-15);
  EXPECT_NEAR(sectional_curvature(e(3), e(1)), 1.0, 1e-15);
  // Same plane, different basis.
  EXPECT_NEAR(sectional_curvature(e(1) + e(2), e(1) - 3.0 * e(2)), 1.0, 1e-14);
}

TEST(SectionalCurvature, RandomPlanesAgreeWithGeodesicCircleOracle) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 100; ++k) {
    const Vec3 a = oracle::random_vec3(rng), b = oracle::random_vec3(rng);
    const double K = sectional_curvature(AlgebraElement(a), AlgebraElement(b));
    EXPECT_NEAR(K, 1.0, 1e-10);
    EXPECT_NEAR(K, oracle::circle_curvature(a, b), 1e-10);
  }
}

TEST(SectionalCurvature, DegeneratePlaneThrows) {
  EXPECT_ERRC(sectional_curvature(e(1), 2.0 * e(1)), Errc::degenerate_plane);
  EXPECT_ERRC(sectional_curvature(e(1), AlgebraElement()), Errc::degenerate_plane);
}

TEST(CommutatorIdentity, OrthogonalPairs) {
  auto [lhs, rhs] = commutator_curvature_identity(e(1), e(2));
  EXPECT_NEAR(lhs, 0.25, 1e-16);
  EXPECT_NEAR(rhs, 0.25, 1e-16);
  std::tie(lhs, rhs) = commutator_curvature_identity(embed_r3({1, 0, 0}), embed_r3({0, 1, 0}));
  EXPECT_NEAR(lhs, 4.0, 1e-15);
  EXPECT_NEAR(rhs, 4.0, 1e-15);

  std::mt19937_64 rng(24);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 a = oracle::random_vec3(rng);
    Vec3 b = oracle::random_vec3(rng);
    b -= (b.dot(a) / a.dot(a)) * a;
    std::tie(lhs, rhs) = commutator_curvature_identity(AlgebraElement(a), AlgebraElement(b));
    // Independent: |[X,Y]|^2 from the matrix commutator.
    const oracle::Mat2 c = oracle::commutator(oracle::algebra_matrix(a), oracle::algebra_matrix(b));
    EXPECT_NEAR(lhs, oracle::killing(c, c), 1e-10 * std::max(1.0, lhs));
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, rhs));
  }
}

TEST(CommutatorIdentity, RejectsNonOrthogonal) {
  EXPECT_ERRC(commutator_curvature_identity(e(1), e(1) + e(2)), Errc::not_orthogonal);
}
