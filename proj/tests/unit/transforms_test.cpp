#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bergman/errors.hpp"
#include "bergman/transforms.hpp"
#include "oracles.hpp"

using namespace bergman;
constexpr double pi = std::numbers::pi;

namespace {

// Jacobian determinant from central differences of the map (n <= 3).
cplx numeric_det(const HoloMap& map, const ComplexPoint& z) {
  const std::size_t n = z.size();
  const double h = 1e-6;
  std::vector<std::vector<cplx>> J(n, std::vector<cplx>(n));
  for (std::size_t k = 0; k < n; ++k) {
    ComplexPoint a = z, b = z;
    a[k] += h;
    b[k] -= h;
    const auto fa = map.apply_raw(a);
    const auto fb = map.apply_raw(b);
    for (std::size_t i = 0; i < n; ++i) J[i][k] = (fa[i] - fb[i]) / (2 * h);
  }
  if (n == 1) return J[0][0];
  if (n == 2) return J[0][0] * J[1][1] - J[0][1] * J[1][0];
  return J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) - J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
         J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
}

double max_diff(const ComplexPoint& a, const ComplexPoint& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

} // namespace

TEST(Apply, Examples) {
  const EllipsoidSpec ball = EllipsoidSpec::ball(2);
  const auto r = HoloMap::rotation(ball, {pi, 0.0}).apply(ComplexPoint{0.3, 0.5});
  EXPECT_NEAR(std::abs(r[0] - cplx(-0.3)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r[1] - cplx(0.5)), 0.0, 1e-15);

  const auto p = HoloMap::power_map(ball, 2).apply(ComplexPoint{0.3, 0.5});
  EXPECT_NEAR(std::abs(p[0] - cplx(0.09)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p[1] - cplx(0.25)), 0.0, 1e-15);

  const ComplexPoint z{cplx(0.2, 0.1), cplx(-0.3, 0.4)};
  EXPECT_LE(max_diff(HoloMap::ball_automorphism({0.0, 0.0}).apply(z), z), 1e-16);
}

TEST(Apply, RejectsPointsOutsideSource) {
  const auto rot = HoloMap::rotation(EllipsoidSpec({1, 2}), {0.1, 0.2});
  EXPECT_THROW(rot.apply(ComplexPoint{0.9, 0.9}), DomainError);
  EXPECT_THROW(HoloMap::ball_automorphism({1.0, 0.0}), DomainError);
}

TEST(Apply, ImagesStayInTarget) {
  SplitMix64 rng(3);
  const EllipsoidSpec ball = EllipsoidSpec::ball(3);
  const auto aut = HoloMap::ball_automorphism({cplx(0.3, 0.2), 0.1, cplx(0.0, -0.4)});
  const auto perm = HoloMap::permutation(EllipsoidSpec({1, 2, 3}), {2, 0, 1});
  EXPECT_EQ(perm.target(), EllipsoidSpec({3, 1, 2}));
  for (int i = 0; i < 50; ++i) {
    EXPECT_LT(defect(ball, aut.apply(oracle::interior_point(ball, rng, 0.99))), 1.0);
    const auto z = oracle::interior_point(perm.source(), rng, 0.99);
    EXPECT_NEAR(defect(perm.target(), perm.apply(z)), defect(perm.source(), z), 1e-14);
  }
}

TEST(PowerMap, ProperAndDefectPreserving) {
  const EllipsoidSpec target({1, 2});
  const auto map = HoloMap::power_map(target, 3);
  EXPECT_EQ(map.source(), EllipsoidSpec({3, 6}));
  EXPECT_FALSE(map.is_biholomorphic());
  EXPECT_THROW(map.inverse(), std::logic_error);
  SplitMix64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const auto z = oracle::interior_point(map.source(), rng, 0.99);
    EXPECT_NEAR(defect(target, map.apply(z)), defect(map.source(), z), 1e-12);
  }
}

TEST(JacobianDet, Examples) {
  const EllipsoidSpec ball = EllipsoidSpec::ball(2);
  EXPECT_NEAR(std::abs(HoloMap::power_map(ball, 2).jacobian_det(ComplexPoint{0.3, 0.5}) - cplx(0.6)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(HoloMap::rotation(ball, {0.4, -2.0}).jacobian_det(ComplexPoint{0.3, 0.5})), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(HoloMap::permutation(ball, {1, 0}).jacobian_det(ComplexPoint{0.3, 0.5}) - cplx(-1.0)), 0.0, 1e-15);
}

TEST(JacobianDet, MatchesFiniteDifferences) {
  SplitMix64 rng(21);
  const EllipsoidSpec ball = EllipsoidSpec::ball(3);
  const std::vector<HoloMap> maps{
      HoloMap::ball_automorphism({cplx(0.3, 0.1), cplx(-0.2, 0.2), 0.1}),
      HoloMap::power_map(ball, 2),
      HoloMap::rotation(ball, {0.3, 1.2, -0.7}),
      HoloMap::compose({HoloMap::rotation(ball, {0.3, 1.2, -0.7}), HoloMap::ball_automorphism({0.2, 0.0, cplx(0, 0.3)})}),
  };
  for (const auto& map : maps) {
    for (int i = 0; i < 10; ++i) {
      const auto z = oracle::interior_point(map.source(), rng, 0.8);
      const cplx exact = map.jacobian_det(z);
      EXPECT_LE(std::abs(exact - numeric_det(map, z)), 1e-7 * std::max(1.0, std::abs(exact))) << map.describe();
    }
  }
}

TEST(Inverse, CompositionIsIdentity) {
  SplitMix64 rng(5);
  const EllipsoidSpec ball = EllipsoidSpec::ball(2);
  const std::vector<HoloMap> maps{HoloMap::ball_automorphism({cplx(0.3, 0.1), cplx(-0.2, 0.4)}),
                                  HoloMap::rotation(ball, {0.5, 2.0}), HoloMap::permutation(EllipsoidSpec({1, 2}), {1, 0})};
  for (const auto& map : maps) {
    const HoloMap inv = map.inverse();
    EXPECT_EQ(inv.source(), map.target());
    const HoloMap both = HoloMap::compose({map, inv});
    for (int i = 0; i < 10; ++i) {
      const auto z = oracle::interior_point(map.source(), rng, 0.9);
      EXPECT_LE(max_diff(inv.apply(map.apply(z)), z), 1e-13) << map.describe();
      EXPECT_NEAR(std::abs(both.jacobian_det(z) - cplx(1.0)), 0.0, 1e-12);
    }
  }
}

TEST(LocalInverses, Examples) {
  const auto one = local_inverses(2, ComplexPoint{0.25});
  ASSERT_EQ(one.size(), 2u);
  EXPECT_NEAR(std::abs(one[0].preimage[0] - cplx(0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(one[0].inv_jac_det - cplx(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(one[1].preimage[0] - cplx(-0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(one[1].inv_jac_det - cplx(-1.0)), 0.0, 1e-15);

  EXPECT_EQ(local_inverses(2, ComplexPoint{0.25, 0.25}).size(), 4u);
  EXPECT_THROW(local_inverses(2, ComplexPoint{0.25, 0.0}), BranchPointError);
}

TEST(LocalInverses, CompleteAndDistinct) {
  const ComplexPoint w{cplx(0.2, -0.3), cplx(-0.1, 0.05)};
  const EllipsoidSpec target = EllipsoidSpec::ball(2);
  const auto map = HoloMap::power_map(target, 3);
  const auto branches = local_inverses(3, w);
  ASSERT_EQ(branches.size(), 9u);
  for (std::size_t a = 0; a < branches.size(); ++a) {
    EXPECT_LE(max_diff(map.apply(branches[a].preimage), w), 1e-14);
    // inverse Jacobian is the reciprocal of the forward one at the preimage
    EXPECT_NEAR(std::abs(branches[a].inv_jac_det * map.jacobian_det(branches[a].preimage) - cplx(1.0)), 0.0, 1e-13);
    for (std::size_t b = a + 1; b < branches.size(); ++b) EXPECT_GT(max_diff(branches[a].preimage, branches[b].preimage), 1e-3);
  }
}

TEST(BiholomorphicLaw, IdentityAndRotation) {
  const EllipsoidSpec spec({1, 2});
  const KernelEvaluator k = series_evaluator(build_series(spec, 60));
  SplitMix64 rng(8);
  std::vector<std::pair<ComplexPoint, ComplexPoint>> pairs;
  for (int i = 0; i < 20; ++i) pairs.emplace_back(oracle::interior_point(spec, rng, 0.36), oracle::interior_point(spec, rng, 0.36));
  EXPECT_LE(check_biholomorphic_law(HoloMap::rotation(spec, {0.0, 0.0}), k, k, pairs).max_residual, 1e-15);
  EXPECT_LE(check_biholomorphic_law(HoloMap::rotation(spec, {1.1, -0.4}), k, k, pairs).max_residual, 1e-10);
}

TEST(BiholomorphicLaw, BallAutomorphismClosedForm) {
  const EllipsoidSpec ball = EllipsoidSpec::ball(2);
  SplitMix64 rng(12);
  std::vector<std::pair<ComplexPoint, ComplexPoint>> pairs;
  for (int i = 0; i < 20; ++i) pairs.emplace_back(oracle::interior_point(ball, rng, 0.5), oracle::interior_point(ball, rng, 0.5));
  const auto check = check_biholomorphic_law(HoloMap::ball_automorphism({0.3, 0.0}), ball_evaluator(2), ball_evaluator(2), pairs);
  EXPECT_LE(check.max_residual, 1e-10);
  EXPECT_EQ(check.rows.size(), pairs.size());
}

TEST(BiholomorphicLaw, RejectsPowerMap) {
  const KernelEvaluator k = ball_evaluator(2);
  EXPECT_THROW(check_biholomorphic_law(HoloMap::power_map(EllipsoidSpec::ball(2), 2), k, k, {}), std::invalid_argument);
}

TEST(BellCovering, DiscExample) {
  const EllipsoidSpec disc({1.0});
  const auto c = check_bell_covering_law(2, disc, ComplexPoint{0.3}, ComplexPoint{0.25}, polydisc_evaluator(), polydisc_evaluator());
  EXPECT_NEAR(c.lhs.real(), 0.19988, 1e-5);
  EXPECT_NEAR(c.rhs.real(), 0.19988, 1e-5);
  EXPECT_LE(c.residual, 1e-14);
}

TEST(BellCovering, IdentityPower) {
  const EllipsoidSpec spec({1, 2});
  const auto c = check_bell_covering_law(1, spec, ComplexPoint{0.3, 0.2}, ComplexPoint{0.2, 0.1}, 40, 40);
  EXPECT_LE(c.residual, 1e-15);
}

TEST(BellCovering, BallTargetSeriesBothSides) {
  const auto c = check_bell_covering_law(2, EllipsoidSpec::ball(2), ComplexPoint{0.3, 0.2}, ComplexPoint{0.2, 0.1}, 60, 60);
  EXPECT_LE(c.residual, 1e-6);
}

TEST(BellCovering, ResidualShrinksWithCap) {
  const EllipsoidSpec ball = EllipsoidSpec::ball(2);
  const ComplexPoint z{cplx(0.5, 0.2), cplx(-0.4, 0.3)}, w{cplx(0.3, 0.3), cplx(0.2, -0.5)};
  std::vector<double> residuals;
  for (int cap : {4, 8, 16}) {
    residuals.push_back(
        check_bell_covering_law(2, ball, z, w, series_evaluator(build_series(ball.scaled(2), cap)), ball_evaluator(2)).residual);
  }
  EXPECT_LT(residuals[1], residuals[0] / 4);
  EXPECT_LT(residuals[2], residuals[1] / 4);
}

TEST(BellCovering, RejectsBranchPoint) {
  EXPECT_THROW(check_bell_covering_law(2, EllipsoidSpec::ball(2), ComplexPoint{0.3, 0.2}, ComplexPoint{0.0, 0.1}, 10, 10),
               BranchPointError);
}

TEST(RotationInvariance, KernelDependsOnProductsOnly) {
  const EllipsoidSpec spec({1, 3});
  const KernelSeries s = build_series(spec, 60);
  SplitMix64 rng(31);
  const auto rot = HoloMap::rotation(spec, {0.9, -2.2});
  for (int i = 0; i < 20; ++i) {
    const auto z = oracle::interior_point(spec, rng, 0.5);
    const auto w = oracle::interior_point(spec, rng, 0.5);
    const cplx a = eval_kernel(s, z, w).value;
    const cplx b = eval_kernel(s, rot.apply(z), rot.apply(w)).value;
    EXPECT_LE(std::abs(a - b), 1e-12 * std::abs(a));
  }
}
