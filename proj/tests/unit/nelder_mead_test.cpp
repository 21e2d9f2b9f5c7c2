#include <gtest/gtest.h>

#include <cmath>

#include "bergman/nelder_mead.hpp"

using namespace bergman;

TEST(NelderMead, Rosenbrock) {
  const Objective f = [](std::span<const double> x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  NelderMeadOptions opts;
  opts.max_evaluations = 5000;
  const auto r = nelder_mead(f, {-1.2, 1.0}, {0.5, 0.5}, opts);
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-6);
  EXPECT_LT(r.value, 1e-12);
  EXPECT_LE(r.evaluations, opts.max_evaluations + 10);
}

TEST(NelderMead, QuadraticInFourDimensions) {
  const Objective f = [](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * std::pow(x[i] - 0.1 * i, 2);
    return s;
  };
  const auto r = nelder_mead(f, {1, 1, 1, 1}, {0.3, 0.3, 0.3, 0.3});
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.x[i], 0.1 * i, 1e-7);
  EXPECT_TRUE(r.converged);
}

TEST(NelderMead, RespectsEvaluationBudget) {
  std::size_t calls = 0;
  const Objective f = [&](std::span<const double> x) {
    ++calls;
    return std::sin(10 * x[0]) + x[0] * x[0];
  };
  NelderMeadOptions opts;
  opts.max_evaluations = 50;
  const auto r = nelder_mead(f, {2.0}, {0.5}, opts);
  EXPECT_EQ(r.evaluations, calls);
  EXPECT_LE(calls, 60u);
}

TEST(NelderMead, NanIsTreatedAsWorst) {
  const Objective f = [](std::span<const double> x) { return x[0] < 0 ? std::nan("") : (x[0] - 1) * (x[0] - 1); };
  const auto r = nelder_mead(f, {0.1}, {-0.05});
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
}

TEST(NelderMead, RejectsBadDimensions) {
  const Objective f = [](std::span<const double>) { return 0.0; };
  EXPECT_THROW(nelder_mead(f, {}, {}), std::invalid_argument);
  EXPECT_THROW(nelder_mead(f, {1.0}, {1.0, 2.0}), std::invalid_argument);
}
