#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "baryflow/error.hpp"
#include "baryflow/measure.hpp"
#include "oracles.hpp"

using baryflow::DiscreteMeasure;
using baryflow::ErrorCode;
using baryflow::Point;

namespace {

Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) p[k++] = x;
  return p;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const baryflow::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

}  // namespace

TEST(Validate, AcceptsUniformTwoPoint) {
  EXPECT_NO_THROW(baryflow::validate(DiscreteMeasure({pt({0}), pt({1})}, {0.5, 0.5})));
}

TEST(Validate, RejectsBadMass) {
  EXPECT_EQ(code_of([] { baryflow::validate(DiscreteMeasure({pt({0})}, {0.9})); }),
            ErrorCode::WeightSumMismatch);
}

TEST(Validate, RejectsNegativeWeight) {
  EXPECT_EQ(code_of([] {
              baryflow::validate(DiscreteMeasure({pt({0}), pt({1})}, {1.5, -0.5}));
            }),
            ErrorCode::NegativeWeight);
}

TEST(Validate, RejectsMixedDimensions) {
  EXPECT_EQ(code_of([] {
              baryflow::validate(DiscreteMeasure({pt({0}), pt({1, 2})}, {0.5, 0.5}));
            }),
            ErrorCode::DimensionMismatch);
}

TEST(Validate, RejectsNonFinite) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(code_of([&] { baryflow::validate(DiscreteMeasure({pt({nan})}, {1.0})); }),
            ErrorCode::NonFiniteCoordinate);
}

TEST(Validate, RejectsEmpty) {
  EXPECT_EQ(code_of([] { baryflow::validate(DiscreteMeasure()); }), ErrorCode::EmptyMeasure);
}

TEST(Canonicalize, MergesDropsAndSorts) {
  const DiscreteMeasure m({pt({2}), pt({0}), pt({2 + 1e-12}), pt({5})}, {0.25, 0.5, 0.25, 0.0});
  const auto c = baryflow::canonicalize(m);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_DOUBLE_EQ(c.point(0)[0], 0.0);
  EXPECT_DOUBLE_EQ(c.point(1)[0], 2.0);
  EXPECT_DOUBLE_EQ(c.weight(1), 0.5);
}

TEST(Pushforward, IdentityKeepsMeasure) {
  const DiscreteMeasure m({pt({0, 1}), pt({3, -1}), pt({2, 2})}, {0.2, 0.3, 0.5});
  const auto out = baryflow::pushforward(m, [](const Point& x) { return x; });
  EXPECT_LT(baryflow::measure_discrepancy(out, m), 1e-15);
}

TEST(Pushforward, ConstantMapMergesToDirac) {
  const DiscreteMeasure m({pt({0}), pt({1})}, {0.5, 0.5});
  const auto out = baryflow::pushforward(m, [](const Point&) { return pt({0}); });
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.point(0)[0], 0.0);
  EXPECT_EQ(out.weight(0), 1.0);
}

TEST(Pushforward, TranslationShiftsPoints) {
  const DiscreteMeasure m({pt({0, 1}), pt({3, -1})}, {0.4, 0.6});
  const Point xi = pt({1.5, -2});
  const auto out = baryflow::pushforward(m, [&](const Point& x) { return Point(x + xi); });
  EXPECT_LT(baryflow::measure_discrepancy(out, baryflow::translate(m, xi)), 1e-15);
  EXPECT_LT(baryflow::measure_discrepancy(
                out, DiscreteMeasure({pt({1.5, -1}), pt({4.5, -3})}, {0.4, 0.6})),
            1e-15);
}

TEST(Pushforward, NonFiniteImageThrows) {
  const DiscreteMeasure m({pt({0})}, {1.0});
  EXPECT_EQ(code_of([&] {
              baryflow::pushforward(
                  m, [](const Point&) { return pt({std::numeric_limits<double>::infinity()}); });
            }),
            ErrorCode::NonFiniteImage);
}

TEST(PushforwardProperty, CompositionMatchesNestedPushforward) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = oracle::random_points(rng, 5, 2);
    const auto m = DiscreteMeasure::uniform(pts);
    Eigen::Matrix2d A;
    A << u(rng), u(rng), u(rng), u(rng);
    const Point b = pt({u(rng), u(rng)});
    const baryflow::PointMap f = [&](const Point& x) { return Point(A * x); };
    const baryflow::PointMap g = [&](const Point& x) { return Point(x.array().square().matrix() + b); };
    const auto nested = baryflow::pushforward(baryflow::pushforward(m, f), g);
    const auto direct = baryflow::pushforward(m, [&](const Point& x) { return g(f(x)); });
    EXPECT_LT(baryflow::measure_discrepancy(nested, direct), 1e-12) << "trial " << trial;
    EXPECT_NEAR(direct.total_mass(), 1.0, 1e-15);
  }
}

TEST(Marginal, ProductPlanGivesFactors) {
  const DiscreteMeasure a({pt({0}), pt({1})}, {0.5, 0.5});
  const DiscreteMeasure b({pt({2}), pt({3})}, {0.5, 0.5});
  baryflow::MultiPlan plan{2, {}};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) plan.entries.push_back({{i, j}, 0.25});
  }
  const std::vector<DiscreteMeasure> mus{a, b};
  EXPECT_LT(baryflow::measure_discrepancy(baryflow::marginal(plan, 0, std::span(mus)), a), 1e-15);
  EXPECT_LT(baryflow::measure_discrepancy(baryflow::marginal(plan, 1, std::span(mus)), b), 1e-15);
  EXPECT_LT(baryflow::marginal_error(plan, mus), 1e-15);
}

TEST(Marginal, DiagonalPlanGivesSameMeasure) {
  const DiscreteMeasure nu({pt({0, 0}), pt({1, 2}), pt({-1, 3})}, {0.2, 0.3, 0.5});
  baryflow::MultiPlan plan{3, {}};
  for (std::size_t a = 0; a < nu.size(); ++a) plan.entries.push_back({{a, a, a}, nu.weight(a)});
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_LT(baryflow::measure_discrepancy(baryflow::marginal(plan, k, nu.points()), nu), 1e-15);
  }
}

TEST(Marginal, OutOfRange) {
  const DiscreteMeasure a({pt({0})}, {1.0});
  const std::vector<DiscreteMeasure> mus{a, a};
  baryflow::MultiPlan plan{2, {{{0, 0}, 1.0}}};
  EXPECT_EQ(code_of([&] { baryflow::marginal(plan, 2, std::span(mus)); }),
            ErrorCode::IndexOutOfRange);
  plan.entries[0].index = {0, 3};
  EXPECT_EQ(code_of([&] { baryflow::marginal(plan, 1, std::span(mus)); }),
            ErrorCode::IndexOutOfRange);
}

TEST(Discrepancy, DifferentSupportSizesAreInfinite) {
  const DiscreteMeasure a({pt({0})}, {1.0});
  const DiscreteMeasure b({pt({0}), pt({1})}, {0.5, 0.5});
  EXPECT_TRUE(std::isinf(baryflow::measure_discrepancy(a, b)));
}

TEST(CommonDimension, MismatchThrows) {
  const std::vector<DiscreteMeasure> mus{DiscreteMeasure::dirac(pt({0})),
                                         DiscreteMeasure::dirac(pt({0, 0}))};
  EXPECT_EQ(code_of([&] { baryflow::common_dimension(mus); }), ErrorCode::DimensionMismatch);
}
