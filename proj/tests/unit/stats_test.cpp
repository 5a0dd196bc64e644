#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "popstat/error.hpp"
#include "popstat/stats.hpp"

using namespace popstat;

namespace {

double boost_p(double r, std::size_t n) {
  const double df = static_cast<double>(n - 2);
  const double t = r * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

ConfidenceInterval boost_ci(double r, std::size_t n, double level) {
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(),
                                         0.5 + level / 2.0);
  const double se = 1.0 / std::sqrt(static_cast<double>(n) - 3.0);
  return {std::tanh(std::atanh(r) - z * se), std::tanh(std::atanh(r) + z * se)};
}

}  // namespace

TEST(Pearson, ExactLinearity) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_DOUBLE_EQ(pearson(x, std::vector<double>{2, 4, 6}), 1.0);
  EXPECT_DOUBLE_EQ(pearson(x, std::vector<double>{3, 2, 1}), -1.0);
}

TEST(Pearson, FourPointHandCase) {
  // Sxy = 5.5, Sxx = 5, Syy = 8.75; r = 5.5 / sqrt(43.75).
  const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 5};
  const double hand = 5.5 / std::sqrt(43.75);
  EXPECT_NEAR(hand, 0.831522, 1e-6);
  EXPECT_NEAR(pearson(x, y), hand, 1e-14);
  EXPECT_NEAR(pearson(x, y), oracle::naive_pearson(x, y), 1e-14);
}

TEST(Pearson, TwoPointsAreExactlySigned) {
  EXPECT_EQ(pearson(std::vector<double>{1, 2}, std::vector<double>{5, 3}), -1.0);
  EXPECT_EQ(pearson(std::vector<double>{1, 2}, std::vector<double>{3, 5}), 1.0);
}

TEST(Pearson, Errors) {
  EXPECT_THROW(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), DimensionMismatch);
  EXPECT_THROW(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DegenerateInput);
  EXPECT_THROW(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{4, 4, 4}), DegenerateInput);
  EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{1}), DegenerateInput);
}

TEST(PearsonProperties, BoundedSymmetricAffineInvariant) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> scale(0.1, 10.0), shift(-50, 50);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 3 + trial % 60;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = nd(rng);
      y[i] = 0.4 * x[i] + nd(rng);
    }
    const double r = pearson(x, y);
    ASSERT_GE(r, -1.0);
    ASSERT_LE(r, 1.0);
    EXPECT_NEAR(r, oracle::naive_pearson(x, y), 1e-12);
    EXPECT_DOUBLE_EQ(pearson(y, x), r);
    const double a = scale(rng), b = shift(rng), c = scale(rng), d = shift(rng);
    std::vector<double> xa(n), yc(n), yneg(n);
    for (std::size_t i = 0; i < n; ++i) {
      xa[i] = a * x[i] + b;
      yc[i] = c * y[i] + d;
      yneg[i] = -c * y[i] + d;
    }
    EXPECT_NEAR(pearson(xa, yc), r, 1e-10);
    EXPECT_NEAR(pearson(xa, yneg), -r, 1e-10);
  }
}

TEST(PValue, ZeroCorrelationIsOne) {
  for (std::size_t n : {3u, 10u, 183u}) EXPECT_DOUBLE_EQ(p_value(0.0, n), 1.0);
}

TEST(PValue, PerfectCorrelationIsZero) {
  EXPECT_EQ(p_value(1.0, 10), 0.0);
  EXPECT_EQ(p_value(-1.0, 10), 0.0);
}

TEST(PValue, RejectsSmallN) {
  EXPECT_THROW(p_value(0.5, 2), Error);
}

TEST(PValue, HeadlineCorrelationIsHighlySignificant) {
  EXPECT_LT(p_value(-0.86, 183), 0.001);
}

TEST(PValue, MatchesStudentTReference) {
  for (std::size_t n : {3u, 4u, 10u, 71u, 95u, 183u}) {
    for (double r : {-0.99, -0.86, -0.15, 0.02, 0.3, 0.701}) {
      const double expected = boost_p(r, n);
      EXPECT_NEAR(p_value(r, n), expected, 1e-12 + 1e-9 * expected) << r << ", " << n;
    }
  }
  // Reference value for the Gini-deaths pairing at n = 95.
  EXPECT_NEAR(p_value(-0.15, 95), 0.1468, 5e-4);
}

TEST(PValue, MonotoneInAbsR) {
  double prev = 1.0;
  for (double r = 0.0; r < 0.999; r += 0.01) {
    const double p = p_value(r, 40);
    EXPECT_LE(p, prev + 1e-15);
    EXPECT_DOUBLE_EQ(p_value(-r, 40), p);
    prev = p;
  }
}

TEST(FisherCi, SymmetricAtZeroForHugeN) {
  const auto ci = fisher_ci(0.0, 1'000'000);
  EXPECT_NEAR(ci.low, -0.00196, 1e-4);
  EXPECT_NEAR(ci.high, 0.00196, 1e-4);
  EXPECT_LT(ci.low, 0.0);
  EXPECT_GT(ci.high, 0.0);
}

TEST(FisherCi, PublishedIntervals) {
  const auto headline = fisher_ci(-0.86, 183);
  EXPECT_NEAR(headline.low, -0.89, 0.01);
  EXPECT_NEAR(headline.high, -0.82, 0.01);
  const auto car = fisher_ci(0.701, 183);
  EXPECT_NEAR(car.low, 0.62, 0.01);
  EXPECT_NEAR(car.high, 0.77, 0.01);
}

TEST(FisherCi, MatchesReferenceFormula) {
  for (std::size_t n : {4u, 12u, 183u}) {
    for (double r : {-0.9, -0.2, 0.0, 0.55}) {
      for (double level : {0.9, 0.95, 0.99}) {
        const auto ci = fisher_ci(r, n, level);
        const auto ref = boost_ci(r, n, level);
        EXPECT_NEAR(ci.low, ref.low, 1e-12);
        EXPECT_NEAR(ci.high, ref.high, 1e-12);
        EXPECT_LE(ci.low, r);
        EXPECT_GE(ci.high, r);
      }
    }
  }
}

TEST(FisherCi, ShrinksWithN) {
  double width = 2.0;
  for (std::size_t n = 5; n < 500; n += 7) {
    const auto ci = fisher_ci(0.4, n);
    EXPECT_LT(ci.high - ci.low, width);
    width = ci.high - ci.low;
  }
}

TEST(FisherCi, DegenerateAndInvalid) {
  const auto one = fisher_ci(1.0, 50);
  EXPECT_EQ(one.low, 1.0);
  EXPECT_EQ(one.high, 1.0);
  const auto minus = fisher_ci(-1.0, 50);
  EXPECT_EQ(minus.low, -1.0);
  EXPECT_EQ(minus.high, -1.0);
  EXPECT_THROW(fisher_ci(0.3, 3), Error);
  EXPECT_THROW(fisher_ci(0.3, 30, 1.0), Error);
  EXPECT_THROW(fisher_ci(0.3, 30, 0.0), Error);
}

TEST(Ols, ExactLine) {
  const std::vector<double> x{0, 1, 2, 5}, y{1, 3, 5, 11};
  const auto fit = ols_fit(x, y);
  EXPECT_NEAR(fit.slope, 2.0, 1e-14);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-14);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-14);
}

TEST(Ols, RSquaredIsSquaredPearson) {
  const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 5};
  const auto fit = ols_fit(x, y);
  EXPECT_NEAR(fit.r_squared, 30.25 / 43.75, 1e-14);  // 0.691429...
  EXPECT_NEAR(fit.r_squared, std::pow(oracle::naive_pearson(x, y), 2), 1e-14);
  EXPECT_NEAR(fit.slope, 1.1, 1e-14);
  EXPECT_NEAR(fit.intercept, 0.0, 1e-14);
}

TEST(Ols, ZeroVarianceX) {
  EXPECT_THROW(ols_fit(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}), DegenerateInput);
}

TEST(OlsProperties, ResidualsHaveZeroMeanAndRSquaredMatches) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + trial % 50;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = nd(rng) * 3.0 + 1.0;
      y[i] = -1.7 * x[i] + nd(rng);
    }
    const auto fit = ols_fit(x, y);
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) resid += y[i] - (fit.slope * x[i] + fit.intercept);
    EXPECT_NEAR(resid / static_cast<double>(n), 0.0, 1e-10);
    EXPECT_NEAR(fit.r_squared, std::pow(oracle::naive_pearson(x, y), 2), 1e-12);
  }
}

TEST(Correlate, BundlesAllParts) {
  const std::vector<double> x{1, 2, 3, 4, 5, 6}, y{2.1, 3.9, 6.2, 8.1, 9.7, 12.4};
  const auto c = correlate(x, y);
  EXPECT_EQ(c.n, 6u);
  EXPECT_NEAR(c.r, oracle::naive_pearson(x, y), 1e-14);
  EXPECT_NEAR(c.p_value, boost_p(c.r, 6), 1e-12);
  EXPECT_NEAR(c.r_squared, c.r * c.r, 1e-14);
  const auto ci = boost_ci(c.r, 6, 0.95);
  EXPECT_NEAR(c.ci_low, ci.low, 1e-12);
  EXPECT_NEAR(c.ci_high, ci.high, 1e-12);
}

TEST(Correlate, ThreePointsHaveUninformativeInterval) {
  const auto c = correlate(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2});
  EXPECT_EQ(c.ci_low, -1.0);
  EXPECT_EQ(c.ci_high, 1.0);
  EXPECT_THROW(correlate(std::vector<double>{1, 2}, std::vector<double>{1, 3}), Error);
}

TEST(LogOutcomes, LogOfPositiveValues) {
  const CountryCode a("AAA");
  const auto v = log_outcomes({{a, std::exp(2.0)}});
  EXPECT_NEAR(v.values.at(a), 2.0, 1e-15);
  EXPECT_TRUE(v.dropped.empty());
}

TEST(LogOutcomes, DropsNonPositiveAndMissing) {
  const CountryCode a("AAA"), b("BBB"), c("CCC"), d("DDD");
  const auto v = log_outcomes({{a, 0.0}, {b, -3.0}, {c, std::numeric_limits<double>::quiet_NaN()}},
                              std::vector<CountryCode>{a, b, c, d});
  EXPECT_TRUE(v.values.empty());
  const std::vector<Exclusion> expected{
      {a, "nonpositive"}, {b, "nonpositive"}, {c, "missing"}, {d, "missing"}};
  EXPECT_EQ(v.dropped, expected);
}

TEST(Align, PairwiseCompleteInKeyOrder) {
  const CountryCode a("AAA"), b("BBB"), c("CCC");
  const auto s = align({{c, 3.0}, {a, 1.0}}, {{a, 10.0}, {b, 20.0}, {c, 30.0}});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.codes, (std::vector<CountryCode>{a, c}));
  EXPECT_EQ(s.x, (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(s.y, (std::vector<double>{10.0, 30.0}));
}
