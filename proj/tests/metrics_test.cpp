#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cadict/metrics.hpp"

namespace cadict {
namespace {

// Test-side oracles, independent of the library's sort-based ranking and
// compensated sums.
double oracle_spearman_no_ties(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rank = [](const std::vector<double>& v, std::size_t i) {
    std::size_t below = 0;
    for (double u : v) below += u < v[i];
    return static_cast<double>(below + 1);
  };
  const double n = static_cast<double>(x.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = rank(x, i) - rank(y, i);
    d2 += d * d;
  }
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(AverageRanks, Examples) {
  EXPECT_EQ(average_ranks(std::vector<double>{10, 20, 30}), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(average_ranks(std::vector<double>{10, 10, 30}), (std::vector<double>{1.5, 1.5, 3}));
  EXPECT_EQ(average_ranks(std::vector<double>{5, 5, 5}), (std::vector<double>{2, 2, 2}));
  EXPECT_EQ(average_ranks(std::vector<double>{3, 1, 2}), (std::vector<double>{3, 1, 2}));
}

TEST(AverageRanks, SumIsTriangular) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> v(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<double> x(n);
    for (auto& e : x) e = v(rng);
    const auto r = average_ranks(x);
    double sum = 0.0;
    for (double e : r) sum += e;
    EXPECT_DOUBLE_EQ(sum, n * (n + 1) / 2.0);
  }
}

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0);
  const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 4};
  const double expected = oracle_spearman_no_ties(x, y);  // 1 - 6*2/60
  EXPECT_NEAR(expected, 0.8, 1e-15);
  EXPECT_NEAR(spearman(x, y), expected, 1e-12);
}

TEST(Spearman, ConstantInputIsUndefined) {
  EXPECT_THROW(spearman(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}), DataError);
  EXPECT_FALSE(try_spearman(std::vector<double>{1, 2, 3}, std::vector<double>{4, 4, 4}));
}

TEST(Spearman, PreconditionErrors) {
  EXPECT_THROW(spearman(std::vector<double>{1}, std::vector<double>{1}), UsageError);
  EXPECT_THROW(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), UsageError);
}

TEST(Spearman, SymmetricAndInvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 40;
    std::vector<double> x(n), y(n), ex(n), cube(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = g(rng);
      y[i] = x[i] + g(rng);
      ex[i] = std::exp(x[i]);
      cube[i] = y[i] * y[i] * y[i];
    }
    const auto r = try_spearman(x, y);
    if (!r) continue;
    EXPECT_EQ(*r, *try_spearman(y, x));
    EXPECT_NEAR(*r, *try_spearman(ex, y), 1e-12);
    EXPECT_NEAR(*r, *try_spearman(x, cube), 1e-12);
  }
}

TEST(Pearson, Examples) {
  const std::vector<double> x{-2.0, 0.5, 1.0, 7.0};
  std::vector<double> lin(x.size()), neg(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) lin[i] = 2.0 * x[i] + 1.0, neg[i] = -x[i];
  EXPECT_DOUBLE_EQ(pearson(x, lin), 1.0);
  EXPECT_DOUBLE_EQ(pearson(x, neg), -1.0);

  const std::vector<double> a{1, 2, 3}, b{1, 2, 4};
  // 3 / sqrt(2 * 42/9) from the deviation sums
  EXPECT_NEAR(oracle_pearson(a, b), 3.0 / std::sqrt(2.0 * 42.0 / 9.0), 1e-15);
  EXPECT_NEAR(pearson(a, b), 0.98198051, 1e-8);
}

TEST(Pearson, ZeroVariance) {
  EXPECT_THROW(pearson(std::vector<double>{1, 1}, std::vector<double>{1, 2}), DataError);
}

TEST(Pearson, AffineInvariance) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> slope(0.01, 100.0), shift(-50.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 50;
    std::vector<double> x(n), y(n), t(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = g(rng), y[i] = x[i] * 0.5 + g(rng);
    const double a = slope(rng), b = shift(rng);
    for (std::size_t i = 0; i < n; ++i) t[i] = a * x[i] + b;
    EXPECT_NEAR(pearson(x, y), pearson(t, y), 1e-9);
    EXPECT_NEAR(pearson(x, y), oracle_pearson(x, y), 1e-12);
  }
}

TEST(BinaryAccuracy, Examples) {
  const std::vector<double> gold{1.5, 4.2, 2.9, 3.0, 4.9, 1.1};
  EXPECT_DOUBLE_EQ(binary_accuracy(gold, gold, 3.0, 3.0), 1.0);

  // perfect anti-ranking, three items per class
  std::vector<double> inverted(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) inverted[i] = 6.0 - gold[i];
  EXPECT_DOUBLE_EQ(binary_accuracy(inverted, gold, 3.0, 3.05), 0.0);

  // pred >= 2.5: F F T T; gold >= 3: F F T F; three of four agree
  EXPECT_DOUBLE_EQ(binary_accuracy(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 1, 5, 1}, 3.0, 2.5),
                   0.75);
}

TEST(BinaryAccuracy, ComplementOnInvertedPredictions) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(1.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<double> pred(n), gold(n), inv(n);
    for (std::size_t i = 0; i < n; ++i) pred[i] = u(rng), gold[i] = u(rng), inv[i] = -pred[i];
    const double t = 3.0;
    // -pred >= -t + tiny flips every strict side; no ties at t with continuous draws
    const double a = binary_accuracy(pred, gold, 3.0, t);
    const double b = binary_accuracy(inv, gold, 3.0, std::nextafter(-t, 0.0));
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_NEAR(a + b, 1.0, 1e-12);
  }
}

TEST(MatchedThreshold, GoldAgainstItselfIsPerfect) {
  const std::vector<double> gold{1.2, 3.0, 4.4, 2.2, 3.0, 4.9, 1.0, 2.99};
  const auto report = evaluate(gold, gold);
  EXPECT_DOUBLE_EQ(report.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(report.r_s, 1.0);
  EXPECT_DOUBLE_EQ(report.rho, 1.0);
  EXPECT_EQ(report.threshold_pred, 3.0);

  // any strictly increasing map of gold keeps the split
  std::vector<double> raw(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) raw[i] = std::exp(gold[i]);
  EXPECT_DOUBLE_EQ(evaluate(raw, gold).accuracy, 1.0);
}

TEST(MatchedThreshold, AllAbstractGold) {
  const std::vector<double> gold{1.0, 2.0}, pred{0.3, 0.1};
  EXPECT_TRUE(std::isinf(matched_pred_threshold(pred, gold, 3.0)));
  EXPECT_DOUBLE_EQ(evaluate(pred, gold).accuracy, 1.0);
}

// Metric oracle over many small lists; ties compared against an O(n^2)
// average-rank brute force.
TEST(SpearmanOracle, RandomSmallLists) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_int_distribution<int> small(0, 3);
  const auto brute_ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) less += w < v[i], equal += w == v[i];
      r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    std::vector<double> x(n), y(n), tx(n), ty(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = u(rng), y[i] = u(rng), tx[i] = small(rng), ty[i] = small(rng);
    EXPECT_NEAR(spearman(x, y), oracle_spearman_no_ties(x, y), 1e-12);
    const auto r = try_spearman(tx, ty);
    const auto bx = brute_ranks(tx), by = brute_ranks(ty);
    if (!r) continue;
    EXPECT_NEAR(*r, oracle_pearson(bx, by), 1e-12);
  }
}

}  // namespace
}  // namespace cadict
