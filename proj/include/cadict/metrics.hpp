#pragma once

// Agreement between predicted and expert ratings: Spearman's r_s over
// fractional ranks, Pearson's rho, and accuracy of the concrete/abstract
// split.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cadict/error.hpp"

namespace cadict {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// 1-based ranks; tied values share the mean of the positions they occupy.
inline std::vector<double> average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return a < b;
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    // positions i+1 .. j share their mean
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

namespace detail {

inline void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw UsageError("correlation: length mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw UsageError("correlation: need at least 2 pairs");
}

inline double mean(std::span<const double> x) {
  CompensatedSum s;
  for (const double v : x) s.add(v);
  return s.value() / static_cast<double>(x.size());
}

}  // namespace detail

// Product-moment correlation, or nullopt when either list has zero variance.
inline std::optional<double> try_pearson(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  const double mx = detail::mean(x);
  const double my = detail::mean(y);
  CompensatedSum sxy, sxx, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy.add(dx * dy);
    sxx.add(dx * dx);
    syy.add(dy * dy);
  }
  if (!(sxx.value() > 0.0) || !(syy.value() > 0.0)) return std::nullopt;
  return std::clamp(sxy.value() / std::sqrt(sxx.value() * syy.value()), -1.0, 1.0);
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const auto r = try_pearson(x, y);
  if (!r) throw DataError("undefined correlation: zero variance");
  return *r;
}

inline std::optional<double> try_spearman(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return try_pearson(rx, ry);
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  const auto r = try_spearman(x, y);
  if (!r) throw DataError("undefined correlation: constant input");
  return *r;
}

// Spearman against a fixed reference list, with the reference ranked once.
// Gives exactly the bits spearman(x, reference) would.
class SpearmanReference {
 public:
  explicit SpearmanReference(std::span<const double> reference)
      : ranks_(average_ranks(reference)) {}

  std::size_t size() const noexcept { return ranks_.size(); }

  std::optional<double> try_correlate(std::span<const double> x) const {
    detail::check_pair(x, ranks_);
    const auto rx = average_ranks(x);
    return try_pearson(rx, ranks_);
  }

 private:
  std::vector<double> ranks_;
};

// Fraction of items where pred and gold fall on the same side of their
// thresholds (value >= threshold counts as concrete).
inline double binary_accuracy(std::span<const double> pred, std::span<const double> gold,
                              double threshold_gold, double threshold_pred) {
  if (pred.size() != gold.size()) throw UsageError("accuracy: length mismatch");
  if (pred.empty()) throw UsageError("accuracy: empty input");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if ((pred[i] >= threshold_pred) == (gold[i] >= threshold_gold)) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(pred.size());
}

// Prediction threshold that labels as many items concrete as the gold
// threshold does: the k-th largest prediction, k = #{gold >= threshold_gold}.
inline double matched_pred_threshold(std::span<const double> pred, std::span<const double> gold,
                                     double threshold_gold) {
  if (pred.size() != gold.size() || pred.empty()) throw UsageError("threshold: bad input lengths");
  const auto k = static_cast<std::size_t>(
      std::count_if(gold.begin(), gold.end(), [&](double g) { return g >= threshold_gold; }));
  if (k == 0) return std::numeric_limits<double>::infinity();
  std::vector<double> sorted(pred.begin(), pred.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end(),
                   std::greater<>());
  return sorted[k - 1];
}

inline constexpr double kDefaultGoldThreshold = 3.0;

struct EvaluationReport {
  double r_s = 0.0;
  double rho = 0.0;
  double accuracy = 0.0;
  std::size_t n = 0;
  double threshold_gold = kDefaultGoldThreshold;
  double threshold_pred = 0.0;
};

// All three metrics over aligned lists. Without an explicit prediction
// threshold the prevalence-matched one is used.
inline EvaluationReport evaluate(std::span<const double> pred, std::span<const double> gold,
                                 double threshold_gold = kDefaultGoldThreshold,
                                 std::optional<double> threshold_pred = std::nullopt) {
  EvaluationReport report;
  report.n = pred.size();
  report.r_s = spearman(pred, gold);
  report.rho = pearson(pred, gold);
  report.threshold_gold = threshold_gold;
  report.threshold_pred = threshold_pred ? *threshold_pred
                                         : matched_pred_threshold(pred, gold, threshold_gold);
  report.accuracy = binary_accuracy(pred, gold, threshold_gold, report.threshold_pred);
  return report;
}

}  // namespace cadict
