#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "spamnb/classifier.hpp"
#include "spamnb/common.hpp"

namespace spamnb {

/// Outcome counts; n_ls is a legitimate message blocked as spam, n_sl a spam
/// message let through.
struct ConfusionCounts {
  std::size_t n_ll = 0;
  std::size_t n_ls = 0;
  std::size_t n_sl = 0;
  std::size_t n_ss = 0;

  std::size_t n_legit() const { return n_ll + n_ls; }
  std::size_t n_spam() const { return n_sl + n_ss; }
  std::size_t total() const { return n_legit() + n_spam(); }

  void add(Label actual, Label predicted) {
    if (actual == Label::legitimate)
      (predicted == Label::legitimate ? n_ll : n_ls)++;
    else
      (predicted == Label::legitimate ? n_sl : n_ss)++;
  }

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    n_ll += o.n_ll;
    n_ls += o.n_ls;
    n_sl += o.n_sl;
    n_ss += o.n_ss;
    return *this;
  }

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Every legitimate message weighs lambda.
inline double weighted_total(const ConfusionCounts& c, double lambda) {
  return lambda * static_cast<double>(c.n_legit()) + static_cast<double>(c.n_spam());
}

inline double weighted_error(const ConfusionCounts& c, double lambda) {
  return (lambda * static_cast<double>(c.n_ls) + static_cast<double>(c.n_sl)) /
         weighted_total(c, lambda);
}

inline double weighted_accuracy(const ConfusionCounts& c, double lambda) {
  return (lambda * static_cast<double>(c.n_ll) + static_cast<double>(c.n_ss)) /
         weighted_total(c, lambda);
}

/// Weighted error of not filtering at all: every spam message passes.
inline double baseline_weighted_error(const ConfusionCounts& c, double lambda) {
  return static_cast<double>(c.n_spam()) / weighted_total(c, lambda);
}

struct MetricsReport {
  double lambda = 1.0;
  double spam_recall = 0.0;
  /// Empty when nothing was classified as spam.
  std::optional<double> spam_precision;
  double accuracy = 0.0;
  double error_rate = 0.0;
  double w_accuracy = 0.0;
  double w_error = 0.0;
  double baseline_w_accuracy = 0.0;
  double baseline_w_error = 0.0;
  /// Total cost ratio; +infinity when the filter makes no weighted error.
  double tcr = 0.0;
};

inline MetricsReport metrics(const ConfusionCounts& c, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw UsageError("lambda must be a positive finite number");
  if (c.n_legit() == 0 || c.n_spam() == 0)
    throw UsageError("metrics need at least one legitimate and one spam message");
  const double n_s = static_cast<double>(c.n_spam());
  const double n = static_cast<double>(c.total());

  MetricsReport r;
  r.lambda = lambda;
  r.spam_recall = static_cast<double>(c.n_ss) / n_s;
  if (c.n_ss + c.n_ls > 0)
    r.spam_precision = static_cast<double>(c.n_ss) / static_cast<double>(c.n_ss + c.n_ls);
  r.accuracy = static_cast<double>(c.n_ll + c.n_ss) / n;
  r.error_rate = static_cast<double>(c.n_ls + c.n_sl) / n;
  r.w_accuracy = weighted_accuracy(c, lambda);
  r.w_error = weighted_error(c, lambda);
  r.baseline_w_error = baseline_weighted_error(c, lambda);
  r.baseline_w_accuracy = lambda * static_cast<double>(c.n_legit()) / weighted_total(c, lambda);
  const double cost = lambda * static_cast<double>(c.n_ls) + static_cast<double>(c.n_sl);
  r.tcr = cost > 0.0 ? n_s / cost : kInfinity;
  return r;
}

}  // namespace spamnb
