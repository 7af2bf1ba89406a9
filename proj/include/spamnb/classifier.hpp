#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "spamnb/common.hpp"
#include "spamnb/corpus.hpp"
#include "spamnb/features.hpp"

namespace spamnb {

/// Add-alpha estimate over the two outcomes of a binary attribute:
/// P(X=1|c) = (count + alpha) / (N_c + 2 alpha). alpha = 1 is Laplace.
struct Smoothing {
  double alpha = 1.0;

  double estimate(std::size_t present, std::size_t class_total) const {
    return (static_cast<double>(present) + alpha) /
           (static_cast<double>(class_total) + 2.0 * alpha);
  }
};

/// Trained Naive Bayes model over binary word attributes.
class NbModel {
 public:
  NbModel(AttributeSet attrs, std::vector<double> p_spam, std::vector<double> p_legit,
          std::size_t n_legit, std::size_t n_spam, Smoothing smoothing,
          std::uint64_t preprocess_fingerprint = 0)
      : attrs_(std::move(attrs)),
        p_spam_(std::move(p_spam)),
        p_legit_(std::move(p_legit)),
        n_legit_(n_legit),
        n_spam_(n_spam),
        smoothing_(smoothing),
        fingerprint_(preprocess_fingerprint) {
    if (p_spam_.size() != attrs_.size() || p_legit_.size() != attrs_.size())
      throw UsageError("conditional table size does not match the attribute set");
    if (n_legit_ == 0 || n_spam_ == 0)
      throw UsageError("model needs training messages of both classes");
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
      for (double p : {p_spam_[i], p_legit_[i]})
        if (!(p > 0.0 && p < 1.0))
          throw DataError("conditional probability for '" + attrs_[i].token +
                          "' must lie strictly inside (0, 1)");
    }
    const double n = static_cast<double>(n_legit_ + n_spam_);
    prior_spam_ = static_cast<double>(n_spam_) / n;
    prior_legit_ = static_cast<double>(n_legit_) / n;
    // Log-space weights: each class starts from log prior + sum log(1 - p_i);
    // a present attribute swaps its (1 - p_i) factor for p_i.
    base_spam_ = std::log(prior_spam_);
    base_legit_ = std::log(prior_legit_);
    present_spam_.resize(attrs_.size());
    present_legit_.resize(attrs_.size());
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
      base_spam_ += std::log1p(-p_spam_[i]);
      base_legit_ += std::log1p(-p_legit_[i]);
      present_spam_[i] = std::log(p_spam_[i]) - std::log1p(-p_spam_[i]);
      present_legit_[i] = std::log(p_legit_[i]) - std::log1p(-p_legit_[i]);
    }
  }

  const AttributeSet& attributes() const { return attrs_; }
  std::size_t size() const { return attrs_.size(); }
  double prior_spam() const { return prior_spam_; }
  double prior_legit() const { return prior_legit_; }
  /// P(X_i = 1 | spam) and P(X_i = 1 | legitimate).
  double p_present_spam(std::size_t i) const { return p_spam_[i]; }
  double p_present_legit(std::size_t i) const { return p_legit_[i]; }
  std::size_t n_legit() const { return n_legit_; }
  std::size_t n_spam() const { return n_spam_; }
  const Smoothing& smoothing() const { return smoothing_; }
  std::uint64_t preprocess_fingerprint() const { return fingerprint_; }

  /// log P(spam, x) - log P(legit, x).
  double log_odds(const FeatureVector& x) const {
    if (x.size() != attrs_.size())
      throw UsageError("feature vector has " + std::to_string(x.size()) +
                       " entries, model has " + std::to_string(attrs_.size()));
    double s = base_spam_;
    double l = base_legit_;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!x[i]) continue;
      s += present_spam_[i];
      l += present_legit_[i];
    }
    return s - l;
  }

  /// Model file: a header (class counts, smoothing, preprocessing
  /// fingerprint) followed by `<token> <P(1|spam)> <P(1|legit)>` lines with 12
  /// significant digits.
  void write(std::ostream& out) const {
    out << "spamnb-model 1\n"
        << "n_legit " << n_legit_ << '\n'
        << "n_spam " << n_spam_ << '\n'
        << "smoothing add-alpha " << detail::general(smoothing_.alpha, 12) << '\n'
        << "preprocess " << detail::hex64(fingerprint_) << '\n'
        << "attributes " << attrs_.size() << '\n';
    for (std::size_t i = 0; i < attrs_.size(); ++i)
      out << attrs_[i].token << ' ' << detail::general(p_spam_[i], 12) << ' '
          << detail::general(p_legit_[i], 12) << '\n';
  }

  static NbModel read(std::istream& in) {
    auto expect = [&](std::string_view key) {
      std::string line;
      if (!std::getline(in, line)) throw DataError("model file truncated before '" + std::string(key) + "'");
      auto f = detail::split_whitespace(line);
      if (f.empty() || f[0] != key) throw DataError("model file: expected '" + std::string(key) + "'");
      return f;
    };
    auto header = expect("spamnb-model");
    if (header.size() != 2 || header[1] != "1") throw DataError("model file: unsupported version");
    auto field = [](const std::vector<std::string>& f, std::size_t i) -> const std::string& {
      if (f.size() <= i) throw DataError("model file: missing value after '" + f[0] + "'");
      return f[i];
    };
    const auto n_legit = detail::parse_u64(field(expect("n_legit"), 1), "model n_legit");
    const auto n_spam = detail::parse_u64(field(expect("n_spam"), 1), "model n_spam");
    auto sm = expect("smoothing");
    if (sm.size() != 3 || sm[1] != "add-alpha") throw DataError("model file: bad smoothing line");
    const Smoothing smoothing{detail::parse_double(sm[2], "model smoothing")};
    const auto fingerprint =
        detail::parse_u64(field(expect("preprocess"), 1), "model preprocess fingerprint", 16);
    const auto count = detail::parse_u64(field(expect("attributes"), 1), "model attributes");
    std::vector<Attribute> attrs;
    std::vector<double> ps, pl;
    std::string line;
    while (attrs.size() < count && std::getline(in, line)) {
      auto f = detail::split_whitespace(line);
      if (f.empty()) continue;
      if (f.size() != 3) throw DataError("model file: bad attribute line '" + line + "'");
      attrs.push_back({f[0], 0.0, attrs.size()});
      ps.push_back(detail::parse_double(f[1], "model probability"));
      pl.push_back(detail::parse_double(f[2], "model probability"));
    }
    if (attrs.size() != count)
      throw DataError("model file: expected " + std::to_string(count) + " attributes");
    return NbModel(AttributeSet(std::move(attrs)), std::move(ps), std::move(pl), n_legit,
                   n_spam, smoothing, fingerprint);
  }

 private:
  AttributeSet attrs_;
  std::vector<double> p_spam_, p_legit_;
  std::size_t n_legit_, n_spam_;
  Smoothing smoothing_;
  std::uint64_t fingerprint_;
  double prior_spam_ = 0.5, prior_legit_ = 0.5;
  double base_spam_ = 0.0, base_legit_ = 0.0;
  std::vector<double> present_spam_, present_legit_;
};

/// Estimates priors and smoothed conditionals from presence counts.
inline NbModel train(const StatsTable& stats, const AttributeSet& attrs,
                     Smoothing smoothing = {}, std::uint64_t preprocess_fingerprint = 0) {
  if (stats.n_spam == 0 || stats.n_legit == 0)
    throw DataError("training needs at least one spam and one legitimate message");
  if (!(smoothing.alpha > 0.0)) throw UsageError("smoothing alpha must be positive");
  std::vector<double> ps(attrs.size()), pl(attrs.size());
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    std::size_t in_spam = 0, in_legit = 0;
    if (auto it = stats.by_token.find(attrs[i].token); it != stats.by_token.end()) {
      in_spam = it->second.n_x1_spam;
      in_legit = it->second.n_x1_legit;
    }
    ps[i] = smoothing.estimate(in_spam, stats.n_spam);
    pl[i] = smoothing.estimate(in_legit, stats.n_legit);
  }
  return NbModel(attrs, std::move(ps), std::move(pl), stats.n_legit, stats.n_spam, smoothing,
                 preprocess_fingerprint);
}

inline NbModel train(const Corpus& corpus, const AttributeSet& attrs, Smoothing smoothing = {},
                     std::uint64_t preprocess_fingerprint = 0) {
  return train(collect_stats(corpus), attrs, smoothing, preprocess_fingerprint);
}

/// P(spam | x) under conditional independence, normalized in log space.
inline double posterior_spam(const NbModel& model, const FeatureVector& x) {
  const double d = model.log_odds(x);
  if (d >= 0.0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

/// t = lambda / (1 + lambda).
inline double threshold_for(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw UsageError("lambda must be a positive finite number");
  return lambda / (1.0 + lambda);
}

struct Decision {
  double posterior_spam = 0.0;
  Label label = Label::legitimate;
  double lambda = 1.0;
  double threshold = 0.5;
};

/// Spam iff P(spam|x) > lambda / (1 + lambda); ties go to legitimate.
inline Decision decide(double posterior, double lambda) {
  const double t = threshold_for(lambda);
  return Decision{posterior, posterior > t ? Label::spam : Label::legitimate, lambda, t};
}

inline Decision classify(const NbModel& model, const FeatureVector& x, double lambda) {
  return decide(posterior_spam(model, x), lambda);
}

inline Decision classify(const NbModel& model, const Message& msg, double lambda) {
  return classify(model, vectorize(msg, model.attributes()), lambda);
}

}  // namespace spamnb
