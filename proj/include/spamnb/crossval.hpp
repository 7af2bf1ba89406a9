#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "spamnb/classifier.hpp"
#include "spamnb/corpus.hpp"
#include "spamnb/detail/parallel.hpp"
#include "spamnb/features.hpp"
#include "spamnb/keyword_filter.hpp"
#include "spamnb/metrics.hpp"

namespace spamnb {

namespace detail {

/// mt19937_64 has a standardized output sequence; the bounded draw below is
/// also fully specified, so fold plans are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Assignment of every corpus message to one of k folds.
struct FoldPlan {
  std::uint64_t seed = 0;
  std::size_t k = 10;
  bool stratified = false;
  std::vector<std::size_t> fold_of;  // by message position
  std::vector<std::string> ids;      // message ids, for plan/corpus checks

  std::vector<std::size_t> test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
      if (fold_of[i] == fold) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
      if (fold_of[i] != fold) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> fold_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (auto f : fold_of) ++sizes[f];
    return sizes;
  }

  void check(const Corpus& corpus) const {
    if (fold_of.size() != corpus.size())
      throw UsageError("fold plan covers " + std::to_string(fold_of.size()) +
                       " messages, corpus has " + std::to_string(corpus.size()));
    for (std::size_t i = 0; i < corpus.size(); ++i)
      if (ids[i] != corpus[i].id)
        throw UsageError("fold plan does not match corpus at message '" + corpus[i].id + "'");
  }
};

/// Seeded random partition into k folds whose sizes differ by at most one.
/// With `stratified`, each class is shuffled and dealt separately so class
/// ratios are also balanced across folds.
inline FoldPlan make_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed,
                           bool stratified = false) {
  if (k < 2) throw UsageError("need at least 2 folds");
  if (k > corpus.size())
    throw UsageError("cannot split " + std::to_string(corpus.size()) + " messages into " +
                     std::to_string(k) + " folds");
  FoldPlan plan;
  plan.seed = seed;
  plan.k = k;
  plan.stratified = stratified;
  plan.fold_of.assign(corpus.size(), 0);
  for (const auto& m : corpus.messages()) plan.ids.push_back(m.id);

  detail::Rng rng(seed);
  std::vector<std::vector<std::size_t>> groups(stratified ? 2 : 1);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const bool spam = corpus[i].label == Label::spam;
    groups[stratified && spam ? 1 : 0].push_back(i);
  }
  std::size_t dealt = 0;
  for (auto& g : groups) {
    rng.shuffle(g);
    for (auto i : g) plan.fold_of[i] = dealt++ % k;
  }
  return plan;
}

/// Classifier produced by a filter for one fold.
using Predictor = std::function<Label(const Message&)>;
/// Builds a predictor from the training part of a fold.
using FilterTrainer = std::function<Predictor(const Corpus& training)>;

struct NbOptions {
  Smoothing smoothing{};
  SelectionOptions selection{};
};

struct RunOptions {
  /// Worker threads; 0 means one per hardware thread. Results never depend on it.
  unsigned jobs = 1;
};

/// Naive Bayes with MI attribute selection, retrained from scratch on every
/// training set it is handed.
inline FilterTrainer naive_bayes_filter(std::size_t n_attrs, double lambda, NbOptions opts = {}) {
  threshold_for(lambda);
  return [=](const Corpus& training) -> Predictor {
    const auto stats = collect_stats(training);
    auto model = std::make_shared<NbModel>(
        train(stats, select_attributes(stats, n_attrs, opts.selection), opts.smoothing));
    return [model, lambda](const Message& m) { return classify(*model, m, lambda).label; };
  };
}

/// Keyword rules need the untokenized text; messages are looked up by id.
inline FilterTrainer keyword_filter(RuleSet rules,
                                    std::unordered_map<std::string, RawMessage> raw_by_id) {
  auto shared = std::make_shared<const std::pair<RuleSet, std::unordered_map<std::string, RawMessage>>>(
      std::move(rules), std::move(raw_by_id));
  return [shared](const Corpus&) -> Predictor {
    return [shared](const Message& m) {
      auto it = shared->second.find(m.id);
      if (it == shared->second.end())
        throw DataError("no raw text for message '" + m.id + "'");
      return classify_keyword(shared->first, it->second);
    };
  };
}

/// Filter that never blocks anything; reproduces the baseline.
inline FilterTrainer pass_all_filter() {
  return [](const Corpus&) -> Predictor {
    return [](const Message&) { return Label::legitimate; };
  };
}

struct FoldOutcome {
  ConfusionCounts counts;
  double w_accuracy = 0.0;
  double w_error = 0.0;
  double baseline_w_error = 0.0;
};

struct CvResult {
  double lambda = 1.0;
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::vector<FoldOutcome> folds;
  ConfusionCounts pooled;
  double mean_w_accuracy = 0.0;
  double mean_w_error = 0.0;
  double mean_baseline_w_error = 0.0;
  /// Mean baseline WErr over mean WErr; never the mean of per-fold ratios.
  double tcr = 0.0;
  double spam_recall = 0.0;  // from pooled counts
  std::optional<double> spam_precision;
};

/// Combines per-fold counts. WAcc and WErr are fold averages; the overall TCR
/// divides the averaged baseline WErr by the averaged WErr, so folds where the
/// filter does badly are not averaged away.
inline CvResult aggregate_folds(std::span<const ConfusionCounts> folds, double lambda,
                                std::uint64_t seed = 0) {
  threshold_for(lambda);
  if (folds.empty()) throw UsageError("no folds to aggregate");
  CvResult r;
  r.lambda = lambda;
  r.seed = seed;
  r.k = folds.size();
  for (const auto& c : folds) {
    if (c.total() == 0) throw UsageError("empty test fold");
    FoldOutcome f{c, weighted_accuracy(c, lambda), weighted_error(c, lambda),
                  baseline_weighted_error(c, lambda)};
    r.mean_w_accuracy += f.w_accuracy;
    r.mean_w_error += f.w_error;
    r.mean_baseline_w_error += f.baseline_w_error;
    r.pooled += c;
    r.folds.push_back(f);
  }
  const double k = static_cast<double>(folds.size());
  r.mean_w_accuracy /= k;
  r.mean_w_error /= k;
  r.mean_baseline_w_error /= k;
  r.tcr = r.mean_w_error > 0.0 ? r.mean_baseline_w_error / r.mean_w_error : kInfinity;
  if (r.pooled.n_spam() > 0)
    r.spam_recall = static_cast<double>(r.pooled.n_ss) / static_cast<double>(r.pooled.n_spam());
  if (r.pooled.n_ss + r.pooled.n_ls > 0)
    r.spam_precision = static_cast<double>(r.pooled.n_ss) /
                       static_cast<double>(r.pooled.n_ss + r.pooled.n_ls);
  return r;
}

namespace detail {

inline void require_both_classes(const Corpus& training, std::size_t fold) {
  if (training.n_spam() == 0 || training.n_legit() == 0)
    throw DataError("fold " + std::to_string(fold) + ": training set lacks " +
                    (training.n_spam() == 0 ? "spam" : "legitimate") + " messages");
}

inline ConfusionCounts evaluate(const Predictor& predict, const Corpus& corpus,
                                std::span<const std::size_t> test) {
  ConfusionCounts c;
  for (auto i : test) {
    const auto& m = corpus[i];
    if (!m.label) throw DataError("message '" + m.id + "' has no label");
    c.add(*m.label, predict(m));
  }
  return c;
}

}  // namespace detail

/// k-fold cross-validation of an arbitrary filter. Each fold trains on the
/// other k-1 parts only and is tested on its own part.
inline CvResult cross_validate(const Corpus& corpus, const FoldPlan& plan, double lambda,
                               const FilterTrainer& trainer, RunOptions run = {}) {
  plan.check(corpus);
  threshold_for(lambda);
  auto per_fold = detail::parallel_map(plan.k, run.jobs, [&](std::size_t fold) {
    const auto train_idx = plan.train_indices(fold);
    const auto training = corpus.subset(train_idx);
    detail::require_both_classes(training, fold);
    const auto predict = trainer(training);
    return detail::evaluate(predict, corpus, plan.test_indices(fold));
  });
  return aggregate_folds(per_fold, lambda, plan.seed);
}

/// Naive Bayes cross-validation: preprocess, then per fold select `n_attrs`
/// attributes and train on the training parts.
inline CvResult cross_validate(const Corpus& corpus, const PreprocessConfig& cfg,
                               std::size_t n_attrs, double lambda, const FoldPlan& plan,
                               NbOptions nb = {}, RunOptions run = {}) {
  return cross_validate(preprocess(corpus, cfg), plan, lambda,
                        naive_bayes_filter(n_attrs, lambda, nb), run);
}

}  // namespace spamnb
