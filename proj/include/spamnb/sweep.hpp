#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "spamnb/crossval.hpp"

namespace spamnb {

struct SweepRow {
  std::size_t n_attrs = 0;
  double lambda = 1.0;
  CvResult result;
};

/// Inclusive arithmetic range, e.g. 50..700 step 50.
inline std::vector<std::size_t> attribute_range(std::size_t first, std::size_t last,
                                                std::size_t step) {
  if (first < 1 || step < 1 || last < first) throw UsageError("invalid attribute range");
  std::vector<std::size_t> out;
  for (std::size_t n = first; n <= last; n += step) out.push_back(n);
  return out;
}

namespace detail {

// For one training set: rank the vocabulary once, then for each attribute
// count train on the prefix and classify the test part at every lambda.
// Produces counts[n][lambda]. Identical to retraining per (n, lambda) because
// selection at n is the n-prefix of the full ranking.
inline std::vector<std::vector<ConfusionCounts>> fold_grid(
    const Corpus& corpus, const Corpus& training, std::span<const std::size_t> test,
    std::span<const double> lambdas, std::span<const std::size_t> n_range, const NbOptions& nb) {
  const auto stats = collect_stats(training);
  const auto ranked = AttributeSet(rank_attributes(stats, nb.selection));
  if (ranked.empty()) throw DataError("no candidate attributes: vocabulary is empty");
  std::vector<std::vector<ConfusionCounts>> grid(n_range.size(),
                                                 std::vector<ConfusionCounts>(lambdas.size()));
  for (std::size_t a = 0; a < n_range.size(); ++a) {
    const auto attrs = ranked.prefix(n_range[a]);
    const auto model = train(stats, attrs, nb.smoothing);
    for (auto i : test) {
      const auto& m = corpus[i];
      if (!m.label) throw DataError("message '" + m.id + "' has no label");
      const double p = posterior_spam(model, vectorize(m, attrs));
      for (std::size_t l = 0; l < lambdas.size(); ++l)
        grid[a][l].add(*m.label, decide(p, lambdas[l]).label);
    }
  }
  return grid;
}

inline void check_sweep_args(std::span<const double> lambdas,
                             std::span<const std::size_t> n_range) {
  if (n_range.empty()) throw UsageError("attribute range is empty");
  if (lambdas.empty()) throw UsageError("no lambda values given");
  for (double l : lambdas) threshold_for(l);
  for (auto n : n_range)
    if (n < 1) throw UsageError("number of attributes must be at least 1");
}

}  // namespace detail

/// Cross-validates Naive Bayes for every (lambda, n) pair. Rows are ordered by
/// lambda, then by n, in the order given.
inline std::vector<SweepRow> attribute_sweep(const Corpus& corpus, const PreprocessConfig& cfg,
                                             std::span<const double> lambdas,
                                             std::span<const std::size_t> n_range,
                                             const FoldPlan& plan, NbOptions nb = {},
                                             RunOptions run = {}) {
  detail::check_sweep_args(lambdas, n_range);
  const auto prepared = preprocess(corpus, cfg);
  plan.check(prepared);
  auto grids = detail::parallel_map(plan.k, run.jobs, [&](std::size_t fold) {
    const auto training = prepared.subset(plan.train_indices(fold));
    detail::require_both_classes(training, fold);
    const auto test = plan.test_indices(fold);
    return detail::fold_grid(prepared, training, test, lambdas, n_range, nb);
  });

  std::vector<SweepRow> rows;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    for (std::size_t a = 0; a < n_range.size(); ++a) {
      std::vector<ConfusionCounts> folds;
      for (const auto& g : grids) folds.push_back(g[a][l]);
      rows.push_back({n_range[a], lambdas[l], aggregate_folds(folds, lambdas[l], plan.seed)});
    }
  }
  return rows;
}

struct TrainingSizeRow {
  double fraction = 1.0;
  CvResult result;
};

/// Per part of the plan, a seeded order of its members. Taking the first
/// ceil(x * |part|) of each order gives nested training subsets.
inline std::vector<std::vector<std::size_t>> part_orders(const FoldPlan& plan) {
  std::vector<std::vector<std::size_t>> parts(plan.k);
  for (std::size_t i = 0; i < plan.fold_of.size(); ++i) parts[plan.fold_of[i]].push_back(i);
  for (std::size_t j = 0; j < plan.k; ++j) {
    detail::Rng rng(detail::mix_seed(plan.seed, j));
    rng.shuffle(parts[j]);
  }
  return parts;
}

inline std::size_t subset_size(std::size_t part_size, double fraction) {
  const double exact = fraction * static_cast<double>(part_size);
  // Guard 0.3 * 10 = 3.0000000000000004 from rounding up to 4.
  const auto n = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::min(part_size, n);
}

/// Cross-validation where only the given fraction of each training part is
/// used. The test part is always complete.
inline std::vector<TrainingSizeRow> training_size_sweep(
    const Corpus& corpus, const PreprocessConfig& cfg, std::size_t n_attrs, double lambda,
    const FoldPlan& plan, std::span<const double> fractions, NbOptions nb = {},
    RunOptions run = {}) {
  if (fractions.empty()) throw UsageError("no training fractions given");
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0)) throw UsageError("training fractions must lie in (0, 1]");
  const double lambdas[] = {lambda};
  const std::size_t ns[] = {n_attrs};
  detail::check_sweep_args(lambdas, ns);
  const auto prepared = preprocess(corpus, cfg);
  plan.check(prepared);
  const auto orders = part_orders(plan);

  // One job per (fraction, fold).
  const std::size_t jobs_total = fractions.size() * plan.k;
  auto counts = detail::parallel_map(jobs_total, run.jobs, [&](std::size_t job) {
    const double fraction = fractions[job / plan.k];
    const std::size_t fold = job % plan.k;
    std::vector<std::size_t> train_idx;
    for (std::size_t j = 0; j < plan.k; ++j) {
      if (j == fold) continue;
      const auto take = subset_size(orders[j].size(), fraction);
      train_idx.insert(train_idx.end(), orders[j].begin(),
                       orders[j].begin() + static_cast<std::ptrdiff_t>(take));
    }
    std::sort(train_idx.begin(), train_idx.end());
    const auto training = prepared.subset(train_idx);
    detail::require_both_classes(training, fold);
    const auto test = plan.test_indices(fold);
    return detail::fold_grid(prepared, training, test, lambdas, ns, nb)[0][0];
  });

  std::vector<TrainingSizeRow> rows;
  for (std::size_t f = 0; f < fractions.size(); ++f) {
    std::span<const ConfusionCounts> folds(counts.data() + f * plan.k, plan.k);
    rows.push_back({fractions[f], aggregate_folds(folds, lambda, plan.seed)});
  }
  return rows;
}

}  // namespace spamnb
