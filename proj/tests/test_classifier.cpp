#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "spamnb/classifier.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace spamnb {
namespace {

AttributeSet attrs_of(std::size_t n) {
  std::vector<Attribute> a;
  for (std::size_t i = 0; i < n; ++i) a.push_back({"t" + std::to_string(i), 0.0, i});
  return AttributeSet(std::move(a));
}

NbModel random_model(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::vector<double> ps(n), pl(n);
  for (std::size_t i = 0; i < n; ++i) {
    ps[i] = u(rng);
    pl[i] = u(rng);
  }
  return NbModel(attrs_of(n), ps, pl, 1 + rng() % 700, 1 + rng() % 700, Smoothing{});
}

std::vector<double> p_spam(const NbModel& m) {
  std::vector<double> v;
  for (std::size_t i = 0; i < m.size(); ++i) v.push_back(m.p_present_spam(i));
  return v;
}
std::vector<double> p_legit(const NbModel& m) {
  std::vector<double> v;
  for (std::size_t i = 0; i < m.size(); ++i) v.push_back(m.p_present_legit(i));
  return v;
}

TEST(Train, PriorsAndLaplaceConditionals) {
  const auto corpus = testing::make_separable_corpus(50, 50, 1);
  const auto model = train(corpus, select_attributes(corpus, 10));
  EXPECT_DOUBLE_EQ(model.prior_spam(), 0.5);

  StatsTable stats;
  stats.n_spam = 2;
  stats.n_legit = 618;
  stats.by_token["cash"] = AttributeStats{"cash", 2, 0, 0, 618};
  const auto m = train(stats, AttributeSet({{"cash", 1.0, 0}}));
  EXPECT_DOUBLE_EQ(m.p_present_spam(0), 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(m.p_present_legit(0), 1.0 / 620.0);
  EXPECT_DOUBLE_EQ(m.prior_spam() + m.prior_legit(), 1.0);
}

TEST(Train, AlphaIsConfigurable) {
  StatsTable stats;
  stats.n_spam = 4;
  stats.n_legit = 4;
  stats.by_token["x"] = AttributeStats{"x", 1, 0, 3, 4};
  const auto m = train(stats, AttributeSet({{"x", 0.0, 0}}), Smoothing{0.5});
  EXPECT_DOUBLE_EQ(m.p_present_spam(0), 1.5 / 5.0);
  EXPECT_THROW(train(stats, AttributeSet({{"x", 0.0, 0}}), Smoothing{0.0}), UsageError);
}

TEST(Train, SingleClassIsRejected) {
  StatsTable stats;
  stats.n_spam = 3;
  EXPECT_THROW(train(stats, attrs_of(1)), DataError);
}

TEST(Posterior, SymmetricModelGivesHalf) {
  const NbModel m(attrs_of(3), {0.2, 0.7, 0.4}, {0.2, 0.7, 0.4}, 10, 10, Smoothing{});
  EXPECT_DOUBLE_EQ(posterior_spam(m, FeatureVector{{1, 0, 1}}), 0.5);
}

TEST(Posterior, AllZeroVectorHandComputed) {
  // prior 1/3 spam; absent factors (1-0.6)(1-0.5) vs (1-0.1)(1-0.2).
  const NbModel m(attrs_of(2), {0.6, 0.5}, {0.1, 0.2}, 20, 10, Smoothing{});
  const double s = (1.0 / 3) * 0.4 * 0.5, l = (2.0 / 3) * 0.9 * 0.8;
  EXPECT_NEAR(posterior_spam(m, FeatureVector{{0, 0}}), s / (s + l), 1e-15);
}

TEST(Posterior, ExhaustiveThreeAttributeOracle) {
  std::mt19937_64 rng(3);
  const auto m = random_model(rng, 3);
  for (int bits = 0; bits < 8; ++bits) {
    std::vector<int> x = {bits & 1, (bits >> 1) & 1, (bits >> 2) & 1};
    FeatureVector v{{std::uint8_t(x[0]), std::uint8_t(x[1]), std::uint8_t(x[2])}};
    EXPECT_NEAR(posterior_spam(m, v), oracle::posterior_direct(m.prior_spam(), p_spam(m), p_legit(m), x), 1e-12);
  }
}

TEST(Posterior, LargeModelsMatchDirectProduct) {
  std::mt19937_64 rng(21);
  for (int iter = 0; iter < 20; ++iter) {
    const auto m = random_model(rng, 700);
    std::vector<int> x(700);
    FeatureVector v{std::vector<std::uint8_t>(700)};
    for (std::size_t i = 0; i < 700; ++i) v.bits[i] = std::uint8_t(x[i] = int(rng() % 6 == 0));
    // Scale-invariant direct form over log-free ratios, grouped to avoid underflow.
    double ratio = m.prior_spam() / m.prior_legit();
    for (std::size_t i = 0; i < 700; ++i)
      ratio *= x[i] ? m.p_present_spam(i) / m.p_present_legit(i)
                    : (1 - m.p_present_spam(i)) / (1 - m.p_present_legit(i));
    const double direct = std::isinf(ratio) ? 1.0 : ratio / (1.0 + ratio);
    ASSERT_NEAR(posterior_spam(m, v), direct, 1e-9);
  }
}

TEST(Posterior, LengthMismatchThrows) {
  const NbModel m(attrs_of(2), {0.5, 0.5}, {0.5, 0.5}, 1, 1, Smoothing{});
  EXPECT_THROW(posterior_spam(m, FeatureVector{{1}}), UsageError);
}

TEST(Posterior, PermutationInvariant) {
  std::mt19937_64 rng(8);
  for (int iter = 0; iter < 50; ++iter) {
    const std::size_t n = 1 + rng() % 20;
    const auto m = random_model(rng, n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> ps(n), pl(n);
    FeatureVector v{std::vector<std::uint8_t>(n)}, pv{std::vector<std::uint8_t>(n)};
    for (auto& b : v.bits) b = std::uint8_t(rng() % 2);
    for (std::size_t i = 0; i < n; ++i) {
      ps[i] = m.p_present_spam(perm[i]);
      pl[i] = m.p_present_legit(perm[i]);
      pv.bits[i] = v.bits[perm[i]];
    }
    const NbModel permuted(attrs_of(n), ps, pl, m.n_legit(), m.n_spam(), Smoothing{});
    ASSERT_NEAR(posterior_spam(permuted, pv), posterior_spam(m, v), 1e-12);
  }
}

TEST(Posterior, NeverExactlyZeroOrOneOnModestModels) {
  std::mt19937_64 rng(4);
  for (int iter = 0; iter < 100; ++iter) {
    const auto m = random_model(rng, 10);
    FeatureVector v{std::vector<std::uint8_t>(10)};
    for (auto& b : v.bits) b = std::uint8_t(rng() % 2);
    const double p = posterior_spam(m, v);
    ASSERT_GT(p, 0.0);
    ASSERT_LT(p, 1.0);
  }
}

TEST(Decision, ThresholdTable) {
  EXPECT_EQ(threshold_for(1), 0.5);
  EXPECT_EQ(threshold_for(9), 0.9);
  EXPECT_EQ(threshold_for(999), 0.999);
  EXPECT_THROW(threshold_for(0), UsageError);
  EXPECT_THROW(threshold_for(-1), UsageError);
}

TEST(Decision, TieGoesToLegitimate) {
  EXPECT_EQ(decide(0.5, 1).label, Label::legitimate);
  EXPECT_EQ(decide(0.9, 9).label, Label::legitimate);
  EXPECT_EQ(decide(std::nextafter(0.5, 1.0), 1).label, Label::spam);
  const auto d = decide(1.0, 999);
  EXPECT_EQ(d.label, Label::spam);
  EXPECT_EQ(d.threshold, 0.999);
  EXPECT_EQ(d.lambda, 999);
}

TEST(Decision, RatioAndThresholdFormsAgree) {
  std::mt19937_64 rng(12);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t n = 1 + rng() % 10;
    const auto m = random_model(rng, n);
    FeatureVector v{std::vector<std::uint8_t>(n)};
    std::vector<int> x(n);
    for (std::size_t i = 0; i < n; ++i) v.bits[i] = std::uint8_t(x[i] = int(rng() % 2));
    // Ratio form from the direct products.
    double s = m.prior_spam(), l = m.prior_legit();
    for (std::size_t i = 0; i < n; ++i) {
      s *= x[i] ? m.p_present_spam(i) : 1 - m.p_present_spam(i);
      l *= x[i] ? m.p_present_legit(i) : 1 - m.p_present_legit(i);
    }
    for (double lambda : {1.0, 9.0, 999.0}) {
      const bool ratio_spam = s / l > lambda;
      const bool margin = std::abs(s / l - lambda) < 1e-9 * lambda;
      if (!margin) {
        ASSERT_EQ(classify(m, v, lambda).label == Label::spam, ratio_spam);
      }
    }
  }
}

TEST(Decision, MonotoneInLambda) {
  std::mt19937_64 rng(5);
  const std::vector<double> lambdas = {0.5, 1, 2, 9, 50, 999};
  for (int iter = 0; iter < 200; ++iter) {
    const auto m = random_model(rng, 8);
    FeatureVector v{std::vector<std::uint8_t>(8)};
    for (auto& b : v.bits) b = std::uint8_t(rng() % 2);
    bool was_legit = false;
    for (double lambda : lambdas) {
      const bool spam = classify(m, v, lambda).label == Label::spam;
      ASSERT_FALSE(spam && was_legit);
      was_legit = was_legit || !spam;
    }
  }
}

TEST(Model, RoundTripPreservesDecisions) {
  testing::SyntheticSpec spec;
  spec.n_spam = 80;
  spec.n_legit = 100;
  spec.seed = 9;
  const auto corpus = testing::make_synthetic_corpus(spec);
  const auto model = train(corpus, select_attributes(corpus, 60), Smoothing{}, 0xabcdefULL);
  std::stringstream ss;
  model.write(ss);
  const auto back = NbModel::read(ss);
  EXPECT_EQ(back.preprocess_fingerprint(), 0xabcdefULL);
  EXPECT_EQ(back.n_spam(), 80u);
  for (const auto& m : corpus.messages())
    for (double lambda : {1.0, 9.0, 999.0})
      ASSERT_EQ(classify(back, m, lambda).label, classify(model, m, lambda).label) << m.id;
}

TEST(Model, ReadRejectsMalformedFiles) {
  std::istringstream wrong_version("spamnb-model 2\n");
  EXPECT_THROW(NbModel::read(wrong_version), DataError);
  std::istringstream truncated(
      "spamnb-model 1\nn_legit 3\nn_spam 2\nsmoothing add-alpha 1\npreprocess 0\nattributes 2\nx 0.5 0.5\n");
  EXPECT_THROW(NbModel::read(truncated), DataError);
  std::istringstream zero_prob(
      "spamnb-model 1\nn_legit 3\nn_spam 2\nsmoothing add-alpha 1\npreprocess 0\nattributes 1\nx 0 0.5\n");
  EXPECT_THROW(NbModel::read(zero_prob), DataError);
}

TEST(Classify, SeparableTrainingSetHasNoErrors) {
  const auto corpus = testing::make_separable_corpus(40, 40, 2);
  const auto model = train(corpus, select_attributes(corpus, 80));
  for (const auto& m : corpus.messages()) EXPECT_EQ(classify(model, m, 1).label, *m.label) << m.id;
}

}  // namespace
}  // namespace spamnb
