// Acceptance checks. Prints one "criterion N: PASS|FAIL" line per check after
// the GoogleTest run; the exit status is nonzero if any check failed.

#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <random>
#include <set>

#include "spamnb_cli.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "support/tempdir.hpp"

namespace spamnb {
namespace {

// ---- 1 ------------------------------------------------------------------

TEST(Acceptance, C01_BaselineArithmetic) {
  const ConfusionCounts base{618, 0, 481, 0};
  const std::pair<double, double> rows[] = {{1, 56.233}, {9, 92.040}, {999, 99.922}};
  for (auto [lambda, wacc] : rows) {
    const auto r = metrics(base, lambda);
    EXPECT_NEAR(100 * r.w_accuracy, wacc, 0.001) << "lambda " << lambda;
    EXPECT_EQ(r.tcr, 1.0);
    EXPECT_FALSE(r.spam_precision);
  }
}

// ---- 2 ------------------------------------------------------------------

TEST(Acceptance, C02_KeywordRowConsistency) {
  const ConfusionCounts kw{605, 13, 226, 255};
  const auto r1 = metrics(kw, 1);
  const auto r9 = metrics(kw, 9);
  EXPECT_NEAR(100 * r1.spam_recall, 53.01, 0.02);
  ASSERT_TRUE(r1.spam_precision);
  EXPECT_NEAR(100 * *r1.spam_precision, 95.15, 0.02);
  EXPECT_NEAR(100 * r1.w_accuracy, 78.25, 0.02);
  EXPECT_NEAR(r1.tcr, 2.01, 0.02);
  EXPECT_NEAR(100 * r9.w_accuracy, 94.32, 0.02);
  EXPECT_NEAR(r9.tcr, 1.40, 0.02);
}

// ---- 3 ------------------------------------------------------------------

TEST(Acceptance, C03_ThresholdTable) {
  const NbModel model(AttributeSet({{"x", 0.0, 0}}), {0.5}, {0.5}, 1, 1, Smoothing{});
  const FeatureVector v{{1}};
  const std::pair<double, double> table[] = {{1, 0.5}, {9, 0.9}, {999, 0.999}};
  for (auto [lambda, t] : table) {
    const auto d = classify(model, v, lambda);
    EXPECT_EQ(d.threshold, t);
    EXPECT_EQ(d.lambda, lambda);
  }
}

// ---- 4 ------------------------------------------------------------------

TEST(Acceptance, C04_MutualInformationOracle) {
  std::mt19937_64 rng(2024);
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t ns = 1 + rng() % 25, nl = 1 + rng() % 25;  // table size <= 50
    const std::size_t a = rng() % (ns + 1), b = rng() % (nl + 1);
    const AttributeStats s{"t", a, b, ns - a, nl - b};
    ASSERT_NEAR(mutual_information(s, nl, ns),
                oracle::mi_bruteforce(double(a), double(b), double(ns - a), double(nl - b)), 1e-12);
  }
  EXPECT_EQ(mutual_information(AttributeStats{"c", 7, 9, 0, 0}, 9, 7), 0.0);    // constant
  EXPECT_EQ(mutual_information(AttributeStats{"i", 3, 6, 3, 6}, 12, 6), 0.0);   // independent
  EXPECT_NEAR(mutual_information(AttributeStats{"p", 8, 0, 0, 8}, 8, 8), 1.0, 1e-15);
}

// ---- 5 ------------------------------------------------------------------

TEST(Acceptance, C05_PosteriorOracle) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t n = 1 + rng() % 10;
    std::vector<Attribute> attrs;
    std::vector<double> ps(n), pl(n);
    std::vector<int> x(n);
    FeatureVector v{std::vector<std::uint8_t>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      attrs.push_back({"a" + std::to_string(i), 0.0, i});
      ps[i] = u(rng);
      pl[i] = u(rng);
      v.bits[i] = std::uint8_t(x[i] = int(rng() % 2));
    }
    const std::size_t n_legit = 1 + rng() % 1000, n_spam = 1 + rng() % 1000;
    const NbModel m(AttributeSet(attrs), ps, pl, n_legit, n_spam, Smoothing{});
    const double prior = double(n_spam) / double(n_legit + n_spam);
    ASSERT_NEAR(posterior_spam(m, v), oracle::posterior_direct(prior, ps, pl, x), 1e-9);
  }
}

// ---- 6 ------------------------------------------------------------------

TEST(Acceptance, C06_CrossValidationOracle) {
  testing::SyntheticSpec spec;
  spec.n_spam = 20;
  spec.n_legit = 20;
  spec.shared_words = 30;
  spec.shared_rate = 0.15;
  spec.indicative_words = 8;
  spec.seed = 40;
  const auto corpus = testing::make_synthetic_corpus(spec);
  const auto plan = make_folds(corpus, 4, 4040);
  for (std::size_t n : {4u, 12u, 40u}) {
    for (double lambda : {1.0, 9.0, 999.0}) {
      const auto got = cross_validate(corpus, PreprocessConfig{}, n, lambda, plan);
      const auto want = oracle::cross_validate_bruteforce(corpus.messages(), plan.fold_of, 4, n, lambda);
      for (std::size_t f = 0; f < 4; ++f) {
        const auto& w = want.folds[f];
        EXPECT_EQ(got.folds[f].counts, (ConfusionCounts{w.ll, w.ls, w.sl, w.ss}));
      }
      EXPECT_EQ(got.mean_w_accuracy, want.mean_wacc);
      if (std::isinf(want.tcr)) {
        EXPECT_TRUE(std::isinf(got.tcr));
      } else {
        EXPECT_NEAR(got.tcr, want.tcr, 1e-12 * want.tcr);
      }
    }
  }
  // Two folds with unequal WErr: ratio of means differs from mean of ratios.
  const std::vector<ConfusionCounts> folds = {{10, 0, 1, 9}, {10, 0, 5, 5}};
  const auto r = aggregate_folds(folds, 1);
  const double base = 0.5, w1 = 1.0 / 20, w2 = 5.0 / 20;
  EXPECT_DOUBLE_EQ(r.tcr, base / ((w1 + w2) / 2));
  EXPECT_GT(std::fabs(r.tcr - (base / w1 + base / w2) / 2), 1.0);
}

// ---- 7 ------------------------------------------------------------------

struct SweepRun {
  std::vector<SweepRow> rows;
  FoldPlan plan;
};

const std::vector<double> kLambdas = {1, 9, 999};

SweepRun run_sweep(const Corpus& corpus) {
  const auto plan = make_folds(corpus, 10, 1999);
  const auto range = attribute_range(50, 700, 50);
  return {attribute_sweep(corpus, {}, kLambdas, range, plan, {}, RunOptions{0}), plan};
}

double best_tcr(const std::vector<SweepRow>& rows, double lambda, std::size_t* best_n = nullptr) {
  double best = -1;
  for (const auto& r : rows)
    if (r.lambda == lambda && r.result.tcr > best) {
      best = r.result.tcr;
      if (best_n) *best_n = r.n_attrs;
    }
  return best;
}

TEST(Acceptance, C07_QualitativeReproduction) {
  testing::SyntheticSpec spec;  // 500 spam / 600 legitimate
  spec.indicative_own_rate = 0.20;
  spec.indicative_other_rate = 0.05;
  spec.seed = 7;
  const auto corpus = testing::make_synthetic_corpus(spec);
  const auto sweep = run_sweep(corpus);

  // (a) NB beats the baseline at lambda 1 and 9.
  for (double lambda : {1.0, 9.0}) {
    std::size_t n = 0;
    const double best = best_tcr(sweep.rows, lambda, &n);
    std::cout << "  (a) lambda=" << lambda << " best TCR " << format_tcr(best) << " at n=" << n << '\n';
    EXPECT_GT(best, 1.0);
  }

  // (b) A weak keyword ruleset loses to NB at its best attribute count.
  RuleSet weak;
  weak.rules.push_back(KeywordRule{{{KeywordClause::Field::body, "", "spamword3 "},
                                    {KeywordClause::Field::body, "", "spamword4 "}}});
  weak.rules.push_back(KeywordRule{{{KeywordClause::Field::subject, "", "spamword5"}}});
  weak.rules.push_back(KeywordRule{{{KeywordClause::Field::body, "", "common7 "},
                                    {KeywordClause::Field::body, "", "spamword1 "}}});
  std::unordered_map<std::string, RawMessage> raw;
  for (const auto& m : corpus.messages()) {
    auto r = detokenize(m);
    r.body += ' ';
    raw.emplace(m.id, std::move(r));
  }
  for (double lambda : {1.0, 9.0}) {
    const auto kw = cross_validate(corpus, sweep.plan, lambda, keyword_filter(weak, raw));
    const double nb = best_tcr(sweep.rows, lambda);
    std::cout << "  (b) lambda=" << lambda << " keyword TCR " << format_tcr(kw.tcr) << " SR "
              << format_percent(kw.spam_recall) << " vs NB " << format_tcr(nb) << '\n';
    EXPECT_LT(kw.tcr, nb);
  }

  // (c) At lambda 999 any run with a blocked legitimate message is worse than no filter.
  std::size_t with_errors = 0;
  for (const auto& r : sweep.rows) {
    if (r.lambda != 999 || r.result.pooled.n_ls == 0) continue;
    ++with_errors;
    EXPECT_LT(r.result.tcr, 1.0) << "n=" << r.n_attrs;
  }
  std::cout << "  (c) " << with_errors << " of 14 runs at lambda=999 block a legitimate message\n";
  EXPECT_GT(with_errors, 0u);

  // (d) With many noise tokens, the largest attribute count is past the peak.
  auto noisy_spec = spec;
  noisy_spec.noise_words = 1000;
  const auto noisy = run_sweep(testing::make_synthetic_corpus(noisy_spec));
  for (double lambda : {1.0, 9.0}) {
    std::size_t n = 0;
    const double best = best_tcr(noisy.rows, lambda, &n);
    double at_700 = 0;
    for (const auto& r : noisy.rows)
      if (r.lambda == lambda && r.n_attrs == 700) at_700 = r.result.tcr;
    std::cout << "  (d) lambda=" << lambda << " TCR at 700 " << format_tcr(at_700) << ", best "
              << format_tcr(best) << " at n=" << n << '\n';
    EXPECT_LT(at_700, best);
  }
}

// ---- 8 ------------------------------------------------------------------

TEST(Acceptance, C08_SmallTrainingSets) {
  const auto corpus = testing::make_separable_corpus(500, 600, 8);
  const auto plan = make_folds(corpus, 10, 8);
  const std::vector<double> fractions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  for (double lambda : {1.0, 9.0}) {
    const auto rows = training_size_sweep(corpus, {}, 100, lambda, plan, fractions, {}, RunOptions{0});
    ASSERT_EQ(rows.size(), 10u);
    std::cout << "  lambda=" << lambda << " TCR at 10%: " << format_tcr(rows[0].result.tcr) << '\n';
    EXPECT_GT(rows[0].result.tcr, 1.0);
  }
}

// ---- 9 ------------------------------------------------------------------

TEST(Acceptance, C09_Encryption) {
  RawMessage raw;
  raw.id = "example";
  raw.subject = "Get rich now !";
  raw.body = "Click here to get rich ! Try it now !";
  raw.label = Label::spam;
  const auto [enc, map] = encrypt_corpus(Corpus({tokenize_message(raw)}), TokenMap{});
  EXPECT_EQ(format_message_file(enc[0]), "Subject: 1 2 3 4\n\n5 6 7 1 2 4 8 9 3 4\n");

  std::mt19937_64 rng(9);
  std::vector<Message> msgs;
  for (int i = 0; i < 1000; ++i) {
    Message m{"r" + std::to_string(i), {}, {}, i % 3 ? Label::legitimate : Label::spam};
    for (auto* part : {&m.subject_tokens, &m.body_tokens})
      for (unsigned t = rng() % 25; t > 0; --t) part->push_back("w" + std::to_string(rng() % 300));
    msgs.push_back(std::move(m));
  }
  const Corpus plain(std::move(msgs));
  const auto [coded, codes] = encrypt_corpus(plain, TokenMap{});
  std::map<std::string, std::string> forward, backward;
  bool ok = coded.size() == plain.size();
  for (std::size_t i = 0; ok && i < plain.size(); ++i) {
    const auto& a = plain[i];
    const auto& b = coded[i];
    ok = a.id == b.id && a.label == b.label && a.subject_tokens.size() == b.subject_tokens.size() &&
         a.body_tokens.size() == b.body_tokens.size();
    auto check = [&](const std::vector<std::string>& x, const std::vector<std::string>& y) {
      for (std::size_t j = 0; ok && j < x.size(); ++j) {
        ok = forward.emplace(x[j], y[j]).first->second == y[j] &&
             backward.emplace(y[j], x[j]).first->second == x[j] && detail::is_all_digits(y[j]);
      }
    };
    check(a.subject_tokens, b.subject_tokens);
    check(a.body_tokens, b.body_tokens);
  }
  EXPECT_TRUE(ok) << "encryption must be a consistent bijection preserving lengths";
  EXPECT_EQ(codes.size(), forward.size());
}

// ---- 10 -----------------------------------------------------------------

std::string cli_output(std::vector<std::string> args) {
  std::vector<const char*> argv{"spamnb"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  EXPECT_EQ(code, 0) << err.str();
  return out.str();
}

TEST(Acceptance, C10_Determinism) {
  testing::TempDir tmp;
  testing::SyntheticSpec spec;
  spec.n_spam = 120;
  spec.n_legit = 150;
  spec.seed = 10;
  save_corpus(testing::make_synthetic_corpus(spec), tmp / "corpus");
  const std::vector<std::string> args = {"sweep", (tmp / "corpus").string(), "--seed", "31337"};
  auto with = [&](const char* jobs) {
    auto a = args;
    a.insert(a.end(), {"--jobs", jobs});
    return cli_output(a);
  };
  const auto reference = with("1");
  EXPECT_EQ(reference.substr(0, 26), "# seed=31337 folds=10 stra");
  EXPECT_EQ(std::count(reference.begin(), reference.end(), '\n'), 44);
  EXPECT_EQ(with("1"), reference);
  EXPECT_EQ(with("2"), reference);
  EXPECT_EQ(with("4"), reference);
  EXPECT_EQ(with("0"), reference);
}

// ---- 11 (optional) ------------------------------------------------------

struct ReferenceRow {
  const char* variant;
  double lambda;
  std::size_t n_attrs;
  double recall, precision;
};

// Expects SPAMNB_PU1_DIR to hold the four encrypted variants as corpus
// directories named bare, stoplist, lemmatizer, lemmatizer_stoplist.
TEST(Acceptance, C11_ReferenceCorpusShape) {
  const char* root = std::getenv("SPAMNB_PU1_DIR");
  if (!root) GTEST_SKIP() << "SPAMNB_PU1_DIR not set";
  const ReferenceRow rows[] = {
      {"bare", 1, 50, 83.98, 95.11},          {"stoplist", 1, 50, 84.19, 96.76},
      {"lemmatizer", 1, 100, 78.14, 98.25},   {"lemmatizer_stoplist", 1, 100, 79.60, 97.96},
      {"bare", 9, 100, 78.77, 96.65},         {"stoplist", 9, 150, 74.83, 97.34},
      {"lemmatizer", 9, 100, 75.86, 98.50},   {"lemmatizer_stoplist", 9, 100, 75.86, 97.91},
      {"bare", 999, 700, 46.96, 98.80},       {"stoplist", 999, 700, 47.17, 98.76},
      {"lemmatizer", 999, 50, 60.68, 98.79},  {"lemmatizer_stoplist", 999, 600, 49.45, 98.31},
  };
  for (const auto& row : rows) {
    const auto corpus = load_corpus(std::filesystem::path(root) / row.variant);
    const auto r = cross_validate(corpus, PreprocessConfig{}, row.n_attrs, row.lambda,
                                  make_folds(corpus, 10, 1), {}, RunOptions{0});
    EXPECT_NEAR(100 * r.spam_recall, row.recall, 3.0) << row.variant << " lambda " << row.lambda;
    ASSERT_TRUE(r.spam_precision);
    EXPECT_NEAR(100 * *r.spam_precision, row.precision, 3.0) << row.variant << " lambda " << row.lambda;
  }
}

// Prints the per-criterion summary in test order.
class CriterionPrinter : public ::testing::EmptyTestEventListener {
 public:
  void OnTestEnd(const ::testing::TestInfo& info) override {
    const std::string name = info.name();
    if (name.size() < 4 || name[0] != 'C') return;
    const int n = std::stoi(name.substr(1, 2));
    const auto* result = info.result();
    const char* status = result->Skipped() ? "SKIP" : result->Passed() ? "PASS" : "FAIL";
    lines_.push_back("criterion " + std::to_string(n) + ": " + status + "  " + name.substr(4));
  }
  void OnTestProgramEnd(const ::testing::UnitTest&) override {
    std::cout << '\n';
    for (const auto& l : lines_) std::cout << l << '\n';
  }

 private:
  std::vector<std::string> lines_;
};

}  // namespace
}  // namespace spamnb

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  ::testing::UnitTest::GetInstance()->listeners().Append(new spamnb::CriterionPrinter);
  return RUN_ALL_TESTS();
}
