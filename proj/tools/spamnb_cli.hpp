#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spamnb/spamnb.hpp"

namespace spamnb::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

struct PreprocessFlags {
  bool lemmatize = false;
  bool stoplist = false;
  std::string stoplist_file;
  bool no_case_fold = false;

  PreprocessConfig config() const {
    PreprocessConfig cfg;
    cfg.lemmatize = lemmatize;
    cfg.stoplist = stoplist;
    cfg.case_fold = !no_case_fold;
    if (!stoplist_file.empty()) {
      std::ifstream in(stoplist_file);
      if (!in) throw DataError("cannot open stop-list " + stoplist_file);
      cfg.stoplist_words = read_stoplist(in);
    }
    cfg.validate();
    return cfg;
  }
};

inline void add_preprocess_flags(CLI::App* sub, PreprocessFlags& f) {
  sub->add_flag("--lemmatize", f.lemmatize, "Reduce words to their base form");
  sub->add_flag("--stoplist", f.stoplist, "Drop stop-list words");
  sub->add_option("--stoplist-file", f.stoplist_file,
                  "Stop-list file, one word per line (default: built-in 100 words)");
  sub->add_flag("--no-case-fold", f.no_case_fold, "Keep letter case");
}

struct ExperimentFlags {
  std::string corpus;
  PreprocessFlags pre;
  std::size_t k = 10;
  std::optional<std::uint64_t> seed;
  bool stratified = false;
  unsigned jobs = 1;
  std::string output;
  double alpha = 1.0;
  std::size_t min_df = 1;
  std::string filter = "nb";
  std::string rules;
  std::string raw;
};

inline void add_experiment_flags(CLI::App* sub, ExperimentFlags& f) {
  sub->add_option("corpus", f.corpus, "Corpus directory (spam/ and legit/)")->required();
  add_preprocess_flags(sub, f.pre);
  sub->add_option("--folds", f.k, "Number of cross-validation folds")->capture_default_str();
  sub->add_option("--seed", f.seed, "Seed for the fold partition")->required();
  sub->add_flag("--stratified", f.stratified, "Balance class ratios across folds");
  sub->add_option("--jobs", f.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  sub->add_option("-o,--output", f.output, "Write the CSV here instead of stdout");
  sub->add_option("--alpha", f.alpha, "Add-alpha smoothing constant")->capture_default_str();
  sub->add_option("--min-df", f.min_df, "Minimum document frequency of candidate attributes")
      ->capture_default_str();
  sub->add_option("--filter", f.filter,
                  "'keyword' adds keyword-rule baseline rows next to the Naive Bayes rows")
      ->check(CLI::IsMember({"nb", "keyword"}))
      ->capture_default_str();
  sub->add_option("--rules", f.rules, "Keyword rule file (with --filter keyword)");
  sub->add_option("--raw", f.raw,
                  "Raw message directory for keyword matching (default: rebuild text from tokens)");
}

namespace detail {

inline NbOptions nb_options(const ExperimentFlags& f) {
  NbOptions nb;
  nb.smoothing.alpha = f.alpha;
  nb.selection.min_document_frequency = f.min_df;
  return nb;
}

// Writes to the -o path, or to `out` when none was given.
template <typename F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ostringstream ss;
  write(ss);
  spamnb::write_file(path, ss.str());
}

inline RuleSet load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open rule file " + path);
  return parse_ruleset(in);
}

inline std::unordered_map<std::string, RawMessage> raw_texts(const ExperimentFlags& f,
                                                             const Corpus& corpus,
                                                             std::ostream& err) {
  std::unordered_map<std::string, RawMessage> by_id;
  if (!f.raw.empty()) {
    for (auto& m : load_raw_messages(f.raw)) by_id.emplace(m.id, std::move(m));
    for (const auto& m : corpus.messages())
      if (!by_id.count(m.id))
        throw DataError("raw directory has no message with id '" + m.id + "'");
  } else {
    err << "note: no --raw directory; keyword rules are matched against token text\n";
    for (const auto& m : corpus.messages()) by_id.emplace(m.id, detokenize(m));
  }
  return by_id;
}

// Keyword rows are evaluated with the same fold plan as the Naive Bayes rows.
inline std::vector<ReportRow> keyword_rows(const ExperimentFlags& f, const Corpus& corpus,
                                           const FoldPlan& plan, const std::vector<double>& lambdas,
                                           std::ostream& err) {
  if (f.filter != "keyword") return {};
  if (f.rules.empty()) throw UsageError("--filter keyword needs --rules <file>");
  const auto trainer = keyword_filter(load_rules(f.rules), raw_texts(f, corpus, err));
  std::vector<ReportRow> rows;
  PreprocessConfig none;
  none.lemmatize = false;
  none.stoplist = false;
  for (double lambda : lambdas)
    rows.push_back(report_row(cross_validate(corpus, plan, lambda, trainer,
                                             RunOptions{f.jobs}),
                              "-", none));
  return rows;
}

inline bool has_label_dirs(const fs::path& dir) {
  return fs::is_directory(dir / "spam") || fs::is_directory(dir / "legit");
}

// Messages to classify: a corpus directory, a directory of message files, or
// a single file. With `raw`, files are RFC-822 messages.
inline std::vector<Message> load_inputs(const fs::path& path, bool raw, bool case_fold) {
  std::vector<Message> out;
  auto read_one = [&](const fs::path& file, std::optional<Label> label) {
    const auto text = read_file(file);
    if (raw)
      out.push_back(tokenize_message(
          parse_raw_message(text, file.stem().string(), label, file.string()), case_fold));
    else
      out.push_back(parse_message_file(text, file.stem().string(), label, file.string()));
  };
  if (fs::is_regular_file(path)) {
    read_one(path, std::nullopt);
  } else if (fs::is_directory(path) && has_label_dirs(path)) {
    if (raw) {
      for (const auto& m : load_raw_messages(path)) out.push_back(tokenize_message(m, case_fold));
    } else {
      out = load_corpus(path).messages();
    }
  } else if (fs::is_directory(path)) {
    for (const auto& file : spamnb::detail::sorted_files(path, raw ? "" : ".txt"))
      read_one(file, std::nullopt);
  } else {
    throw DataError(path.string() + " does not exist");
  }
  return out;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Naive Bayes anti-spam filter with cost-sensitive evaluation", "spamnb"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a TOML/INI file (flags take precedence)");

  // ingest
  std::string ingest_raw, ingest_out;
  bool ingest_dedup = false, ingest_no_fold = false;
  std::size_t ingest_keep = 0;
  auto* ingest = app.add_subcommand("ingest", "Tokenize raw e-mail into a corpus directory");
  ingest->add_option("raw_dir", ingest_raw, "Raw messages under spam/ and legit/")->required();
  ingest->add_option("out_dir", ingest_out, "Output corpus directory")->required();
  ingest->add_flag("--dedup", ingest_dedup, "Drop same-day duplicate spam bodies");
  ingest->add_option("--address-book-keep", ingest_keep,
                     "Keep only each sender's N earliest legitimate messages (0 = off)")
      ->capture_default_str();
  ingest->add_flag("--no-case-fold", ingest_no_fold, "Keep letter case");

  // encrypt
  std::string enc_in, enc_out, enc_map;
  bool enc_all = false;
  PreprocessFlags enc_pre;
  auto* encrypt = app.add_subcommand("encrypt", "Replace tokens by numeric codes");
  encrypt->add_option("corpus", enc_in, "Input corpus directory")->required();
  encrypt->add_option("out_dir", enc_out, "Output directory")->required();
  add_preprocess_flags(encrypt, enc_pre);
  encrypt->add_flag("--all-variants", enc_all,
                    "Write bare/, stoplist/, lemmatizer/ and lemmatizer_stoplist/ variants");
  encrypt->add_option("--map", enc_map, "Token map output (default <out_dir>/tokenmap.txt)");

  // train
  std::string train_in, train_model, train_attrs_out;
  std::size_t train_n = 100, train_min_df = 1;
  double train_alpha = 1.0;
  PreprocessFlags train_pre;
  auto* train_cmd = app.add_subcommand("train", "Train a Naive Bayes model");
  train_cmd->add_option("corpus", train_in, "Corpus directory")->required();
  train_cmd->add_option("model", train_model, "Model output file")->required();
  train_cmd->add_option("--attrs", train_n, "Number of attributes")->capture_default_str();
  train_cmd->add_option("--alpha", train_alpha, "Add-alpha smoothing constant")->capture_default_str();
  train_cmd->add_option("--min-df", train_min_df, "Minimum document frequency")->capture_default_str();
  train_cmd->add_option("--attributes-out", train_attrs_out, "Also write the ranked attribute list");
  add_preprocess_flags(train_cmd, train_pre);

  // classify
  std::string cls_model, cls_input;
  double cls_lambda = 1.0;
  bool cls_raw = false;
  PreprocessFlags cls_pre;
  auto* classify_cmd = app.add_subcommand("classify", "Classify messages with a trained model");
  classify_cmd->add_option("model", cls_model, "Model file")->required();
  classify_cmd->add_option("input", cls_input, "Message file or directory")->required();
  classify_cmd->add_option("--lambda", cls_lambda, "Cost of blocking a legitimate message")
      ->capture_default_str();
  classify_cmd->add_flag("--raw", cls_raw, "Inputs are raw RFC-822 messages");
  add_preprocess_flags(classify_cmd, cls_pre);

  // crossval
  ExperimentFlags cv;
  std::size_t cv_n = 100;
  double cv_lambda = 1.0;
  std::string cv_folds_out;
  auto* crossval = app.add_subcommand("crossval", "k-fold cross-validation of one configuration");
  add_experiment_flags(crossval, cv);
  crossval->add_option("--attrs", cv_n, "Number of attributes")->capture_default_str();
  crossval->add_option("--lambda", cv_lambda, "Cost of blocking a legitimate message")
      ->capture_default_str();
  crossval->add_option("--folds-out", cv_folds_out, "Write per-fold results (for ttest)");

  // sweep
  ExperimentFlags sw;
  std::vector<double> sw_lambdas{1, 9, 999};
  std::size_t sw_from = 50, sw_to = 700, sw_step = 50;
  auto* sweep = app.add_subcommand("sweep", "Cross-validate over attribute counts and lambdas");
  add_experiment_flags(sweep, sw);
  sweep->add_option("--lambdas", sw_lambdas, "Comma-separated lambda values")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--attrs-from", sw_from)->capture_default_str();
  sweep->add_option("--attrs-to", sw_to)->capture_default_str();
  sweep->add_option("--attrs-step", sw_step)->capture_default_str();

  // tsweep
  ExperimentFlags ts;
  std::size_t ts_n = 100;
  double ts_lambda = 1.0;
  std::vector<double> ts_fractions{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  auto* tsweep = app.add_subcommand("tsweep", "Cross-validate with growing training fractions");
  add_experiment_flags(tsweep, ts);
  tsweep->add_option("--attrs", ts_n, "Number of attributes")->capture_default_str();
  tsweep->add_option("--lambda", ts_lambda, "Cost of blocking a legitimate message")
      ->capture_default_str();
  tsweep->add_option("--fractions", ts_fractions, "Comma-separated training fractions")
      ->delimiter(',')
      ->capture_default_str();

  // ttest
  std::string tt_a, tt_b;
  auto* ttest = app.add_subcommand(
      "ttest", "Paired one-sided t-test on per-fold WAcc (hypothesis: A better than B)");
  ttest->add_option("a", tt_a, "Fold report of configuration A")->required();
  ttest->add_option("b", tt_b, "Fold report of configuration B")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest) {
      auto raw = load_raw_messages(ingest_raw);
      if (raw.empty()) throw DataError("no messages in " + ingest_raw);
      const std::size_t before = raw.size();
      if (ingest_dedup) raw = remove_duplicate_spam(std::move(raw));
      const std::size_t after_dedup = raw.size();
      if (ingest_keep > 0) raw = emulate_address_book(std::move(raw), ingest_keep);
      std::vector<Message> msgs;
      for (const auto& m : raw) msgs.push_back(tokenize_message(m, !ingest_no_fold));
      const Corpus corpus(std::move(msgs));
      save_corpus(corpus, ingest_out);
      out << "legit " << corpus.n_legit() << "\nspam " << corpus.n_spam()
          << "\nduplicates_dropped " << (before - after_dedup) << "\naddress_book_dropped "
          << (after_dedup - raw.size()) << '\n';
    } else if (*encrypt) {
      const auto corpus = load_corpus(enc_in);
      struct Variant {
        std::string dir;
        bool lemmatize, stoplist;
      };
      std::vector<Variant> variants;
      if (enc_all) {
        variants = {{"bare", false, false},
                    {"stoplist", false, true},
                    {"lemmatizer", true, false},
                    {"lemmatizer_stoplist", true, true}};
      } else {
        variants = {{"", enc_pre.lemmatize, enc_pre.stoplist}};
      }
      for (const auto& v : variants) {
        auto flags = enc_pre;
        flags.lemmatize = v.lemmatize;
        flags.stoplist = v.stoplist;
        const fs::path dir = v.dir.empty() ? fs::path(enc_out) : fs::path(enc_out) / v.dir;
        auto [encrypted, map] = encrypt_corpus(preprocess(corpus, flags.config()), TokenMap{});
        save_corpus(encrypted, dir);
        const fs::path map_path =
            (!enc_map.empty() && v.dir.empty()) ? fs::path(enc_map) : dir / "tokenmap.txt";
        save_token_map(map, map_path);
        out << (v.dir.empty() ? dir.string() : v.dir) << ": " << encrypted.size()
            << " messages, " << map.size() << " distinct tokens\n";
      }
    } else if (*train_cmd) {
      const auto cfg = train_pre.config();
      const auto corpus = preprocess(load_corpus(train_in), cfg);
      const auto stats = collect_stats(corpus);
      SelectionOptions sel;
      sel.min_document_frequency = train_min_df;
      const auto attrs = select_attributes(stats, train_n, sel);
      if (attrs.truncated())
        err << "warning: only " << attrs.size() << " candidate attributes available\n";
      const auto model = train(stats, attrs, Smoothing{train_alpha}, cfg.fingerprint());
      std::ostringstream ss;
      model.write(ss);
      write_file(train_model, ss.str());
      if (!train_attrs_out.empty()) {
        std::ostringstream as;
        attrs.write(as);
        write_file(train_attrs_out, as.str());
      }
      out << "trained on " << corpus.n_legit() << " legitimate and " << corpus.n_spam()
          << " spam messages, " << attrs.size() << " attributes\n";
    } else if (*classify_cmd) {
      std::ifstream in(cls_model);
      if (!in) throw DataError("cannot open model " + cls_model);
      const auto model = NbModel::read(in);
      const auto cfg = cls_pre.config();
      if (cfg.fingerprint() != model.preprocess_fingerprint())
        throw DataError("preprocessing options differ from those the model was trained with");
      threshold_for(cls_lambda);
      for (const auto& m : detail::load_inputs(cls_input, cls_raw, cfg.case_fold)) {
        const auto d = classify(model, preprocess(m, cfg), cls_lambda);
        out << m.id << ' ' << spamnb::detail::general(d.posterior_spam, 12) << ' '
            << to_string(d.label) << '\n';
      }
    } else if (*crossval) {
      const auto cfg = cv.pre.config();
      const auto corpus = load_corpus(cv.corpus);
      const auto plan = make_folds(corpus, cv.k, *cv.seed, cv.stratified);
      const auto result = cross_validate(corpus, cfg, cv_n, cv_lambda, plan,
                                         detail::nb_options(cv), RunOptions{cv.jobs});
      std::vector<ReportRow> rows{report_row(result, std::to_string(cv_n), cfg)};
      for (auto& r : detail::keyword_rows(cv, corpus, plan, {cv_lambda}, err))
        rows.push_back(std::move(r));
      detail::emit(cv.output, out,
                   [&](std::ostream& o) { write_report(o, report_header(plan), rows); });
      if (!cv_folds_out.empty()) {
        std::ostringstream ss;
        write_fold_report(ss, report_header(plan), result);
        write_file(cv_folds_out, ss.str());
      }
    } else if (*sweep) {
      const auto cfg = sw.pre.config();
      const auto corpus = load_corpus(sw.corpus);
      const auto plan = make_folds(corpus, sw.k, *sw.seed, sw.stratified);
      const auto range = attribute_range(sw_from, sw_to, sw_step);
      const auto results = attribute_sweep(corpus, cfg, sw_lambdas, range, plan,
                                           detail::nb_options(sw), RunOptions{sw.jobs});
      std::vector<ReportRow> rows;
      for (const auto& r : results)
        rows.push_back(report_row(r.result, std::to_string(r.n_attrs), cfg));
      for (auto& r : detail::keyword_rows(sw, corpus, plan, sw_lambdas, err))
        rows.push_back(std::move(r));
      detail::emit(sw.output, out,
                   [&](std::ostream& o) { write_report(o, report_header(plan), rows); });
    } else if (*tsweep) {
      const auto cfg = ts.pre.config();
      const auto corpus = load_corpus(ts.corpus);
      const auto plan = make_folds(corpus, ts.k, *ts.seed, ts.stratified);
      const auto rows = training_size_sweep(corpus, cfg, ts_n, ts_lambda, plan, ts_fractions,
                                            detail::nb_options(ts), RunOptions{ts.jobs});
      if (ts.filter == "keyword")
        err << "note: keyword rows are not part of the training-size report; use crossval\n";
      detail::emit(ts.output, out, [&](std::ostream& o) {
        write_training_size_report(o, report_header(plan), ts_n, cfg, rows);
      });
    } else if (*ttest) {
      auto read = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open fold report " + path);
        return read_fold_report(in);
      };
      const auto a = read(tt_a);
      const auto b = read(tt_b);
      if (a.header.seed != b.header.seed || a.header.k != b.header.k ||
          a.header.stratified != b.header.stratified)
        throw DataError("fold reports come from different fold plans; pairing needs the same seed and fold count");
      const auto r = paired_t_test(a.w_accuracy, b.w_accuracy);
      const char* flag = r.flag == TTestFlag::none             ? "none"
                         : r.flag == TTestFlag::zero_difference ? "zero_difference"
                                                                : "zero_variance";
      out << "t,p_one_sided,df,flag\n"
          << spamnb::detail::general(r.t, 6) << ',' << spamnb::detail::general(r.p, 6) << ','
          << r.df << ',' << flag << '\n';
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace spamnb::cli
