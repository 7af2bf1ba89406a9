#pragma once

// CSV reports. Percentages carry 3 decimals and TCR 2; undefined precision
// and infinite TCR print as "inf". Every report starts with a comment line
// recording the seed and fold count.

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "spamnb/crossval.hpp"
#include "spamnb/sweep.hpp"

namespace spamnb {

inline std::string format_percent(std::optional<double> v) {
  return v ? detail::fixed(100.0 * *v, 3) : std::string("inf");
}

inline std::string format_tcr(double tcr) {
  return std::isinf(tcr) ? std::string("inf") : detail::fixed(tcr, 2);
}

inline std::string format_lambda(double lambda) { return detail::general(lambda, 12); }

struct ReportRow {
  std::string n_attrs;  // "-" for filters without attributes
  double lambda = 1.0;
  bool lemmatize = false;
  bool stoplist = false;
  double spam_recall = 0.0;
  std::optional<double> spam_precision;
  double w_accuracy = 0.0;
  double tcr = 0.0;
};

inline ReportRow report_row(const CvResult& r, std::string n_attrs, const PreprocessConfig& cfg) {
  return ReportRow{std::move(n_attrs), r.lambda,        cfg.lemmatize,     cfg.stoplist,
                   r.spam_recall,      r.spam_precision, r.mean_w_accuracy, r.tcr};
}

struct ReportHeader {
  std::uint64_t seed = 0;
  std::size_t k = 0;
  bool stratified = false;
};

inline ReportHeader report_header(const FoldPlan& plan) {
  return {plan.seed, plan.k, plan.stratified};
}

inline void write_header_comment(std::ostream& out, const ReportHeader& h) {
  out << "# seed=" << h.seed << " folds=" << h.k << " stratified=" << (h.stratified ? 1 : 0)
      << '\n';
}

inline void write_report(std::ostream& out, const ReportHeader& h,
                         std::span<const ReportRow> rows) {
  write_header_comment(out, h);
  out << "n_attrs,lambda,lemmatize,stoplist,spam_recall,spam_precision,w_accuracy,tcr\n";
  for (const auto& r : rows) {
    out << r.n_attrs << ',' << format_lambda(r.lambda) << ',' << (r.lemmatize ? 1 : 0) << ','
        << (r.stoplist ? 1 : 0) << ',' << format_percent(r.spam_recall) << ','
        << format_percent(r.spam_precision) << ',' << format_percent(r.w_accuracy) << ','
        << format_tcr(r.tcr) << '\n';
  }
}

inline void write_training_size_report(std::ostream& out, const ReportHeader& h,
                                       std::size_t n_attrs, const PreprocessConfig& cfg,
                                       std::span<const TrainingSizeRow> rows) {
  write_header_comment(out, h);
  out << "fraction,n_attrs,lambda,lemmatize,stoplist,spam_recall,spam_precision,w_accuracy,tcr\n";
  for (const auto& row : rows) {
    const auto& r = row.result;
    out << detail::fixed(row.fraction, 2) << ',' << n_attrs << ',' << format_lambda(r.lambda)
        << ',' << (cfg.lemmatize ? 1 : 0) << ',' << (cfg.stoplist ? 1 : 0) << ','
        << format_percent(r.spam_recall) << ',' << format_percent(r.spam_precision) << ','
        << format_percent(r.mean_w_accuracy) << ',' << format_tcr(r.tcr) << '\n';
  }
}

/// Per-fold details of one cross-validation run, the input of paired t-tests.
inline void write_fold_report(std::ostream& out, const ReportHeader& h, const CvResult& r) {
  write_header_comment(out, h);
  out << "fold,n_ll,n_ls,n_sl,n_ss,w_accuracy,w_error\n";
  for (std::size_t i = 0; i < r.folds.size(); ++i) {
    const auto& f = r.folds[i];
    out << i << ',' << f.counts.n_ll << ',' << f.counts.n_ls << ',' << f.counts.n_sl << ','
        << f.counts.n_ss << ',' << detail::general(f.w_accuracy, 17) << ','
        << detail::general(f.w_error, 17) << '\n';
  }
}

struct FoldReport {
  ReportHeader header;
  std::vector<ConfusionCounts> counts;
  std::vector<double> w_accuracy;
};

inline FoldReport read_fold_report(std::istream& in) {
  FoldReport rep;
  std::string line;
  bool have_header = false, have_columns = false;
  while (std::getline(in, line)) {
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      for (const auto& kv : detail::split_whitespace(t.substr(1))) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const auto key = kv.substr(0, eq);
        const auto value = kv.substr(eq + 1);
        if (key == "seed") rep.header.seed = detail::parse_u64(value, "fold report seed");
        if (key == "folds") rep.header.k = detail::parse_u64(value, "fold report folds");
        if (key == "stratified") rep.header.stratified = value == "1";
      }
      have_header = true;
      continue;
    }
    if (!have_columns) {
      if (t.substr(0, 5) != "fold,") throw DataError("fold report: missing column header");
      have_columns = true;
      continue;
    }
    std::vector<std::string> f;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= t.size(); ++i) {
      if (i == t.size() || t[i] == ',') {
        f.emplace_back(t.substr(start, i - start));
        start = i + 1;
      }
    }
    if (f.size() != 7) throw DataError("fold report: expected 7 columns in '" + line + "'");
    ConfusionCounts c{detail::parse_u64(f[1], "n_ll"), detail::parse_u64(f[2], "n_ls"),
                      detail::parse_u64(f[3], "n_sl"), detail::parse_u64(f[4], "n_ss")};
    rep.counts.push_back(c);
    rep.w_accuracy.push_back(detail::parse_double(f[5], "w_accuracy"));
  }
  if (!have_header) throw DataError("fold report: missing '# seed=...' header");
  if (rep.w_accuracy.size() != rep.header.k)
    throw DataError("fold report: header says " + std::to_string(rep.header.k) + " folds, found " +
                    std::to_string(rep.w_accuracy.size()));
  return rep;
}

}  // namespace spamnb
