#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spamnb/common.hpp"
#include "spamnb/corpus.hpp"

namespace spamnb {

/// Document-presence counts of one candidate attribute per class.
struct AttributeStats {
  std::string token;
  std::size_t n_x1_spam = 0;
  std::size_t n_x1_legit = 0;
  std::size_t n_x0_spam = 0;
  std::size_t n_x0_legit = 0;

  std::size_t document_frequency() const { return n_x1_spam + n_x1_legit; }

  friend bool operator==(const AttributeStats&, const AttributeStats&) = default;
};

struct StatsTable {
  std::unordered_map<std::string, AttributeStats> by_token;
  std::size_t n_legit = 0;
  std::size_t n_spam = 0;
};

/// Counts, for every token in the corpus, how many spam and legitimate
/// messages contain it at least once.
inline StatsTable collect_stats(const Corpus& corpus) {
  if (corpus.n_spam() == 0 || corpus.n_legit() == 0)
    throw DataError("attribute statistics need at least one spam and one legitimate message");
  StatsTable table;
  table.n_legit = corpus.n_legit();
  table.n_spam = corpus.n_spam();
  for (const auto& msg : corpus.messages()) {
    if (!msg.label) continue;
    const bool spam = *msg.label == Label::spam;
    for (auto tok : msg.distinct_tokens()) {
      auto [it, inserted] = table.by_token.try_emplace(std::string(tok));
      if (inserted) it->second.token = std::string(tok);
      (spam ? it->second.n_x1_spam : it->second.n_x1_legit)++;
    }
  }
  for (auto& [tok, s] : table.by_token) {
    s.n_x0_spam = table.n_spam - s.n_x1_spam;
    s.n_x0_legit = table.n_legit - s.n_x1_legit;
  }
  return table;
}

/// Mutual information in bits between a binary attribute and the class,
/// from raw frequency ratios. Empty cells contribute 0.
inline double mutual_information(const AttributeStats& s, std::size_t n_legit,
                                 std::size_t n_spam) {
  const double n = static_cast<double>(n_legit + n_spam);
  if (n == 0) return 0.0;
  const double x1 = static_cast<double>(s.n_x1_spam + s.n_x1_legit);
  const double x0 = static_cast<double>(s.n_x0_spam + s.n_x0_legit);
  const double cs = static_cast<double>(n_spam);
  const double cl = static_cast<double>(n_legit);
  auto term = [n](std::size_t joint_count, double x_count, double c_count) {
    if (joint_count == 0) return 0.0;
    const double j = static_cast<double>(joint_count);
    return (j / n) * std::log2(j * n / (x_count * c_count));
  };
  const double mi = term(s.n_x1_spam, x1, cs) + term(s.n_x1_legit, x1, cl) +
                    term(s.n_x0_spam, x0, cs) + term(s.n_x0_legit, x0, cl);
  // Rounding can leave -1e-17 on independent attributes.
  return mi < 0.0 ? 0.0 : mi;
}

/// Total order on tokens used for tie-breaking: numeric codes first in
/// numeric order, then everything else lexicographically.
inline bool token_less(std::string_view a, std::string_view b) {
  const bool na = detail::is_all_digits(a);
  const bool nb = detail::is_all_digits(b);
  if (na != nb) return na;
  if (na) {
    auto strip = [](std::string_view s) {
      while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
      return s;
    };
    const auto sa = strip(a);
    const auto sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

struct Attribute {
  std::string token;
  double mi = 0.0;
  std::size_t index = 0;
};

/// Selected word attributes, ranked by MI. `truncated` is set when fewer
/// attributes than requested were available.
class AttributeSet {
 public:
  AttributeSet() = default;

  explicit AttributeSet(std::vector<Attribute> attrs, bool truncated = false)
      : attrs_(std::move(attrs)), truncated_(truncated) {
    index_.reserve(attrs_.size());
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
      attrs_[i].index = i;
      if (!index_.emplace(attrs_[i].token, i).second)
        throw DataError("duplicate attribute token '" + attrs_[i].token + "'");
    }
  }

  std::size_t size() const { return attrs_.size(); }
  bool empty() const { return attrs_.empty(); }
  bool truncated() const { return truncated_; }
  const Attribute& operator[](std::size_t i) const { return attrs_[i]; }
  auto begin() const { return attrs_.begin(); }
  auto end() const { return attrs_.end(); }

  std::optional<std::size_t> index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// First `n` attributes (all of them when n >= size()).
  AttributeSet prefix(std::size_t n) const {
    const bool short_of = n > attrs_.size();
    std::vector<Attribute> head(attrs_.begin(),
                                attrs_.begin() + static_cast<std::ptrdiff_t>(
                                                     std::min(n, attrs_.size())));
    return AttributeSet(std::move(head), truncated_ || short_of);
  }

  /// `<rank> <token> <mi>`, rank from 1, MI to 6 decimals.
  void write(std::ostream& out) const {
    for (const auto& a : attrs_)
      out << (a.index + 1) << ' ' << a.token << ' ' << detail::fixed(a.mi, 6) << '\n';
  }

  static AttributeSet read(std::istream& in) {
    std::vector<Attribute> attrs;
    std::string line;
    while (std::getline(in, line)) {
      if (detail::trim(line).empty()) continue;
      const auto f = detail::split_whitespace(line);
      if (f.size() != 3 || detail::parse_u64(f[0], "attribute rank") != attrs.size() + 1)
        throw DataError("malformed attribute line '" + line + "'");
      attrs.push_back({f[1], detail::parse_double(f[2], "attribute MI"), attrs.size()});
    }
    return AttributeSet(std::move(attrs));
  }

 private:
  std::vector<Attribute> attrs_;
  std::unordered_map<std::string, std::size_t> index_;
  bool truncated_ = false;
};

struct SelectionOptions {
  /// Candidates must occur in at least this many training messages.
  std::size_t min_document_frequency = 1;
};

/// Every candidate ranked by (MI desc, token asc).
inline std::vector<Attribute> rank_attributes(const StatsTable& stats,
                                              const SelectionOptions& opts = {}) {
  std::vector<Attribute> ranked;
  ranked.reserve(stats.by_token.size());
  for (const auto& [tok, s] : stats.by_token) {
    if (s.document_frequency() < opts.min_document_frequency) continue;
    ranked.push_back({tok, mutual_information(s, stats.n_legit, stats.n_spam), 0});
  }
  // Scores are compared at 1e-12 bit resolution so that mathematically equal
  // MI values (e.g. class-mirrored count tables) tie regardless of rounding
  // and fall through to the token order.
  auto key = [](double mi) { return std::llround(mi * 1e12); };
  std::sort(ranked.begin(), ranked.end(), [&](const Attribute& a, const Attribute& b) {
    const auto ka = key(a.mi), kb = key(b.mi);
    if (ka != kb) return ka > kb;
    return token_less(a.token, b.token);
  });
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].index = i;
  return ranked;
}

inline AttributeSet select_attributes(const StatsTable& stats, std::size_t n,
                                      const SelectionOptions& opts = {}) {
  if (n < 1) throw UsageError("number of attributes must be at least 1");
  auto ranked = rank_attributes(stats, opts);
  if (ranked.empty()) throw DataError("no candidate attributes: vocabulary is empty");
  const bool truncated = ranked.size() < n;
  if (!truncated) ranked.resize(n);
  return AttributeSet(std::move(ranked), truncated);
}

inline AttributeSet select_attributes(const Corpus& corpus, std::size_t n,
                                      const SelectionOptions& opts = {}) {
  return select_attributes(collect_stats(corpus), n, opts);
}

/// Binary presence vector over an attribute set.
struct FeatureVector {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  bool operator[](std::size_t i) const { return bits[i] != 0; }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline FeatureVector vectorize(const Message& msg, const AttributeSet& attrs) {
  FeatureVector v{std::vector<std::uint8_t>(attrs.size(), 0)};
  msg.for_each_token([&](const std::string& t) {
    if (auto i = attrs.index_of(t)) v.bits[*i] = 1;
  });
  return v;
}

}  // namespace spamnb
