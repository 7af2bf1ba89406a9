#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spamnb/common.hpp"
#include "spamnb/text.hpp"

namespace spamnb {

/// An e-mail as received: headers are kept verbatim, attachments and HTML are
/// assumed to be stripped already.
struct RawMessage {
  std::string id;
  std::string sender;
  std::optional<std::chrono::sys_seconds> date;
  std::string subject;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
  std::optional<Label> label;

  /// Case-insensitive header lookup; nullptr when absent.
  const std::string* header(std::string_view name) const {
    for (const auto& [key, value] : headers)
      if (detail::iequals(key, name)) return &value;
    return nullptr;
  }
};

/// A tokenized message. Subject and body tokens share one attribute pool
/// downstream; they are kept apart only so the file format can round-trip.
struct Message {
  std::string id;
  std::vector<std::string> subject_tokens;
  std::vector<std::string> body_tokens;
  std::optional<Label> label;

  template <typename F>
  void for_each_token(F&& f) const {
    for (const auto& t : subject_tokens) f(t);
    for (const auto& t : body_tokens) f(t);
  }

  /// Distinct tokens, sorted. Presence is all the binary attribute model needs.
  std::vector<std::string_view> distinct_tokens() const {
    std::vector<std::string_view> out;
    out.reserve(subject_tokens.size() + body_tokens.size());
    for_each_token([&](const std::string& t) { out.emplace_back(t); });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  friend bool operator==(const Message&, const Message&) = default;
};

inline Message tokenize_message(const RawMessage& raw, bool case_fold = true) {
  return Message{raw.id, tokenize(raw.subject, case_fold), tokenize(raw.body, case_fold),
                 raw.label};
}

/// A labeled collection of messages. Immutable once built.
class Corpus {
 public:
  Corpus() = default;

  explicit Corpus(std::vector<Message> messages) : messages_(std::move(messages)) {
    for (const auto& m : messages_) {
      if (!m.label) continue;
      (*m.label == Label::spam ? n_spam_ : n_legit_)++;
    }
  }

  const std::vector<Message>& messages() const { return messages_; }
  const Message& operator[](std::size_t i) const { return messages_[i]; }
  std::size_t size() const { return messages_.size(); }
  bool empty() const { return messages_.empty(); }
  std::size_t n_legit() const { return n_legit_; }
  std::size_t n_spam() const { return n_spam_; }

  Corpus subset(std::span<const std::size_t> indices) const {
    std::vector<Message> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(messages_.at(i));
    return Corpus(std::move(out));
  }

  /// Equality ignores message order: two corpora are equal when they hold the
  /// same messages under the same ids.
  friend bool operator==(const Corpus& a, const Corpus& b) {
    if (a.size() != b.size()) return false;
    return a.sorted_by_id() == b.sorted_by_id();
  }

 private:
  std::vector<Message> sorted_by_id() const {
    auto out = messages_;
    std::sort(out.begin(), out.end(),
              [](const Message& x, const Message& y) { return x.id < y.id; });
    return out;
  }

  std::vector<Message> messages_;
  std::size_t n_legit_ = 0;
  std::size_t n_spam_ = 0;
};

struct PreprocessConfig {
  bool lemmatize = false;
  bool stoplist = false;
  std::set<std::string> stoplist_words = default_stoplist();
  bool case_fold = true;

  void validate() const {
    if (stoplist && stoplist_words.empty())
      throw UsageError("stop-list enabled with an empty word list");
  }

  /// Fingerprint stored in trained models so that classification can refuse
  /// messages prepared differently from the training data.
  std::uint64_t fingerprint() const {
    std::string canon = "lemmatize=" + std::to_string(lemmatize) +
                        ";case_fold=" + std::to_string(case_fold) +
                        ";stoplist=" + std::to_string(stoplist);
    if (stoplist)
      for (const auto& w : stoplist_words) canon += ";" + w;
    return detail::fnv1a(canon);
  }
};

/// Case folding, then lemmatization, then stop-word removal. Token order is
/// kept. Only alphabetic tokens are folded or lemmatized.
inline Message preprocess(const Message& msg, const PreprocessConfig& cfg,
                          const Lemmatizer& lemmatizer = SuffixLemmatizer{}) {
  cfg.validate();
  auto apply = [&](const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) {
      std::string t = tok;
      const bool alpha =
          !t.empty() && detail::classify_char(static_cast<unsigned char>(t[0])) ==
                            detail::CharClass::alpha;
      if (alpha && cfg.case_fold) t = detail::ascii_lower(t);
      if (alpha && cfg.lemmatize) t = lemmatizer(t);
      if (cfg.stoplist && cfg.stoplist_words.count(t)) continue;
      if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
  };
  return Message{msg.id, apply(msg.subject_tokens), apply(msg.body_tokens), msg.label};
}

inline Corpus preprocess(const Corpus& corpus, const PreprocessConfig& cfg,
                         const Lemmatizer& lemmatizer = SuffixLemmatizer{}) {
  std::vector<Message> out;
  out.reserve(corpus.size());
  for (const auto& m : corpus.messages()) out.push_back(preprocess(m, cfg, lemmatizer));
  return Corpus(std::move(out));
}

/// Bijection between token strings and the positive integers that replace
/// them in an anonymized corpus. Codes are dense from 1 in minting order.
class TokenMap {
 public:
  using Code = std::uint64_t;

  Code encode(std::string_view token) {
    auto it = forward_.find(std::string(token));
    if (it != forward_.end()) return it->second;
    const Code code = next_code();
    forward_.emplace(std::string(token), code);
    by_code_.emplace_back(token);
    return code;
  }

  std::optional<Code> find(std::string_view token) const {
    auto it = forward_.find(std::string(token));
    if (it == forward_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& token(Code code) const { return by_code_.at(code - 1); }
  Code next_code() const { return by_code_.size() + 1; }
  std::size_t size() const { return by_code_.size(); }
  bool empty() const { return by_code_.empty(); }

  /// `<code> <token>` per line, ascending code.
  void write(std::ostream& out) const {
    for (std::size_t i = 0; i < by_code_.size(); ++i)
      out << (i + 1) << ' ' << by_code_[i] << '\n';
  }

  static TokenMap read(std::istream& in) {
    TokenMap map;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (detail::trim(line).empty()) continue;
      const auto fields = detail::split_whitespace(line);
      if (fields.size() != 2)
        throw DataError("token map line " + std::to_string(lineno) + ": expected '<code> <token>'");
      const Code code = detail::parse_u64(fields[0], "token map code");
      if (code != map.next_code())
        throw DataError("token map line " + std::to_string(lineno) + ": codes must be dense from 1");
      if (map.find(fields[1]))
        throw DataError("token map line " + std::to_string(lineno) + ": duplicate token '" +
                        fields[1] + "'");
      map.encode(fields[1]);
    }
    return map;
  }

  friend bool operator==(const TokenMap& a, const TokenMap& b) {
    return a.by_code_ == b.by_code_;
  }

 private:
  std::unordered_map<std::string, Code> forward_;
  std::vector<std::string> by_code_;
};

/// Replaces every token by its numeric code, minting new codes in order of
/// first occurrence (messages in corpus order, subject before body).
inline std::pair<Corpus, TokenMap> encrypt_corpus(const Corpus& corpus, TokenMap map) {
  std::vector<Message> out;
  out.reserve(corpus.size());
  auto encode_all = [&](const std::vector<std::string>& tokens) {
    std::vector<std::string> coded;
    coded.reserve(tokens.size());
    for (const auto& t : tokens) coded.push_back(std::to_string(map.encode(t)));
    return coded;
  };
  for (const auto& m : corpus.messages()) {
    Message enc;
    enc.id = m.id;
    enc.label = m.label;
    enc.subject_tokens = encode_all(m.subject_tokens);
    enc.body_tokens = encode_all(m.body_tokens);
    out.push_back(std::move(enc));
  }
  return {Corpus(std::move(out)), std::move(map)};
}

/// Keeps only the `keep` earliest legitimate messages of every sender, as if
/// later mail from known correspondents bypassed the filter through the
/// address book. Spam and unlabeled messages pass through; input order is
/// preserved. Ties on date keep input order.
inline std::vector<RawMessage> emulate_address_book(std::vector<RawMessage> raw,
                                                    std::size_t keep) {
  if (keep < 1) throw UsageError("address-book keep count must be at least 1");
  std::map<std::string, std::vector<std::size_t>> by_sender;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].label != Label::legitimate) continue;
    if (!raw[i].date)
      throw DataError("legitimate message '" + raw[i].id + "' has no date");
    by_sender[detail::ascii_lower(raw[i].sender)].push_back(i);
  }
  std::vector<bool> drop(raw.size(), false);
  for (auto& [sender, idx] : by_sender) {
    if (idx.size() <= keep) continue;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return *raw[a].date < *raw[b].date; });
    for (std::size_t j = keep; j < idx.size(); ++j) drop[idx[j]] = true;
  }
  std::vector<RawMessage> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (!drop[i]) out.push_back(std::move(raw[i]));
  return out;
}

/// Drops spam messages whose body duplicates an earlier spam message received
/// on the same (UTC) day. Undated messages form their own day.
inline std::vector<RawMessage> remove_duplicate_spam(std::vector<RawMessage> raw) {
  using namespace std::chrono;
  std::set<std::pair<std::int64_t, std::uint64_t>> seen;
  std::vector<RawMessage> out;
  out.reserve(raw.size());
  for (auto& m : raw) {
    if (m.label == Label::spam) {
      const std::int64_t day =
          m.date ? floor<days>(*m.date).time_since_epoch().count()
                 : std::numeric_limits<std::int64_t>::min();
      if (!seen.emplace(day, detail::fnv1a(m.body)).second) continue;
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace spamnb
