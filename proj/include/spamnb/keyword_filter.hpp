#pragma once

// Keyword-pattern baseline filter. A rule is a conjunction of
// field-contains-substring clauses; a message is blocked when any rule
// matches. Rule file syntax, one rule per line:
//
//   case_sensitive: false
//   # comment
//   body contains "000" AND body contains "!!" AND body contains "$"
//   subject contains "free" AND header:From contains "@"

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "spamnb/common.hpp"
#include "spamnb/corpus.hpp"

namespace spamnb {

struct KeywordClause {
  enum class Field { subject, body, header };

  Field field = Field::body;
  std::string header_name;  // only for Field::header
  std::string substring;

  friend bool operator==(const KeywordClause&, const KeywordClause&) = default;
};

struct KeywordRule {
  std::vector<KeywordClause> clauses;

  void validate() const {
    if (clauses.empty()) throw UsageError("keyword rule needs at least one clause");
    for (const auto& c : clauses)
      if (c.substring.empty()) throw UsageError("keyword clause with an empty substring");
  }

  friend bool operator==(const KeywordRule&, const KeywordRule&) = default;
};

struct RuleSet {
  std::vector<KeywordRule> rules;
  bool case_sensitive = false;
};

namespace detail {

inline bool contains(std::string_view haystack, std::string_view needle, bool case_sensitive) {
  if (case_sensitive) return haystack.find(needle) != std::string_view::npos;
  return ascii_lower(haystack).find(ascii_lower(needle)) != std::string::npos;
}

}  // namespace detail

/// True iff every clause's substring occurs in its field. A clause naming an
/// absent header is false.
inline bool match(const KeywordRule& rule, const RawMessage& msg, bool case_sensitive) {
  rule.validate();
  for (const auto& clause : rule.clauses) {
    const std::string* field = nullptr;
    switch (clause.field) {
      case KeywordClause::Field::subject: field = &msg.subject; break;
      case KeywordClause::Field::body: field = &msg.body; break;
      case KeywordClause::Field::header: field = msg.header(clause.header_name); break;
    }
    if (!field || !detail::contains(*field, clause.substring, case_sensitive)) return false;
  }
  return true;
}

inline Label classify_keyword(const RuleSet& rules, const RawMessage& msg) {
  for (const auto& rule : rules.rules)
    if (match(rule, msg, rules.case_sensitive)) return Label::spam;
  return Label::legitimate;
}

namespace detail {

inline KeywordClause parse_clause(std::string_view text, std::size_t lineno) {
  auto fail = [&](const std::string& why) -> DataError {
    return DataError("rule line " + std::to_string(lineno) + ": " + why);
  };
  text = trim(text);
  const auto space = text.find_first_of(" \t");
  if (space == std::string_view::npos) throw fail("expected '<field> contains \"...\"'");
  const std::string_view field = text.substr(0, space);
  std::string_view rest = trim(text.substr(space));

  KeywordClause clause;
  if (iequals(field, "subject")) {
    clause.field = KeywordClause::Field::subject;
  } else if (iequals(field, "body")) {
    clause.field = KeywordClause::Field::body;
  } else if (field.size() > 7 && iequals(field.substr(0, 7), "header:")) {
    clause.field = KeywordClause::Field::header;
    clause.header_name = std::string(field.substr(7));
  } else {
    throw fail("unknown field '" + std::string(field) + "'");
  }

  constexpr std::string_view keyword = "contains";
  if (rest.size() < keyword.size() || !iequals(rest.substr(0, keyword.size()), keyword))
    throw fail("expected 'contains' after the field name");
  rest = trim(rest.substr(keyword.size()));
  if (rest.size() < 2 || rest.front() != '"' || rest.back() != '"')
    throw fail("substring must be double-quoted");
  rest = rest.substr(1, rest.size() - 2);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (rest[i] == '\\' && i + 1 < rest.size()) {
      clause.substring += rest[++i];
    } else if (rest[i] == '"') {
      throw fail("unescaped quote inside substring");
    } else {
      clause.substring += rest[i];
    }
  }
  if (clause.substring.empty()) throw fail("empty substring");
  return clause;
}

// Splits on " AND " outside quotes.
inline std::vector<std::string_view> split_and(std::string_view line) {
  std::vector<std::string_view> parts;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (!quoted && line.compare(i, 5, " AND ") == 0) {
      parts.push_back(line.substr(start, i - start));
      start = i + 5;
      i += 4;
    }
  }
  parts.push_back(line.substr(start));
  return parts;
}

}  // namespace detail

inline RuleSet parse_ruleset(std::istream& in) {
  RuleSet set;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    constexpr std::string_view cs_key = "case_sensitive:";
    if (line.size() >= cs_key.size() && detail::iequals(line.substr(0, cs_key.size()), cs_key)) {
      const auto value = detail::trim(line.substr(cs_key.size()));
      if (detail::iequals(value, "true")) {
        set.case_sensitive = true;
      } else if (detail::iequals(value, "false")) {
        set.case_sensitive = false;
      } else {
        throw DataError("rule line " + std::to_string(lineno) +
                        ": case_sensitive must be true or false");
      }
      continue;
    }
    KeywordRule rule;
    for (auto part : detail::split_and(line)) rule.clauses.push_back(detail::parse_clause(part, lineno));
    set.rules.push_back(std::move(rule));
  }
  return set;
}

/// Rebuilds raw text from a tokenized message (tokens joined by spaces) for
/// when only a tokenized corpus is at hand. Multi-character patterns that
/// span token boundaries (e.g. "!!") will not match such text.
inline RawMessage detokenize(const Message& msg) {
  auto join = [](const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
      if (!out.empty()) out += ' ';
      out += t;
    }
    return out;
  };
  RawMessage raw;
  raw.id = msg.id;
  raw.subject = join(msg.subject_tokens);
  raw.body = join(msg.body_tokens);
  raw.headers.emplace_back("Subject", raw.subject);
  raw.label = msg.label;
  return raw;
}

}  // namespace spamnb
