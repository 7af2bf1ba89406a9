#pragma once

#include <functional>
#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "spamnb/common.hpp"

namespace spamnb {

namespace detail {

enum class CharClass { space, alpha, digit, punct };

// Bytes >= 0x80 belong to UTF-8 sequences and are treated as letters, so
// accented words stay in one token.
inline CharClass classify_char(unsigned char c) {
  if (is_ascii_space(c)) return CharClass::space;
  if (is_ascii_digit(c)) return CharClass::digit;
  if (is_ascii_alpha(c) || c >= 0x80) return CharClass::alpha;
  return CharClass::punct;
}

}  // namespace detail

/// Splits text into maximal letter runs, maximal digit runs and single
/// punctuation characters. Whitespace only separates.
inline std::vector<std::string> tokenize(std::string_view text, bool case_fold = true) {
  using detail::CharClass;
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const CharClass cls = detail::classify_char(static_cast<unsigned char>(text[i]));
    if (cls == CharClass::space) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (cls != CharClass::punct) {
      while (j < text.size() &&
             detail::classify_char(static_cast<unsigned char>(text[j])) == cls)
        ++j;
    }
    std::string token(text.substr(i, j - i));
    if (case_fold && cls == CharClass::alpha) token = detail::ascii_lower(token);
    tokens.push_back(std::move(token));
    i = j;
  }
  return tokens;
}

/// Maps a lower-case word to its base form.
using Lemmatizer = std::function<std::string(std::string_view)>;

/// Rule-based English suffix stripper covering plural -s/-es and the -ed/-ing
/// verb forms, with the usual e-restoration and consonant-undoubling repairs.
/// Words that are not entirely lower-case ASCII letters pass through.
class SuffixLemmatizer {
 public:
  std::string operator()(std::string_view word) const {
    std::string w(word);
    if (w.size() <= 3 || !std::all_of(w.begin(), w.end(),
                                      [](char c) { return c >= 'a' && c <= 'z'; }))
      return w;
    if (strip_plural(w)) return w;
    strip_verbal(w);
    return w;
  }

 private:
  static bool ends_with(const std::string& w, std::string_view suffix) {
    return w.size() >= suffix.size() &&
           std::string_view(w).substr(w.size() - suffix.size()) == suffix;
  }

  static bool is_consonant(const std::string& w, std::size_t i) {
    switch (w[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 || !is_consonant(w, i - 1);
      default:
        return true;
    }
  }

  // Number of vowel-consonant sequences, [C](VC)^m[V].
  static int measure(const std::string& w) {
    int m = 0;
    std::size_t i = 0;
    const std::size_t n = w.size();
    while (i < n && is_consonant(w, i)) ++i;
    while (i < n) {
      while (i < n && !is_consonant(w, i)) ++i;
      if (i >= n) break;
      while (i < n && is_consonant(w, i)) ++i;
      ++m;
    }
    return m;
  }

  static bool has_vowel(const std::string& w) {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (!is_consonant(w, i)) return true;
    return false;
  }

  static bool ends_cvc(const std::string& w) {
    const std::size_t n = w.size();
    if (n < 3) return false;
    if (!is_consonant(w, n - 3) || is_consonant(w, n - 2) || !is_consonant(w, n - 1))
      return false;
    const char last = w[n - 1];
    return last != 'w' && last != 'x' && last != 'y';
  }

  static bool strip_plural(std::string& w) {
    if (ends_with(w, "sses")) {
      w.resize(w.size() - 2);
      return true;
    }
    if (ends_with(w, "ies")) {
      w.resize(w.size() - 3);
      w += w.size() > 1 ? "y" : "ie";
      return true;
    }
    if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return false;
    if (ends_with(w, "es")) {
      const std::string stem = w.substr(0, w.size() - 2);
      if (ends_with(stem, "s") || ends_with(stem, "x") || ends_with(stem, "z") ||
          ends_with(stem, "ch") || ends_with(stem, "sh")) {
        w = stem;
        return true;
      }
    }
    if (ends_with(w, "s")) {
      w.pop_back();
      return true;
    }
    return false;
  }

  static void strip_verbal(std::string& w) {
    if (ends_with(w, "eed")) {
      if (measure(w.substr(0, w.size() - 3)) > 0) w.pop_back();
      return;
    }
    if (ends_with(w, "ied") && w.size() > 4) {
      w.resize(w.size() - 3);
      w += 'y';
      return;
    }
    std::string stem;
    if (ends_with(w, "ed")) {
      stem = w.substr(0, w.size() - 2);
    } else if (ends_with(w, "ing")) {
      stem = w.substr(0, w.size() - 3);
    } else {
      return;
    }
    if (!has_vowel(stem)) return;
    if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz")) {
      stem += 'e';
    } else if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
               is_consonant(stem, stem.size() - 1) && stem.back() != 'l' &&
               stem.back() != 's' && stem.back() != 'z') {
      stem.pop_back();
    } else if (measure(stem) == 1 && ends_cvc(stem)) {
      stem += 'e';
    }
    w = std::move(stem);
  }
};

/// One hundred frequent English function words; the stop-list used when no
/// file is supplied. Mirrors data/stoplist_en.txt.
inline const std::set<std::string>& default_stoplist() {
  static const std::set<std::string> words = {
      "the",   "of",    "and",   "to",    "a",     "in",    "that",  "it",
      "is",    "was",   "i",     "for",   "on",    "you",   "he",    "be",
      "with",  "as",    "by",    "at",    "have",  "are",   "this",  "not",
      "but",   "had",   "his",   "they",  "from",  "she",   "which", "or",
      "we",    "an",    "there", "her",   "were",  "one",   "do",    "been",
      "all",   "their", "has",   "would", "will",  "what",  "if",    "can",
      "when",  "so",    "no",    "said",  "who",   "more",  "about", "up",
      "them",  "some",  "could", "him",   "into",  "its",   "then",  "two",
      "out",   "time",  "like",  "only",  "my",    "did",   "other", "me",
      "your",  "now",   "over",  "just",  "may",   "these", "new",   "also",
      "people", "any",  "know",  "very",  "see",   "first", "well",  "after",
      "should", "than", "how",   "get",   "most",  "our",   "way",   "where",
      "made",  "us",    "many",  "those"};
  return words;
}

/// Reads a stop-list: one word per line, blank lines and `#` comments skipped.
inline std::set<std::string> read_stoplist(std::istream& in) {
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto word = detail::trim(line);
    if (word.empty() || word.front() == '#') continue;
    words.insert(detail::ascii_lower(word));
  }
  return words;
}

}  // namespace spamnb
