#pragma once

// On-disk formats for corpora, token maps and raw e-mail.
//
// Corpus directory: <root>/spam/*.txt and <root>/legit/*.txt. Each file holds
//   Subject: <tokens>
//   <blank line>
//   <body tokens separated by single spaces, wrapped at will>
//
// Raw messages use a minimal RFC-822 layout (headers, blank line, body).

#include <array>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spamnb/common.hpp"
#include "spamnb/corpus.hpp"

namespace spamnb {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << contents;
}

namespace detail {

inline std::optional<int> month_index(std::string_view name) {
  static constexpr std::array<std::string_view, 12> months = {
      "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};
  if (name.size() < 3) return std::nullopt;
  for (std::size_t i = 0; i < months.size(); ++i)
    if (iequals(name.substr(0, 3), months[i])) return static_cast<int>(i + 1);
  return std::nullopt;
}

inline std::optional<int> parse_int(std::string_view s) {
  if (!is_all_digits(s) || s.size() > 9) return std::nullopt;
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

// "+hhmm", "-hh:mm", "Z", "GMT", "UT", "UTC"; other names count as UTC.
inline std::optional<int> zone_offset_minutes(std::string_view z) {
  if (z.empty()) return 0;
  if (z[0] == '+' || z[0] == '-') {
    std::string digits;
    for (char c : z.substr(1))
      if (c != ':') digits += c;
    if (digits.size() != 4) return std::nullopt;
    auto hh = parse_int(digits.substr(0, 2));
    auto mm = parse_int(digits.substr(2, 2));
    if (!hh || !mm) return std::nullopt;
    const int off = *hh * 60 + *mm;
    return z[0] == '-' ? -off : off;
  }
  return 0;
}

inline std::optional<std::chrono::sys_seconds> make_time(int y, int mo, int d, int hh, int mi,
                                                         int ss, int offset_minutes) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mi > 59 || ss > 60) return std::nullopt;
  return sys_seconds{sys_days{ymd}} + hours{hh} + minutes{mi} + seconds{ss} -
         minutes{offset_minutes};
}

inline std::optional<std::array<int, 3>> parse_clock(std::string_view s) {
  std::array<int, 3> hms{0, 0, 0};
  std::size_t part = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ':') {
      if (part > 2) return std::nullopt;
      auto v = parse_int(s.substr(start, i - start));
      if (!v) return std::nullopt;
      hms[part++] = *v;
      start = i + 1;
    }
  }
  if (part < 2) return std::nullopt;
  return hms;
}

}  // namespace detail

/// Parses RFC-822 dates ("Mon, 3 Jan 2000 10:15:00 +0200") and ISO-8601 dates
/// ("2000-01-03", "2000-01-03T10:15:00Z"). Result is UTC.
inline std::optional<std::chrono::sys_seconds> parse_date(std::string_view text) {
  using detail::parse_int;
  text = detail::trim(text);
  if (text.size() >= 10 && text[4] == '-' && text[7] == '-') {
    auto y = parse_int(text.substr(0, 4));
    auto mo = parse_int(text.substr(5, 2));
    auto d = parse_int(text.substr(8, 2));
    if (!y || !mo || !d) return std::nullopt;
    std::string_view rest = text.substr(10);
    std::array<int, 3> hms{0, 0, 0};
    int offset = 0;
    if (!rest.empty()) {
      if (rest[0] != 'T' && rest[0] != ' ') return std::nullopt;
      rest.remove_prefix(1);
      std::size_t zpos = rest.find_first_of("Z+-");
      auto clock = detail::parse_clock(detail::trim(rest.substr(0, zpos)));
      if (!clock) return std::nullopt;
      hms = *clock;
      if (zpos != std::string_view::npos) {
        auto z = detail::zone_offset_minutes(rest.substr(zpos));
        if (!z) return std::nullopt;
        offset = *z;
      }
    }
    return detail::make_time(*y, *mo, *d, hms[0], hms[1], hms[2], offset);
  }

  auto fields = detail::split_whitespace(text);
  std::size_t i = 0;
  if (!fields.empty() && !fields[0].empty() && !detail::is_ascii_digit(fields[0][0])) ++i;
  if (fields.size() < i + 4) return std::nullopt;
  auto d = parse_int(fields[i]);
  auto mo = detail::month_index(fields[i + 1]);
  auto y = parse_int(fields[i + 2]);
  auto clock = detail::parse_clock(fields[i + 3]);
  if (!d || !mo || !y || !clock) return std::nullopt;
  int year = *y;
  if (fields[i + 2].size() == 2) year += year < 50 ? 2000 : 1900;
  int offset = 0;
  if (fields.size() > i + 4) {
    auto z = detail::zone_offset_minutes(fields[i + 4]);
    if (!z) return std::nullopt;
    offset = *z;
  }
  return detail::make_time(year, *mo, *d, (*clock)[0], (*clock)[1], (*clock)[2], offset);
}

/// Parses a raw message. `name` is used in error messages.
inline RawMessage parse_raw_message(std::string_view text, std::string id,
                                    std::optional<Label> label, std::string_view name) {
  RawMessage msg;
  msg.id = std::move(id);
  msg.label = label;
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    ++lineno;
    if (line.empty()) break;
    if ((line[0] == ' ' || line[0] == '\t') && !msg.headers.empty()) {
      msg.headers.back().second += " ";
      msg.headers.back().second += detail::trim(line);
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos || colon == 0)
      throw DataError(std::string(name) + ": malformed header at line " +
                      std::to_string(lineno));
    msg.headers.emplace_back(std::string(detail::trim(line.substr(0, colon))),
                             std::string(detail::trim(line.substr(colon + 1))));
  }
  if (pos < text.size()) msg.body = std::string(text.substr(pos));

  if (const auto* subject = msg.header("Subject")) msg.subject = *subject;
  if (const auto* from = msg.header("From")) {
    std::string_view addr = *from;
    const auto lt = addr.find('<');
    const auto gt = addr.rfind('>');
    if (lt != std::string_view::npos && gt != std::string_view::npos && gt > lt)
      addr = addr.substr(lt + 1, gt - lt - 1);
    msg.sender = detail::ascii_lower(detail::trim(addr));
  }
  if (const auto* date = msg.header("Date")) {
    msg.date = parse_date(*date);
    if (!msg.date)
      throw DataError(std::string(name) + ": unparseable Date header '" + *date + "'");
  }
  return msg;
}

namespace detail {

inline std::optional<Label> label_for_dir(const std::string& name) {
  if (name == "spam") return Label::spam;
  if (name == "legit") return Label::legitimate;
  return std::nullopt;
}

inline const char* dir_for_label(Label label) {
  return label == Label::spam ? "spam" : "legit";
}

// Regular files of a directory, sorted by name.
inline std::vector<fs::path> sorted_files(const fs::path& dir,
                                          std::string_view extension = {}) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (!extension.empty() && entry.path().extension() != extension) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Label subdirectories of a corpus-style root; rejects unknown directories.
inline std::vector<std::pair<Label, fs::path>> label_dirs(const fs::path& root) {
  if (!fs::is_directory(root)) throw DataError(root.string() + " is not a directory");
  std::vector<std::pair<Label, fs::path>> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    const auto name = entry.path().filename().string();
    const auto label = label_for_dir(name);
    if (!label)
      throw DataError("unknown label directory '" + name + "' in " + root.string() +
                      " (expected 'spam' or 'legit')");
    dirs.emplace_back(*label, entry.path());
  }
  if (dirs.empty())
    throw DataError("no messages: " + root.string() +
                    " has neither a 'spam' nor a 'legit' directory");
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

}  // namespace detail

/// Reads <root>/spam/* and <root>/legit/* as raw messages; ids are file stems.
inline std::vector<RawMessage> load_raw_messages(const fs::path& root) {
  std::vector<RawMessage> out;
  for (const auto& [label, dir] : detail::label_dirs(root)) {
    for (const auto& file : detail::sorted_files(dir)) {
      out.push_back(parse_raw_message(read_file(file), file.stem().string(), label,
                                      file.string()));
    }
  }
  return out;
}

/// Parses one corpus-format message file.
inline Message parse_message_file(std::string_view text, std::string id,
                                  std::optional<Label> label, std::string_view name) {
  constexpr std::string_view prefix = "Subject:";
  std::size_t eol = text.find('\n');
  std::string_view first = text.substr(0, eol);
  if (!first.empty() && first.back() == '\r') first.remove_suffix(1);
  if (first.substr(0, prefix.size()) != prefix)
    throw DataError(std::string(name) + ": first line must start with 'Subject:'");
  Message msg;
  msg.id = std::move(id);
  msg.label = label;
  msg.subject_tokens = detail::split_whitespace(first.substr(prefix.size()));
  if (eol == std::string_view::npos) return msg;
  std::string_view rest = text.substr(eol + 1);
  std::size_t eol2 = rest.find('\n');
  std::string_view second = rest.substr(0, eol2);
  if (!detail::trim(second).empty())
    throw DataError(std::string(name) + ": expected a blank line after the Subject line");
  if (eol2 != std::string_view::npos)
    msg.body_tokens = detail::split_whitespace(rest.substr(eol2 + 1));
  return msg;
}

inline std::string format_message_file(const Message& msg, std::size_t wrap = 76) {
  std::string out = "Subject:";
  for (const auto& t : msg.subject_tokens) out += " " + t;
  out += "\n\n";
  std::size_t column = 0;
  for (const auto& t : msg.body_tokens) {
    if (column > 0 && column + 1 + t.size() > wrap) {
      out += '\n';
      column = 0;
    } else if (column > 0) {
      out += ' ';
      ++column;
    }
    out += t;
    column += t.size();
  }
  out += '\n';
  return out;
}

inline Corpus load_corpus(const fs::path& root) {
  std::vector<Message> messages;
  std::set<std::string> ids;
  for (const auto& [label, dir] : detail::label_dirs(root)) {
    for (const auto& file : detail::sorted_files(dir, ".txt")) {
      auto msg = parse_message_file(read_file(file), file.stem().string(), label,
                                    file.string());
      if (!ids.insert(msg.id).second)
        throw DataError("duplicate message id '" + msg.id + "' in " + root.string());
      messages.push_back(std::move(msg));
    }
  }
  return Corpus(std::move(messages));
}

/// Writes every message to <root>/<spam|legit>/<id>.txt. Existing files with
/// the same names are overwritten; other files are left alone.
inline void save_corpus(const Corpus& corpus, const fs::path& root) {
  for (const char* sub : {"spam", "legit"}) fs::create_directories(root / sub);
  for (const auto& m : corpus.messages()) {
    if (!m.label) throw UsageError("cannot save unlabeled message '" + m.id + "'");
    if (m.id.empty() || m.id.find('/') != std::string::npos)
      throw UsageError("message id '" + m.id + "' is not a valid file name");
    write_file(root / detail::dir_for_label(*m.label) / (m.id + ".txt"),
               format_message_file(m));
  }
}

inline TokenMap load_token_map(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return TokenMap::read(in);
}

inline void save_token_map(const TokenMap& map, const fs::path& path) {
  std::ostringstream ss;
  map.write(ss);
  write_file(path, ss.str());
}

}  // namespace spamnb
