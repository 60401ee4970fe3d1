#pragma once

// Line-oriented record grammar shared by the type-definition, anchor-table and scenario files.
// A '#' starts a comment that runs to end of line; blank lines are ignored.

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "exai/errors.hpp"

namespace exai::text {

struct Line {
  int number = 0;
  int column = 1;  // 1-based column of the first non-blank character
  std::string text;
};

struct Token {
  std::string_view text;
  int column = 1;
};

inline std::vector<Line> read_lines(std::string_view doc) {
  std::vector<Line> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= doc.size()) {
    std::size_t end = doc.find('\n', pos);
    if (end == std::string_view::npos) end = doc.size();
    std::string_view raw = doc.substr(pos, end - pos);
    ++number;
    pos = end + 1;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    std::size_t first = raw.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
      if (end == doc.size()) break;
      continue;
    }
    std::size_t last = raw.find_last_not_of(" \t");
    out.push_back({number, static_cast<int>(first) + 1, std::string(raw.substr(first, last - first + 1))});
    if (end == doc.size()) break;
  }
  return out;
}

inline std::vector<Token> tokens(const Line& line) {
  std::vector<Token> out;
  std::string_view s = line.text;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i >= s.size()) break;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    out.push_back({s.substr(start, i - start), line.column + static_cast<int>(start)});
  }
  return out;
}

[[noreturn]] inline void fail(const std::string& what, int line, int column) { throw ParseError(what, line, column); }

inline double parse_number(const Token& tok, int line) {
  std::string_view s = tok.text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail("expected a number, got '" + std::string(tok.text) + "'", line, tok.column);
  }
  return value;
}

// Joins tokens [first, last) back into a single space-separated name.
inline std::string join(const std::vector<Token>& toks, std::size_t first, std::size_t last) {
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    if (!out.empty()) out += ' ';
    out += toks[i].text;
  }
  return out;
}

// Fixed-point rendering with an explicit sign, e.g. "+1.0" or "-0.5".
inline std::string signed_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.*f", decimals, v);
  return buf;
}

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string out = buf;
  // Never emit a negative zero.
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

}  // namespace exai::text
