// Copyright 2026 The echotrace Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "echotrace/textprep.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <regex>

#include "echotrace/porter.h"

namespace echotrace {
namespace {

constexpr std::string_view kUrlToken = "@url@";

// Multi-byte punctuation recognized by the tokenizer (UTF-8).
constexpr std::array<std::string_view, 8> kUnicodePunct = {
    "“", "”", "‘", "’", "…", "—", "–", "«",
};

bool is_ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      return lines;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out += lines[i];
  }
  return out;
}

void remove_footers(std::string& text) {
  static constexpr std::array<std::string_view, 2> kMarkers = {
      "Hello, users of CMV", "This is a footnote"};
  std::vector<std::string> lines = split_lines(text);
  for (std::string& line : lines) {
    std::size_t cut = std::string::npos;
    for (std::string_view marker : kMarkers) {
      cut = std::min(cut, line.find(marker));
    }
    if (cut != std::string::npos) line.erase(cut);
  }
  text = join_lines(lines);
}

void replace_urls(std::string& text) {
  static const std::regex kUrl(R"((https?://[^\s)]*))");
  text = std::regex_replace(text, kUrl, std::string(kUrlToken));
}

void replace_delta_variants(std::string& text) {
  replace_all(text, "\xCE\x94", "delta");  // capital delta
  replace_all(text, "\xCE\xB4", "delta");  // small delta
  replace_all(text, "&;#8710;", "delta");
  replace_all(text, "&#8710;", "delta");
  std::string lower = to_lower_ascii(text);
  std::size_t pos = 0;
  std::string out;
  std::size_t copied = 0;
  while ((pos = lower.find("!delta", pos)) != std::string::npos) {
    out.append(text, copied, pos - copied);
    out += "delta";
    pos += 6;
    copied = pos;
  }
  out.append(text, copied, std::string::npos);
  text = std::move(out);
}

// Drops every leading "delta" word (case-insensitive) from an explanation.
void strip_leading_delta(std::string& text) {
  while (true) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (text.size() - i < 5) return;
    if (to_lower_ascii(std::string_view(text).substr(i, 5)) != "delta") return;
    const std::size_t after = i + 5;
    if (after < text.size() && is_word_char(text[after])) return;
    text.erase(0, after);
  }
}

void strip_reddit_prefixes(std::string& text) {
  static const std::regex kPrefix(R"((^|[^A-Za-z0-9_/])/?[ur]/(?=[A-Za-z0-9_]))");
  text = std::regex_replace(text, kPrefix, "$1");
}

void remove_edits(std::string& text) {
  static const std::regex kUpper(R"(EDIT(.*?):.*)");
  static const std::regex kTitle(R"(Edit(.*?):.*)");
  text = std::regex_replace(text, kUpper, "");
  text = std::regex_replace(text, kTitle, "");
}

// Returns the quoted content of a blockquote line, or nullopt when the line is
// not a blockquote. Nested markers (">>") are all removed.
std::optional<std::string> blockquote_content(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  bool quoted = false;
  while (true) {
    if (i < line.size() && line[i] == '>') {
      ++i;
    } else if (line.substr(i, 4) == "&gt;") {
      i += 4;
    } else {
      break;
    }
    quoted = true;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  }
  if (!quoted) return std::nullopt;
  return std::string(line.substr(i));
}

void convert_blockquotes(std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  std::vector<std::string> out;
  std::vector<std::string> block;
  auto flush = [&] {
    if (block.empty()) return;
    std::string joined;
    for (const std::string& part : block) {
      if (part.empty()) continue;
      if (!joined.empty()) joined.push_back(' ');
      joined += part;
    }
    if (!joined.empty()) out.push_back("\"" + joined + "\"");
    block.clear();
  };
  for (const std::string& line : lines) {
    if (auto content = blockquote_content(line)) {
      block.push_back(std::move(*content));
    } else {
      flush();
      out.push_back(line);
    }
  }
  flush();
  text = join_lines(out);
}

// Length of a Unicode whitespace sequence starting at i (0 if none).
std::size_t whitespace_len(std::string_view s, std::size_t i) {
  const char c = s[i];
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
    return 1;
  }
  if (s.substr(i, 2) == "\xC2\xA0") return 2;  // no-break space
  return 0;
}

void collapse_runs(std::string& text) {
  std::string spaced;
  spaced.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (std::size_t n = whitespace_len(text, i); n > 0) {
      if (spaced.empty() || spaced.back() != ' ') spaced.push_back(' ');
      i += n;
      continue;
    }
    spaced.push_back(text[i]);
    ++i;
  }
  std::string out;
  out.reserve(spaced.size());
  for (char c : spaced) {
    if ((c == '-' || c == '*' || c == '_') && !out.empty() && out.back() == c) continue;
    out.push_back(c);
  }
  const std::size_t first = out.find_first_not_of(' ');
  if (first == std::string::npos) {
    text.clear();
    return;
  }
  const std::size_t last = out.find_last_not_of(' ');
  text = out.substr(first, last - first + 1);
}

// Byte length of the punctuation code point at i, or 0.
std::size_t punct_len(std::string_view s, std::size_t i) {
  const unsigned char c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) return std::ispunct(c) ? 1 : 0;
  for (std::string_view p : kUnicodePunct) {
    if (s.substr(i, p.size()) == p) return p.size();
  }
  return 0;
}

// Byte length of the punctuation code point ending at `end`, or 0.
std::size_t punct_len_before(std::string_view s, std::size_t end) {
  if (end == 0) return 0;
  const unsigned char c = static_cast<unsigned char>(s[end - 1]);
  if (c < 0x80) return std::ispunct(c) ? 1 : 0;
  for (std::string_view p : kUnicodePunct) {
    if (end >= p.size() && s.substr(end - p.size(), p.size()) == p) return p.size();
  }
  return 0;
}

bool groups_with_itself(std::string_view p) {
  return p == "." || p == "!" || p == "?";
}

struct Clitic {
  std::string_view ascii;
  std::string_view curly;
};

constexpr std::array<Clitic, 7> kClitics = {{
    {"n't", "n’t"},
    {"'s", "’s"},
    {"'re", "’re"},
    {"'ve", "’ve"},
    {"'ll", "’ll"},
    {"'d", "’d"},
    {"'m", "’m"},
}};

// Length of the clitic suffix of `core`, or 0.
std::size_t clitic_len(std::string_view core) {
  const std::string lower = to_lower_ascii(core);
  for (const Clitic& clitic : kClitics) {
    for (std::string_view form : {clitic.ascii, clitic.curly}) {
      if (lower.size() > form.size() &&
          std::string_view(lower).substr(lower.size() - form.size()) == form) {
        return form.size();
      }
    }
  }
  return 0;
}

void tokenize_chunk(std::string_view text, std::size_t begin, std::size_t end,
                    std::vector<RawToken>& out) {
  auto emit = [&](std::size_t b, std::size_t e) {
    out.push_back(RawToken{std::string(text.substr(b, e - b)), b, e});
  };
  auto starts_url = [&](std::size_t b) { return text.substr(b, kUrlToken.size()) == kUrlToken; };
  auto ends_url = [&](std::size_t e) {
    return e - begin >= kUrlToken.size() &&
           text.substr(e - kUrlToken.size(), kUrlToken.size()) == kUrlToken;
  };

  std::size_t b = begin;
  std::size_t e = end;
  while (b < e && !starts_url(b)) {
    std::size_t n = punct_len(text, b);
    if (n == 0) break;
    std::size_t run_end = b + n;
    const std::string_view p = text.substr(b, n);
    if (groups_with_itself(p)) {
      while (run_end < e && text.substr(run_end, n) == p) run_end += n;
    }
    emit(b, run_end);
    b = run_end;
  }

  std::vector<RawToken> trailing;
  while (e > b && !ends_url(e)) {
    std::size_t n = punct_len_before(text, e);
    if (n == 0) break;
    std::size_t run_begin = e - n;
    const std::string_view p = text.substr(run_begin, n);
    if (groups_with_itself(p)) {
      while (run_begin >= b + n && text.substr(run_begin - n, n) == p) run_begin -= n;
    }
    trailing.push_back(RawToken{std::string(text.substr(run_begin, e - run_begin)), run_begin, e});
    e = run_begin;
  }

  if (e > b) {
    const std::string_view core = text.substr(b, e - b);
    if (std::size_t n = clitic_len(core); n > 0) {
      emit(b, e - n);
      emit(e - n, e);
    } else {
      emit(b, e);
    }
  }
  for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) out.push_back(std::move(*it));
}

}  // namespace

std::string normalize_text(std::string_view raw, TextKind kind) {
  std::string text(raw);
  remove_footers(text);
  replace_urls(text);
  replace_delta_variants(text);
  if (kind == TextKind::kExplanation) strip_leading_delta(text);
  strip_reddit_prefixes(text);
  remove_edits(text);
  convert_blockquotes(text);
  collapse_runs(text);
  // Earlier steps can expose a new leading "delta"; check the final text too.
  if (kind == TextKind::kExplanation) {
    strip_leading_delta(text);
    collapse_runs(text);
  }
  return text;
}

std::vector<RawToken> tokenize(std::string_view normalized) {
  std::vector<RawToken> tokens;
  std::size_t i = 0;
  const std::size_t n = normalized.size();
  while (i < n) {
    while (i < n && whitespace_len(normalized, i) > 0) i += whitespace_len(normalized, i);
    if (i >= n) break;
    std::size_t j = i;
    while (j < n && whitespace_len(normalized, j) == 0) ++j;
    tokenize_chunk(normalized, i, j, tokens);
    i = j;
  }
  return tokens;
}

bool is_double_quote(std::string_view token) {
  return token == "\"" || token == "“" || token == "”";
}

void mark_quotes(std::vector<Token>& tokens) {
  for (Token& token : tokens) token.in_quotes = false;
  std::optional<std::size_t> open;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!is_double_quote(tokens[i].surface)) continue;
    if (!open) {
      open = i;
      continue;
    }
    for (std::size_t k = *open + 1; k < i; ++k) tokens[k].in_quotes = true;
    open.reset();
  }
}

std::string lowercase_token(std::string_view surface) {
  std::string lower = to_lower_ascii(surface);
  replace_all(lower, "’", "'");
  replace_all(lower, "‘", "'");
  replace_all(lower, "“", "\"");
  replace_all(lower, "”", "\"");
  return lower;
}

std::string stem_token(std::string_view lower) {
  if (std::none_of(lower.begin(), lower.end(), is_ascii_alpha)) return std::string(lower);
  return porter_stem(lower);
}

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

}  // namespace echotrace
