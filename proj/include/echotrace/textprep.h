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

#ifndef ECHOTRACE_TEXTPREP_H_
#define ECHOTRACE_TEXTPREP_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "echotrace/document.h"

namespace echotrace {

// Which conversational role a text plays. Only explanations get the leading
// "delta" stripped.
enum class TextKind { kPost, kComment, kExplanation };

// Runs the seven-step cleanup over a raw post or comment, in order:
//   1. delete moderator footers ("Hello, users of CMV" / "This is a footnote")
//      through end of line;
//   2. replace URLs matching (https?://[^\s)]*) with "@url@";
//   3. map delta symbols and analogues to the word "delta", then drop leading
//      "delta" words from explanations;
//   4. strip u/, r/, /u/ and /r/ prefixes;
//   5. delete EDIT(.*?):.* and Edit(.*?):.* through end of line;
//   6. wrap blockquoted lines in double quotes;
//   7. collapse whitespace runs to one space and runs of two or more hyphens,
//      asterisks or underscores to one character; trim.
std::string normalize_text(std::string_view raw, TextKind kind = TextKind::kComment);

struct RawToken {
  std::string text;
  std::size_t begin = 0;  // byte offset into the normalized text
  std::size_t end = 0;
};

// Rule-based word/punctuation tokenizer. Splits on whitespace, detaches
// leading and trailing punctuation, and splits the English clitics n't, 's,
// 're, 've, 'll, 'd and 'm. The "@url@" sentinel is kept whole.
std::vector<RawToken> tokenize(std::string_view normalized);

// ASCII and curly double quotes.
bool is_double_quote(std::string_view token);

// Flags tokens strictly between matched pairs of double-quote tokens. Pairs
// are matched left to right over the whole document; a trailing unmatched
// opening quote flags nothing.
void mark_quotes(std::vector<Token>& tokens);

// Lowercases ASCII letters and folds the curly apostrophe to '.
std::string lowercase_token(std::string_view surface);

// Porter stem of the lowercased token; tokens without a letter keep their
// lowercase form.
std::string stem_token(std::string_view lower);

// Number of UTF-8 code points.
std::size_t utf8_length(std::string_view text);

}  // namespace echotrace

#endif  // ECHOTRACE_TEXTPREP_H_
