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

#ifndef ECHOTRACE_DOCUMENT_H_
#define ECHOTRACE_DOCUMENT_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace echotrace {

// Universal POS tags in use for English, in canonical feature order. SCONJ is
// not part of the inventory.
enum class Upos : std::uint8_t {
  kAdp,
  kPron,
  kX,
  kDet,
  kAdj,
  kPropn,
  kVerb,
  kPart,
  kCconj,
  kIntj,
  kNoun,
  kNum,
  kAdv,
  kPunct,
  kSym,
  kAux,
};

inline constexpr std::size_t kNumUpos = 16;

// Upper-case tag name, e.g. "NOUN".
std::string_view upos_name(Upos tag);

// Maps a tag string from an external tagger onto the inventory. Returns
// nullopt for whitespace tokens ("SPACE"), which are dropped. SCONJ folds into
// ADP; anything unrecognized becomes X.
std::optional<Upos> parse_upos(std::string_view tag);

const std::array<Upos, kNumUpos>& all_upos();

enum class DepRole : std::uint8_t { kSubject, kObject, kOther };

inline constexpr std::size_t kNumDepRoles = 3;

// Coarse grammatical role of a raw dependency label (CLEAR tag set).
DepRole dep_role(std::string_view label);

// True for the entity types counted by the entity features.
bool is_listed_entity_type(std::string_view type);

struct Token {
  std::string surface;
  std::string lower;
  std::string stem;
  std::size_t index = 0;
  bool in_quotes = false;
  Upos pos = Upos::kX;
  DepRole dep = DepRole::kOther;
  bool is_entity = false;
};

struct AnnotatedDoc {
  std::vector<Token> tokens;

  std::size_t length() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

}  // namespace echotrace

#endif  // ECHOTRACE_DOCUMENT_H_
