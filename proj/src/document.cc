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

#include "echotrace/document.h"

#include <algorithm>

namespace echotrace {
namespace {

constexpr std::array<std::string_view, kNumUpos> kUposNames = {
    "ADP",  "PRON", "X",    "DET", "ADJ",   "PROPN", "VERB", "PART",
    "CCONJ", "INTJ", "NOUN", "NUM", "ADV", "PUNCT", "SYM",  "AUX",
};

constexpr std::array<std::string_view, 6> kSubjectLabels = {
    "nsubj", "nsubjpass", "csubj", "csubjpass", "agent", "expl"};

constexpr std::array<std::string_view, 4> kObjectLabels = {"dobj", "dative",
                                                           "attr", "oprd"};

constexpr std::array<std::string_view, 11> kEntityTypes = {
    "PERSON",  "NORP",  "FAC",         "ORG", "GPE",     "LOC",
    "PRODUCT", "EVENT", "WORK_OF_ART", "LAW", "LANGUAGE"};

template <typename Range>
bool contains(const Range& range, std::string_view value) {
  return std::find(range.begin(), range.end(), value) != range.end();
}

}  // namespace

std::string_view upos_name(Upos tag) {
  return kUposNames[static_cast<std::size_t>(tag)];
}

const std::array<Upos, kNumUpos>& all_upos() {
  static const std::array<Upos, kNumUpos> tags = [] {
    std::array<Upos, kNumUpos> out{};
    for (std::size_t i = 0; i < kNumUpos; ++i) out[i] = static_cast<Upos>(i);
    return out;
  }();
  return tags;
}

std::optional<Upos> parse_upos(std::string_view tag) {
  if (tag == "SPACE") return std::nullopt;
  if (tag == "SCONJ") return Upos::kAdp;
  for (std::size_t i = 0; i < kNumUpos; ++i) {
    if (kUposNames[i] == tag) return static_cast<Upos>(i);
  }
  return Upos::kX;
}

DepRole dep_role(std::string_view label) {
  if (contains(kSubjectLabels, label)) return DepRole::kSubject;
  if (contains(kObjectLabels, label)) return DepRole::kObject;
  return DepRole::kOther;
}

bool is_listed_entity_type(std::string_view type) {
  return contains(kEntityTypes, type);
}

}  // namespace echotrace
