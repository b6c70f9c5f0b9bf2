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

#ifndef ECHOTRACE_ANNOTATE_H_
#define ECHOTRACE_ANNOTATE_H_

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "echotrace/corpus.h"
#include "echotrace/document.h"

namespace echotrace {

// One token as produced by an external tagging pipeline.
struct ExchangeToken {
  std::string text;
  std::string upos;
  std::string dep;
  std::string ent;
};

// {"doc_id": str, "tokens": [{"text","upos","dep","ent"}]}
struct ExchangeDoc {
  std::string doc_id;
  std::vector<ExchangeToken> tokens;
};

// Throws SchemaError on any deviation from the exchange schema.
ExchangeDoc parse_exchange_line(std::string_view line);
std::string exchange_doc_to_line(const ExchangeDoc& doc);

std::unordered_map<std::string, ExchangeDoc> read_exchange_file(const std::filesystem::path& path);
void write_exchange_file(const std::filesystem::path& path, std::span<const ExchangeDoc> docs);

// Builds an annotated document from exchange tokens: drops SPACE tokens,
// computes lowercase forms and stems, maps dependency labels to roles, keeps
// only listed entity types, and marks quoted spans.
AnnotatedDoc doc_from_exchange(const ExchangeDoc& doc);

// Rule-based POS guess used by the builtin annotator.
Upos builtin_tag(std::string_view surface, bool sentence_initial);

// Tokenizes normalized text and tags it with builtin_tag. Every dependency
// role is "other" and no token is an entity.
AnnotatedDoc annotate_builtin(std::string_view normalized);

class Annotator {
 public:
  virtual ~Annotator() = default;
  virtual AnnotatedDoc annotate(std::string_view doc_id, std::string_view normalized) const = 0;
};

class BuiltinAnnotator final : public Annotator {
 public:
  AnnotatedDoc annotate(std::string_view doc_id, std::string_view normalized) const override;
};

// Serves annotations from an exchange file keyed by doc_id. A missing doc_id
// is a SchemaError.
class ExchangeAnnotator final : public Annotator {
 public:
  explicit ExchangeAnnotator(std::unordered_map<std::string, ExchangeDoc> docs)
      : docs_(std::move(docs)) {}

  static ExchangeAnnotator load(const std::filesystem::path& path);

  AnnotatedDoc annotate(std::string_view doc_id, std::string_view normalized) const override;

 private:
  std::unordered_map<std::string, ExchangeDoc> docs_;
};

enum class TriplePart { kOp, kPc, kExplanation };

// "<triple_id>:op", "<triple_id>:pc" or "<triple_id>:exp".
std::string doc_id(std::string_view triple_id, TriplePart part);

struct NormalizedTriple {
  std::string op;
  std::string pc;
  std::string explanation;
};

NormalizedTriple normalize_triple(const ConversationTriple& triple);

struct AnnotatedTriple {
  std::string triple_id;
  int pc_depth = 1;
  Timestamp created_at = 0;
  AnnotatedDoc op;
  AnnotatedDoc pc;
  AnnotatedDoc explanation;
};

AnnotatedTriple annotate_triple(const ConversationTriple& triple, const Annotator& annotator);

std::vector<AnnotatedTriple> annotate_triples(std::span<const ConversationTriple> triples,
                                              const Annotator& annotator);

// Writes the adapter input: one {"doc_id","text"} line per OP, PC and
// explanation, with normalized text.
void write_annotation_requests(const std::filesystem::path& path,
                               std::span<const ConversationTriple> triples);

}  // namespace echotrace

#endif  // ECHOTRACE_ANNOTATE_H_
