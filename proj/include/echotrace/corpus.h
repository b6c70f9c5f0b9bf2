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

#ifndef ECHOTRACE_CORPUS_H_
#define ECHOTRACE_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace echotrace {

// UTC seconds since the epoch.
using Timestamp = std::int64_t;

struct Submission {
  std::string id;
  std::string author;
  Timestamp created_at = 0;
  std::string title;
  std::string body;
};

struct Comment {
  std::string id;
  std::string author;
  Timestamp created_at = 0;
  std::string body;
  std::string parent_id;  // as in the dump: "t3_<submission>" or "t1_<comment>"
  std::string thread_id;  // submission id, prefix stripped
};

struct Dump {
  std::vector<Submission> submissions;
  std::vector<Comment> comments;
  std::size_t skipped_lines = 0;
};

// Reads a JSONL dump holding submissions ({"id","author","created_utc",
// "title","selftext"}) and/or comments ({"id","author","created_utc","body",
// "parent_id","link_id"}). Malformed lines are skipped and counted.
// Throws IoError if unreadable and EmptyCorpusError if no line parses.
Dump load_dump(const std::filesystem::path& path);

// Concatenates several dumps (e.g. a submissions file and a comments file).
Dump load_dumps(std::span<const std::filesystem::path> paths);

struct ConversationTriple {
  std::string triple_id;
  std::string op_text;
  std::string pc_text;
  std::string explanation_text;
  std::string op_author;
  int pc_depth = 1;
  Timestamp created_at = 0;
};

struct ExtractionReport {
  std::size_t dangling_parents = 0;
  std::size_t deleted_dropped = 0;
  // Persuasive comments that received more than one explanation from the OP.
  std::size_t multi_explanation_pcs = 0;
};

struct Extraction {
  std::vector<ConversationTriple> triples;
  ExtractionReport report;
};

// True when the text carries a delta token (Δ, δ, "&;#8710;", "&#8710;" or
// "!delta" in any case).
bool contains_delta(std::string_view text);

// "[deleted]" / "[removed]", compared after trimming surrounding whitespace.
bool is_deleted_placeholder(std::string_view text);

// Strips a "t1_" / "t3_" kind prefix from a fullname.
std::string_view strip_kind_prefix(std::string_view fullname);

// Emits one triple per OP-authored delta comment that replies to another
// user's comment. Output is ordered by (created_at, triple_id).
Extraction extract_triples(std::span<const Submission> submissions,
                           std::span<const Comment> comments);

struct SplitCorpus {
  std::vector<ConversationTriple> train;
  std::vector<ConversationTriple> validation;
  std::vector<ConversationTriple> test;
  std::vector<std::string> warnings;
};

// Shifts a timestamp back by whole calendar months, clamping the day of month.
Timestamp subtract_months(Timestamp t, int months);

// Test = the final `test_months` before the latest timestamp, validation = the
// `validation_months` before that, train = the rest. Boundary timestamps go to
// the later split. Throws EmptyCorpusError on empty input.
SplitCorpus split_by_time(std::vector<ConversationTriple> triples, int test_months = 6,
                          int validation_months = 6);

nlohmann::json triple_to_json(const ConversationTriple& triple);
ConversationTriple triple_from_json(const nlohmann::json& j);

void write_triples(const std::filesystem::path& path, std::span<const ConversationTriple> triples);
std::vector<ConversationTriple> read_triples(const std::filesystem::path& path);

}  // namespace echotrace

#endif  // ECHOTRACE_CORPUS_H_
