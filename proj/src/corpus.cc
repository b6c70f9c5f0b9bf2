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

#include "echotrace/corpus.h"

#include <algorithm>
#include <chrono>
#include <string>
#include <unordered_map>

#include "echotrace/error.h"
#include "echotrace/io.h"

namespace echotrace {
namespace {

using nlohmann::json;

std::string string_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw SchemaError(std::string("field '") + key + "' is not a string");
  return it->get<std::string>();
}

Timestamp timestamp_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + key + "'");
  if (it->is_number_integer()) return it->get<Timestamp>();
  if (it->is_number()) return static_cast<Timestamp>(it->get<double>());
  if (it->is_string()) return static_cast<Timestamp>(std::stod(it->get<std::string>()));
  throw SchemaError(std::string("field '") + key + "' is not a timestamp");
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool is_comment_fullname(std::string_view id) { return id.substr(0, 3) == "t1_"; }
bool is_submission_fullname(std::string_view id) { return id.substr(0, 3) == "t3_"; }

}  // namespace

std::string_view strip_kind_prefix(std::string_view fullname) {
  if (fullname.size() > 3 && fullname[0] == 't' && fullname[2] == '_') return fullname.substr(3);
  return fullname;
}

Dump load_dump(const std::filesystem::path& path) {
  Dump dump;
  std::size_t parsed = 0;
  for_each_line(path, [&](std::string_view line, std::size_t) {
    if (trim(line).empty()) return;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw SchemaError("not an object");
      const std::string id{strip_kind_prefix(string_field(j, "id"))};
      if (id.empty()) throw SchemaError("empty id");
      const Timestamp created = timestamp_field(j, "created_utc");
      if (created <= 0) throw SchemaError("non-positive created_utc");
      if (j.contains("parent_id")) {
        Comment c;
        c.id = id;
        c.author = string_field(j, "author");
        c.created_at = created;
        c.body = string_field(j, "body");
        c.parent_id = string_field(j, "parent_id");
        c.thread_id = std::string(strip_kind_prefix(string_field(j, "link_id")));
        if (c.parent_id.empty()) throw SchemaError("empty parent_id");
        dump.comments.push_back(std::move(c));
      } else if (j.contains("title")) {
        Submission s;
        s.id = id;
        s.author = string_field(j, "author");
        s.created_at = created;
        s.title = string_field(j, "title");
        s.body = string_field(j, "selftext");
        dump.submissions.push_back(std::move(s));
      } else {
        throw SchemaError("neither a submission nor a comment");
      }
      ++parsed;
    } catch (const std::exception&) {
      ++dump.skipped_lines;
    }
  });
  if (parsed == 0) throw EmptyCorpusError("no parseable records in " + path.string());
  return dump;
}

Dump load_dumps(std::span<const std::filesystem::path> paths) {
  Dump all;
  for (const auto& path : paths) {
    Dump part = load_dump(path);
    all.skipped_lines += part.skipped_lines;
    std::move(part.submissions.begin(), part.submissions.end(), std::back_inserter(all.submissions));
    std::move(part.comments.begin(), part.comments.end(), std::back_inserter(all.comments));
  }
  return all;
}

bool contains_delta(std::string_view text) {
  if (text.find("\xCE\x94") != std::string_view::npos) return true;  // Δ
  if (text.find("\xCE\xB4") != std::string_view::npos) return true;  // δ
  if (text.find("&;#8710;") != std::string_view::npos) return true;
  if (text.find("&#8710;") != std::string_view::npos) return true;
  std::string lower(text);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lower.find("!delta") != std::string::npos;
}

bool is_deleted_placeholder(std::string_view text) {
  const std::string_view t = trim(text);
  return t == "[deleted]" || t == "[removed]";
}

Extraction extract_triples(std::span<const Submission> submissions,
                           std::span<const Comment> comments) {
  std::unordered_map<std::string_view, const Submission*> submission_by_id;
  for (const Submission& s : submissions) submission_by_id.emplace(s.id, &s);
  std::unordered_map<std::string_view, const Comment*> comment_by_id;
  for (const Comment& c : comments) comment_by_id.emplace(c.id, &c);

  // Resolves a parent reference to a comment; nullptr when it points at the
  // submission. Sets `dangling` when the target is unknown.
  auto parent_comment = [&](const Comment& c, bool& dangling) -> const Comment* {
    dangling = false;
    const std::string_view raw = c.parent_id;
    const std::string_view id = strip_kind_prefix(raw);
    if (is_submission_fullname(raw) || (!is_comment_fullname(raw) && id == c.thread_id)) {
      return nullptr;
    }
    auto it = comment_by_id.find(id);
    if (it == comment_by_id.end()) {
      dangling = true;
      return nullptr;
    }
    return it->second;
  };

  Extraction out;
  std::unordered_map<std::string_view, std::size_t> explanations_per_pc;
  for (const Comment& c : comments) {
    auto sub_it = submission_by_id.find(c.thread_id);
    if (sub_it == submission_by_id.end()) continue;
    const Submission& op = *sub_it->second;
    if (op.author.empty() || op.author == "[deleted]") continue;
    if (c.author != op.author || !contains_delta(c.body)) continue;

    bool dangling = false;
    const Comment* pc = parent_comment(c, dangling);
    if (dangling) {
      ++out.report.dangling_parents;
      continue;
    }
    if (pc == nullptr || pc->author == op.author) continue;

    // Depth of the PC: 1 for a top-level comment.
    int depth = 1;
    const Comment* cur = pc;
    bool broken = false;
    for (std::size_t steps = 0;; ++steps) {
      if (steps > comments.size()) {
        broken = true;
        break;
      }
      const Comment* up = parent_comment(*cur, dangling);
      if (dangling) {
        broken = true;
        break;
      }
      if (up == nullptr) break;
      ++depth;
      cur = up;
    }
    if (broken) {
      ++out.report.dangling_parents;
      continue;
    }

    if (is_deleted_placeholder(op.title) || is_deleted_placeholder(op.body) ||
        is_deleted_placeholder(pc->body) || is_deleted_placeholder(c.body)) {
      ++out.report.deleted_dropped;
      continue;
    }

    ConversationTriple t;
    t.triple_id = c.id;
    t.op_text = op.title + "\n" + op.body;
    t.pc_text = pc->body;
    t.explanation_text = c.body;
    t.op_author = op.author;
    t.pc_depth = depth;
    t.created_at = c.created_at;
    out.triples.push_back(std::move(t));
    if (++explanations_per_pc[pc->id] == 2) ++out.report.multi_explanation_pcs;
  }
  std::sort(out.triples.begin(), out.triples.end(),
            [](const ConversationTriple& a, const ConversationTriple& b) {
              if (a.created_at != b.created_at) return a.created_at < b.created_at;
              return a.triple_id < b.triple_id;
            });
  return out;
}

Timestamp subtract_months(Timestamp t, int months) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{t}};
  const sys_days day = floor<days>(tp);
  const seconds time_of_day = tp - day;
  year_month_day ymd{day};
  ymd -= std::chrono::months{months};
  if (!ymd.ok()) ymd = ymd.year() / ymd.month() / last;
  return (sys_days{ymd} + time_of_day).time_since_epoch().count();
}

SplitCorpus split_by_time(std::vector<ConversationTriple> triples, int test_months,
                          int validation_months) {
  if (triples.empty()) throw EmptyCorpusError("no triples to split");
  Timestamp latest = triples.front().created_at;
  for (const auto& t : triples) latest = std::max(latest, t.created_at);
  const Timestamp test_start = subtract_months(latest, test_months);
  const Timestamp validation_start = subtract_months(test_start, validation_months);

  SplitCorpus split;
  for (auto& t : triples) {
    if (t.created_at >= test_start) {
      split.test.push_back(std::move(t));
    } else if (t.created_at >= validation_start) {
      split.validation.push_back(std::move(t));
    } else {
      split.train.push_back(std::move(t));
    }
  }
  if (split.train.empty() && split.validation.empty()) {
    split.warnings.push_back("all triples fall in the test window; train and validation are empty");
  } else if (split.train.empty()) {
    split.warnings.push_back("no triples precede the validation window; train is empty");
  }
  return split;
}

nlohmann::json triple_to_json(const ConversationTriple& t) {
  return json{{"triple_id", t.triple_id},
              {"op_text", t.op_text},
              {"pc_text", t.pc_text},
              {"explanation_text", t.explanation_text},
              {"pc_depth", t.pc_depth},
              {"created_utc", t.created_at},
              {"op_author", t.op_author}};
}

ConversationTriple triple_from_json(const nlohmann::json& j) {
  try {
    ConversationTriple t;
    t.triple_id = j.at("triple_id").get<std::string>();
    t.op_text = j.at("op_text").get<std::string>();
    t.pc_text = j.at("pc_text").get<std::string>();
    t.explanation_text = j.at("explanation_text").get<std::string>();
    t.pc_depth = j.at("pc_depth").get<int>();
    t.created_at = j.at("created_utc").get<Timestamp>();
    t.op_author = j.value("op_author", std::string());
    return t;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad triple record: ") + e.what());
  }
}

void write_triples(const std::filesystem::path& path, std::span<const ConversationTriple> triples) {
  std::string out;
  for (const auto& t : triples) {
    out += triple_to_json(t).dump();
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

std::vector<ConversationTriple> read_triples(const std::filesystem::path& path) {
  std::vector<ConversationTriple> triples;
  for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (trim(line).empty()) return;
    try {
      triples.push_back(triple_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw SchemaError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  });
  return triples;
}

}  // namespace echotrace
