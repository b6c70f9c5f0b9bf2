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

#include "echotrace/annotate.h"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "echotrace/error.h"
#include "echotrace/io.h"
#include "echotrace/textprep.h"

namespace echotrace {
namespace {

using nlohmann::json;

using WordSet = std::unordered_set<std::string_view>;

const WordSet& determiners() {
  static const WordSet s = {"a",    "an",      "the",     "this",  "that",   "these",
                            "those", "every",  "each",    "some",  "any",    "no",
                            "all",  "another", "either",  "neither", "such", "both",
                            "few",  "many",    "several", "whatever"};
  return s;
}

const WordSet& pronouns() {
  static const WordSet s = {
      "i",        "me",        "my",       "mine",      "myself",    "you",       "your",
      "yours",    "yourself",  "yourselves", "he",      "him",       "his",       "himself",
      "she",      "her",       "hers",     "herself",   "it",        "its",       "itself",
      "we",       "us",        "our",      "ours",      "ourselves", "they",      "them",
      "their",    "theirs",    "themselves", "who",     "whom",      "whose",     "which",
      "what",     "something", "anything", "nothing",   "everything", "someone", "anyone",
      "everyone", "nobody",    "somebody", "anybody",   "everybody", "one",       "ones",
      "y'all",    "u"};
  return s;
}

const WordSet& adpositions() {
  static const WordSet s = {
      "of",      "in",      "on",     "at",      "by",     "for",     "with",   "about",
      "against", "between", "into",   "through", "during", "before",  "after",  "above",
      "below",   "from",    "over",   "under",   "since",  "without", "within", "among",
      "across",  "along",   "around", "behind",  "beyond", "despite", "except", "like",
      "near",    "onto",    "toward", "towards", "upon",   "via",     "because", "if",
      "while",   "although", "though", "unless", "whether", "than",   "as",     "until",
      "per",     "whereas", "once",   "throughout", "outside", "inside", "regarding"};
  return s;
}

const WordSet& conjunctions() {
  static const WordSet s = {"and", "or", "but", "nor", "yet", "plus", "&"};
  return s;
}

const WordSet& auxiliaries() {
  static const WordSet s = {"be",    "am",    "is",     "are",   "was",    "were",  "been",
                            "being", "have",  "has",    "had",   "having", "do",    "does",
                            "did",   "will",  "would",  "shall", "should", "can",   "could",
                            "may",   "might", "must",   "'m",    "'re",    "'ve",   "'ll",
                            "'d",    "ca",    "wo",     "sha",   "ai"};
  return s;
}

const WordSet& particles() {
  static const WordSet s = {"not", "n't", "to", "'s", "'"};
  return s;
}

const WordSet& adverbs() {
  static const WordSet s = {
      "very",   "too",    "also",      "just",      "only",    "really",   "so",
      "then",   "now",    "here",      "there",     "when",    "where",    "why",
      "how",    "never",  "always",    "often",     "sometimes", "still",  "even",
      "already", "again", "quite",     "rather",    "almost",  "perhaps",  "maybe",
      "ever",   "however", "therefore", "thus",     "instead", "more",     "most",
      "less",   "least",  "much",      "well",      "up",      "down",     "out",
      "off",    "away",   "back",      "together",  "else",    "otherwise", "anyway",
      "soon",   "yet",    "indeed",    "somewhat",  "enough",  "later",    "today",
      "tomorrow", "yesterday", "ago",  "overall",   "further", "hence"};
  return s;
}

const WordSet& interjections() {
  static const WordSet s = {"yes",  "oh",   "hey", "hi",     "hello", "thanks", "please",
                            "wow",  "ok",   "okay", "yeah",  "lol",   "ah",     "hmm",
                            "nope", "yep",  "um",  "uh",     "alas",  "wait",   "whoa"};
  return s;
}

const WordSet& number_words() {
  static const WordSet s = {"zero",  "one",    "two",      "three",   "four",    "five",
                            "six",   "seven",  "eight",    "nine",    "ten",     "eleven",
                            "twelve", "twenty", "thirty",  "forty",   "fifty",   "hundred",
                            "thousand", "million", "billion", "trillion", "dozen"};
  return s;
}

const WordSet& common_verbs() {
  static const WordSet s = {
      "think",  "know",   "make",     "get",     "go",      "see",     "say",    "want",
      "believe", "feel",  "agree",    "change",  "understand", "use",  "take",   "give",
      "need",   "seem",   "come",     "tell",    "find",    "keep",    "let",    "put",
      "mean",   "become", "leave",    "show",    "try",     "ask",     "work",   "call",
      "argue",  "made",   "said",     "got",     "went",    "saw",     "took",   "gave",
      "knew",   "thought", "told",    "found",   "felt",    "became",  "left",   "kept",
      "view",   "consider", "accept", "support", "disagree", "realize", "learn", "help",
      "thank",  "hold",   "bring",    "begin",   "allow",   "happen",  "pay",    "vote"};
  return s;
}

const WordSet& symbols() {
  static const WordSet s = {"$", "%", "+", "=", "<", ">", "#", "^", "|", "~", "/", "\\", "€", "£"};
  return s;
}

bool is_numeric(std::string_view s) {
  bool digit = false;
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c != '.' && c != ',' && c != '-' && c != '/' && c != ':') {
      return false;
    }
  }
  return digit;
}

bool all_punct(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && !std::ispunct(u)) return false;
  }
  return true;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() + 1 && s.substr(s.size() - suffix.size()) == suffix;
}

bool any_suffix(std::string_view s, std::initializer_list<std::string_view> suffixes) {
  return std::any_of(suffixes.begin(), suffixes.end(),
                     [&](std::string_view suffix) { return ends_with(s, suffix); });
}

void finish_doc(AnnotatedDoc& doc) {
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    Token& t = doc.tokens[i];
    t.index = i;
    t.lower = lowercase_token(t.surface);
    t.stem = stem_token(t.lower);
  }
  mark_quotes(doc.tokens);
}

std::string required_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw SchemaError(std::string("exchange record needs string field '") + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

ExchangeDoc parse_exchange_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("exchange line is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("exchange line is not an object");
  ExchangeDoc doc;
  doc.doc_id = required_string(j, "doc_id");
  auto tokens = j.find("tokens");
  if (tokens == j.end() || !tokens->is_array()) throw SchemaError("exchange record needs a tokens array");
  doc.tokens.reserve(tokens->size());
  for (const json& t : *tokens) {
    if (!t.is_object()) throw SchemaError("exchange token is not an object");
    ExchangeToken token{required_string(t, "text"), required_string(t, "upos"),
                        required_string(t, "dep"), required_string(t, "ent")};
    doc.tokens.push_back(std::move(token));
  }
  return doc;
}

std::string exchange_doc_to_line(const ExchangeDoc& doc) {
  json tokens = json::array();
  for (const ExchangeToken& t : doc.tokens) {
    tokens.push_back({{"text", t.text}, {"upos", t.upos}, {"dep", t.dep}, {"ent", t.ent}});
  }
  return json{{"doc_id", doc.doc_id}, {"tokens", std::move(tokens)}}.dump();
}

std::unordered_map<std::string, ExchangeDoc> read_exchange_file(const std::filesystem::path& path) {
  std::unordered_map<std::string, ExchangeDoc> docs;
  for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    try {
      ExchangeDoc doc = parse_exchange_line(line);
      std::string id = doc.doc_id;
      docs.insert_or_assign(std::move(id), std::move(doc));
    } catch (const SchemaError& e) {
      throw SchemaError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  });
  return docs;
}

void write_exchange_file(const std::filesystem::path& path, std::span<const ExchangeDoc> docs) {
  std::string out;
  for (const ExchangeDoc& doc : docs) {
    out += exchange_doc_to_line(doc);
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

AnnotatedDoc doc_from_exchange(const ExchangeDoc& exchange) {
  AnnotatedDoc doc;
  doc.tokens.reserve(exchange.tokens.size());
  for (const ExchangeToken& t : exchange.tokens) {
    const std::optional<Upos> pos = parse_upos(t.upos);
    if (!pos) continue;
    if (t.text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    Token token;
    token.surface = t.text;
    token.pos = *pos;
    token.dep = dep_role(t.dep);
    token.is_entity = is_listed_entity_type(t.ent);
    doc.tokens.push_back(std::move(token));
  }
  finish_doc(doc);
  return doc;
}

Upos builtin_tag(std::string_view surface, bool sentence_initial) {
  if (surface == "@url@") return Upos::kX;
  const std::string lower = lowercase_token(surface);
  if (symbols().count(lower)) return Upos::kSym;
  if (all_punct(surface) || is_double_quote(surface) || surface == "’" || surface == "‘" ||
      surface == "…" || surface == "—" || surface == "–") {
    return Upos::kPunct;
  }
  if (is_numeric(lower) || number_words().count(lower)) return Upos::kNum;
  if (particles().count(lower)) return Upos::kPart;
  if (auxiliaries().count(lower)) return Upos::kAux;
  if (pronouns().count(lower)) return Upos::kPron;
  if (determiners().count(lower)) return Upos::kDet;
  if (conjunctions().count(lower)) return Upos::kCconj;
  if (adpositions().count(lower)) return Upos::kAdp;
  if (interjections().count(lower)) return Upos::kIntj;
  if (adverbs().count(lower)) return Upos::kAdv;
  if (common_verbs().count(lower)) return Upos::kVerb;

  const bool capitalized = std::isupper(static_cast<unsigned char>(surface.front())) != 0;
  if (capitalized && !sentence_initial) return Upos::kPropn;
  if (any_suffix(lower, {"ly"})) return Upos::kAdv;
  if (any_suffix(lower, {"ing", "ed", "ize", "ise", "ify", "ate", "en"})) return Upos::kVerb;
  if (any_suffix(lower, {"ous", "ful", "ive", "able", "ible", "al", "ic", "less", "ish", "ary",
                         "ent", "ant", "est"})) {
    return Upos::kAdj;
  }
  if (std::none_of(lower.begin(), lower.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80;
      })) {
    return Upos::kX;
  }
  return Upos::kNoun;
}

AnnotatedDoc annotate_builtin(std::string_view normalized) {
  AnnotatedDoc doc;
  const std::vector<RawToken> raw = tokenize(normalized);
  doc.tokens.reserve(raw.size());
  bool sentence_initial = true;
  for (const RawToken& r : raw) {
    Token token;
    token.surface = r.text;
    token.pos = builtin_tag(r.text, sentence_initial);
    doc.tokens.push_back(std::move(token));
    if (r.text == "." || r.text == "!" || r.text == "?" || r.text == "..." ||
        is_double_quote(r.text)) {
      sentence_initial = true;
    } else if (!all_punct(r.text)) {
      sentence_initial = false;
    }
  }
  finish_doc(doc);
  return doc;
}

AnnotatedDoc BuiltinAnnotator::annotate(std::string_view, std::string_view normalized) const {
  return annotate_builtin(normalized);
}

ExchangeAnnotator ExchangeAnnotator::load(const std::filesystem::path& path) {
  return ExchangeAnnotator(read_exchange_file(path));
}

AnnotatedDoc ExchangeAnnotator::annotate(std::string_view doc_id, std::string_view) const {
  auto it = docs_.find(std::string(doc_id));
  if (it == docs_.end()) {
    throw SchemaError("no exchange annotation for doc_id '" + std::string(doc_id) + "'");
  }
  return doc_from_exchange(it->second);
}

std::string doc_id(std::string_view triple_id, TriplePart part) {
  std::string id(triple_id);
  switch (part) {
    case TriplePart::kOp:
      return id + ":op";
    case TriplePart::kPc:
      return id + ":pc";
    case TriplePart::kExplanation:
      return id + ":exp";
  }
  return id;
}

NormalizedTriple normalize_triple(const ConversationTriple& triple) {
  return NormalizedTriple{normalize_text(triple.op_text, TextKind::kPost),
                          normalize_text(triple.pc_text, TextKind::kComment),
                          normalize_text(triple.explanation_text, TextKind::kExplanation)};
}

AnnotatedTriple annotate_triple(const ConversationTriple& triple, const Annotator& annotator) {
  const NormalizedTriple text = normalize_triple(triple);
  AnnotatedTriple out;
  out.triple_id = triple.triple_id;
  out.pc_depth = triple.pc_depth;
  out.created_at = triple.created_at;
  out.op = annotator.annotate(doc_id(triple.triple_id, TriplePart::kOp), text.op);
  out.pc = annotator.annotate(doc_id(triple.triple_id, TriplePart::kPc), text.pc);
  out.explanation =
      annotator.annotate(doc_id(triple.triple_id, TriplePart::kExplanation), text.explanation);
  return out;
}

std::vector<AnnotatedTriple> annotate_triples(std::span<const ConversationTriple> triples,
                                              const Annotator& annotator) {
  std::vector<AnnotatedTriple> out;
  out.reserve(triples.size());
  for (const auto& t : triples) out.push_back(annotate_triple(t, annotator));
  return out;
}

void write_annotation_requests(const std::filesystem::path& path,
                               std::span<const ConversationTriple> triples) {
  std::string out;
  for (const auto& t : triples) {
    const NormalizedTriple text = normalize_triple(t);
    const std::pair<TriplePart, const std::string*> parts[] = {
        {TriplePart::kOp, &text.op},
        {TriplePart::kPc, &text.pc},
        {TriplePart::kExplanation, &text.explanation}};
    for (const auto& [part, body] : parts) {
      out += json{{"doc_id", doc_id(t.triple_id, part)}, {"text", *body}}.dump();
      out.push_back('\n');
    }
  }
  write_file_atomic(path, out);
}

}  // namespace echotrace
