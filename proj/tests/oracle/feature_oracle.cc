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

#include "feature_oracle.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "echotrace/porter.h"

namespace echotrace::oracle {
namespace {

const char* kTags[16] = {"ADP",  "PRON", "X",    "DET",  "ADJ",  "PROPN", "VERB", "PART",
                         "CCONJ", "INTJ", "NOUN", "NUM", "ADV", "PUNCT", "SYM",  "AUX"};

std::vector<OTok> read_tokens(const nlohmann::json& arr) {
  std::vector<OTok> out;
  for (const auto& t : arr) {
    OTok tok{t["text"], t["upos"], t["dep"], t["ent"]};
    if (tok.upos == "SPACE") continue;
    out.push_back(tok);
  }
  return out;
}

int tag_index(const std::string& upos) {
  const std::string u = upos == "SCONJ" ? "ADP" : upos;
  for (int i = 0; i < 16; ++i) {
    if (u == kTags[i]) return i;
  }
  return 2;  // X
}

int dep_index(const std::string& dep) {
  for (const char* s : {"nsubj", "nsubjpass", "csubj", "csubjpass", "agent", "expl"}) {
    if (dep == s) return 0;
  }
  for (const char* s : {"dobj", "dative", "attr", "oprd"}) {
    if (dep == s) return 1;
  }
  return 2;
}

bool listed_entity(const std::string& ent) {
  for (const char* s : {"PERSON", "NORP", "FAC", "ORG", "GPE", "LOC", "PRODUCT", "EVENT",
                        "WORK_OF_ART", "LAW", "LANGUAGE"}) {
    if (ent == s) return true;
  }
  return false;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) {
    s.replace(p, from.size(), to);
  }
  return s;
}

std::string lower(const std::string& text) {
  std::string s = text;
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  s = replace_all(s, "\xE2\x80\x99", "'");
  s = replace_all(s, "\xE2\x80\x98", "'");
  s = replace_all(s, "\xE2\x80\x9C", "\"");
  s = replace_all(s, "\xE2\x80\x9D", "\"");
  return s;
}

std::string stem_of(const OTok& t) {
  const std::string l = lower(t.text);
  const bool letter = std::any_of(l.begin(), l.end(), [](char c) { return c >= 'a' && c <= 'z'; });
  return letter ? porter_stem(l) : l;
}

double code_points(const std::string& s) {
  double n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) n += 1;
  }
  return n;
}

std::vector<bool> quoted(const std::vector<OTok>& doc) {
  std::vector<std::size_t> marks;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (lower(doc[i].text) == "\"") marks.push_back(i);
  }
  std::vector<bool> q(doc.size(), false);
  for (std::size_t k = 0; k + 1 < marks.size(); k += 2) {
    for (std::size_t i = marks[k] + 1; i < marks[k + 1]; ++i) q[i] = true;
  }
  return q;
}

bool contains(const std::vector<OTok>& doc, const std::string& stem) {
  for (const auto& t : doc) {
    if (stem_of(t) == stem) return true;
  }
  return false;
}

double entropy_bits(const std::vector<double>& p) {
  double h = 0;
  for (double v : p) {
    if (v > 0) h -= v * std::log(v) / std::log(2.0);
  }
  return h;
}

// JS = H(M) - (H(P) + H(Q)) / 2.
double js(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = (p[i] + q[i]) / 2;
  return entropy_bits(m) - (entropy_bits(p) + entropy_bits(q)) / 2;
}

struct Side {
  std::vector<double> pos = std::vector<double>(16, 1.0 / 16);
  std::vector<double> dep = std::vector<double>(3, 1.0 / 3);
  double tf = 0, ntf = 0, forms = 0, location = 0.5, quotes = 0, entity = 0;
  std::set<std::string> form_set;
};

Side side(const std::vector<OTok>& doc, const std::string& stem) {
  Side s;
  const std::vector<bool> q = quoted(doc);
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (stem_of(doc[i]) == stem) hits.push_back(i);
  }
  if (hits.empty()) return s;
  const double n = static_cast<double>(doc.size());
  std::fill(s.pos.begin(), s.pos.end(), 0.0);
  std::fill(s.dep.begin(), s.dep.end(), 0.0);
  double loc = 0;
  double ents = 0;
  for (std::size_t i : hits) {
    s.pos[tag_index(doc[i].upos)] += 1.0 / hits.size();
    s.dep[dep_index(doc[i].dep)] += 1.0 / hits.size();
    loc += (n - static_cast<double>(i) - 1) / n;
    if (q[i]) s.quotes += 1;
    if (listed_entity(doc[i].ent)) ents += 1;
    s.form_set.insert(lower(doc[i].text));
  }
  s.tf = static_cast<double>(hits.size());
  s.ntf = s.tf / n;
  s.forms = static_cast<double>(s.form_set.size());
  s.location = loc / s.tf;
  s.entity = ents / n;
  return s;
}

void put_side(std::array<double, 66>& f, int first, const Side& s) {
  // `first` is the 1-based number of the side's first POS feature.
  for (int i = 0; i < 16; ++i) f[first - 1 + i] = s.pos[i];
  for (int i = 0; i < 3; ++i) f[first + 15 + i] = s.dep[i];
  f[first + 18] = s.tf;
  f[first + 19] = s.ntf;
  f[first + 20] = s.forms;
  f[first + 21] = s.location;
  f[first + 22] = s.quotes;
  f[first + 23] = s.entity;
}

std::vector<double> doc_pos(const std::vector<OTok>& doc) {
  if (doc.empty()) return std::vector<double>(16, 1.0 / 16);
  std::vector<double> p(16, 0.0);
  for (const auto& t : doc) p[tag_index(t.upos)] += 1.0 / doc.size();
  return p;
}

double mean_chars(const std::vector<OTok>& doc) {
  if (doc.empty()) return 0;
  double c = 0;
  for (const auto& t : doc) c += code_points(t.text);
  return c / doc.size();
}

}  // namespace

std::vector<OTriple> load_fixture(const std::filesystem::path& triples,
                                  const std::filesystem::path& exchange) {
  std::map<std::string, nlohmann::json> docs;
  std::ifstream ex(exchange);
  for (std::string line; std::getline(ex, line);) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    docs[j["doc_id"]] = j["tokens"];
  }
  std::vector<OTriple> out;
  std::ifstream tr(triples);
  for (std::string line; std::getline(tr, line);) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    OTriple t;
    t.id = j["triple_id"];
    t.depth = j["pc_depth"];
    t.op = read_tokens(docs.at(t.id + ":op"));
    t.pc = read_tokens(docs.at(t.id + ":pc"));
    t.exp = read_tokens(docs.at(t.id + ":exp"));
    out.push_back(t);
  }
  return out;
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  Taxonomy out;
  std::ifstream in(path);
  std::string lemma;
  int lo = 0;
  int hi = 0;
  while (in >> lemma >> lo >> hi) out.emplace_back(lemma, lo, hi);
  return out;
}

bool is_count_feature(int number) {
  switch (number) {
    case 2: case 3: case 4:
    case 25: case 27: case 29:
    case 50: case 52: case 54:
    case 56: case 57: case 58:
    case 61: case 62: case 63: case 66:
      return true;
    default:
      return false;
  }
}

std::map<std::string, OracleRow> oracle_rows(const OTriple& triple,
                                             const std::vector<OTriple>& train,
                                             const Taxonomy& taxonomy) {
  std::set<std::string> candidates;
  for (const auto& t : triple.op) candidates.insert(stem_of(t));
  for (const auto& t : triple.pc) candidates.insert(stem_of(t));

  // Every stem seen in a training explanandum, for the fallback mean.
  std::set<std::string> train_stems;
  for (const auto& tr : train) {
    for (const auto& t : tr.op) train_stems.insert(stem_of(t));
    for (const auto& t : tr.pc) train_stems.insert(stem_of(t));
  }
  auto transfer = [&](const std::string& stem, bool* seen_any) {
    double seen = 0;
    double echoed = 0;
    for (const auto& tr : train) {
      if (contains(tr.op, stem) || contains(tr.pc, stem)) {
        seen += 1;
        if (contains(tr.exp, stem)) echoed += 1;
      }
    }
    *seen_any = seen > 0;
    return seen > 0 ? echoed / seen : 0.0;
  };
  double mean_transfer = 0;
  for (const auto& s : train_stems) {
    bool dummy = false;
    mean_transfer += transfer(s, &dummy);
  }
  mean_transfer /= static_cast<double>(train_stems.size());

  std::map<std::string, OracleRow> out;
  for (const std::string& stem : candidates) {
    OracleRow row;
    auto& f = row.f;
    double df = 0;
    for (const auto& tr : train) {
      if (contains(tr.op, stem)) df += 1;
      if (contains(tr.pc, stem)) df += 1;
    }
    if (df == 0) df = 1;
    f[0] = std::log(2.0 * static_cast<double>(train.size()) / df);
    f[1] = code_points(stem);
    bool found = false;
    int lo = 0;
    int hi = 0;
    for (const auto& [lemma, a, b] : taxonomy) {
      if (porter_stem(lower(lemma)) != stem) continue;
      lo = found ? std::min(lo, a) : a;
      hi = found ? std::max(hi, b) : b;
      found = true;
    }
    f[2] = lo;
    f[3] = hi;
    bool seen = false;
    const double tp = transfer(stem, &seen);
    f[4] = seen ? tp : mean_transfer;

    const Side op = side(triple.op, stem);
    const Side pc = side(triple.pc, stem);
    put_side(f, 6, op);
    put_side(f, 31, pc);

    f[55] = (op.tf > 0 && pc.tf > 0) ? 1 : 0;
    double only_op = 0;
    double only_pc = 0;
    for (const auto& s : op.form_set) only_op += pc.form_set.count(s) ? 0 : 1;
    for (const auto& s : pc.form_set) only_pc += op.form_set.count(s) ? 0 : 1;
    f[56] = only_op;
    f[57] = only_pc;
    f[58] = js(op.pos, pc.pos);
    f[59] = js(op.dep, pc.dep);

    f[60] = static_cast<double>(triple.op.size());
    f[61] = static_cast<double>(triple.pc.size());
    f[62] = std::fabs(f[60] - f[61]);
    f[63] = mean_chars(triple.op) - mean_chars(triple.pc);
    f[64] = js(doc_pos(triple.op), doc_pos(triple.pc));
    f[65] = triple.depth;

    row.label = contains(triple.exp, stem) ? 1 : 0;
    out[stem] = row;
  }
  return out;
}

}  // namespace echotrace::oracle
