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

#include "echotrace/features.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "echotrace/error.h"
#include "echotrace/io.h"
#include "echotrace/resources.h"
#include "echotrace/textprep.h"

namespace echotrace {
namespace {

using nlohmann::json;

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void fill_side_names(std::array<std::string, kNumFeatures>& names,
                     std::array<std::string, kNumFeatures>& labels, std::size_t base,
                     std::string_view key, std::string_view label) {
  const std::string k(key);
  const std::string l(label);
  for (Upos tag : all_upos()) {
    const std::string_view name = upos_name(tag);
    const std::size_t i = base + feat::kPos + static_cast<std::size_t>(tag);
    names[i] = k + "_pos_" + lower_ascii(name);
    labels[i] = l + " " + std::string(name);
  }
  const char* roles[] = {"subject", "object", "other"};
  for (std::size_t r = 0; r < kNumDepRoles; ++r) {
    names[base + feat::kDep + r] = k + "_dep_" + roles[r];
    labels[base + feat::kDep + r] = l + " " + roles[r];
  }
  names[base + feat::kTf] = k + "_tf";
  labels[base + feat::kTf] = l + " term frequency";
  names[base + feat::kNtf] = k + "_ntf";
  labels[base + feat::kNtf] = l + " normalized term frequency";
  names[base + feat::kSurfaceForms] = k + "_n_surface_forms";
  labels[base + feat::kSurfaceForms] = l + " # of surface forms";
  names[base + feat::kLocation] = k + "_location";
  labels[base + feat::kLocation] = l + " location";
  names[base + feat::kInQuotes] = k + "_in_quotes";
  labels[base + feat::kInQuotes] = l + " in quotes";
  names[base + feat::kEntityFrac] = k + "_entity_frac";
  labels[base + feat::kEntityFrac] = l + " is entity";
}

struct NameTables {
  std::array<std::string, kNumFeatures> names;
  std::array<std::string, kNumFeatures> labels;
};

const NameTables& name_tables() {
  static const NameTables tables = [] {
    NameTables t;
    auto set = [&](std::size_t i, const char* name, const char* label) {
      t.names[i] = name;
      t.labels[i] = label;
    };
    set(feat::kIdf, "idf", "Inverse document frequency");
    set(feat::kStemLength, "stem_length", "Stem length");
    set(feat::kWnDepthMin, "wn_depth_min", "Wordnet depth (min)");
    set(feat::kWnDepthMax, "wn_depth_max", "Wordnet depth (max)");
    set(feat::kTransferProb, "transfer_prob", "Stem transfer probability");
    fill_side_names(t.names, t.labels, feat::kOpBase, "op", "OP");
    fill_side_names(t.names, t.labels, feat::kPcBase, "pc", "PC");
    set(feat::kInBoth, "in_both", "In both OP and PC");
    set(feat::kUniqSfOpOnly, "uniq_sf_op_only", "# of unique surface forms in OP");
    set(feat::kUniqSfPcOnly, "uniq_sf_pc_only", "# of unique surface forms in PC");
    set(feat::kJsPos, "js_pos", "Stem POS distribution difference");
    set(feat::kJsDep, "js_dep", "Stem dependency distribution difference");
    set(feat::kOpLen, "op_len", "OP length");
    set(feat::kPcLen, "pc_len", "PC length");
    set(feat::kAbsLenDiff, "abs_len_diff", "Length difference");
    set(feat::kAvgWordLenDiff, "avg_word_len_diff", "Avg. word length difference");
    set(feat::kJsPosDocs, "js_pos_docs", "OP/PC POS distribution difference");
    set(feat::kPcDepth, "pc_depth", "Depth of the PC in the thread");
    return t;
  }();
  return tables;
}

// Splits one CSV record. Fields may be double-quoted with "" as an escape.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw SchemaError("unterminated quoted CSV field");
  fields.push_back(std::move(cur));
  return fields;
}

void append_csv_field(std::string& out, std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    out += field;
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

void write_side(FeatureVector& f, std::size_t base, const SideProfile& p) {
  for (std::size_t i = 0; i < kNumUpos; ++i) f[base + feat::kPos + i] = p.pos_dist[i];
  for (std::size_t i = 0; i < kNumDepRoles; ++i) f[base + feat::kDep + i] = p.dep_dist[i];
  f[base + feat::kTf] = p.tf;
  f[base + feat::kNtf] = p.ntf;
  f[base + feat::kSurfaceForms] = static_cast<double>(p.surface_forms.size());
  f[base + feat::kLocation] = p.location;
  f[base + feat::kInQuotes] = p.in_quotes;
  f[base + feat::kEntityFrac] = p.entity_frac;
}

}  // namespace

const std::array<std::string, kNumFeatures>& feature_names() { return name_tables().names; }
const std::array<std::string, kNumFeatures>& feature_labels() { return name_tables().labels; }

const std::array<FeatureGroup, 5>& all_feature_groups() {
  static const std::array<FeatureGroup, 5> groups = {
      FeatureGroup::kNonContextual, FeatureGroup::kOpUsage, FeatureGroup::kPcUsage,
      FeatureGroup::kRelation, FeatureGroup::kGeneral};
  return groups;
}

std::string_view group_name(FeatureGroup group) {
  switch (group) {
    case FeatureGroup::kNonContextual:
      return "non_contextual";
    case FeatureGroup::kOpUsage:
      return "op_usage";
    case FeatureGroup::kPcUsage:
      return "pc_usage";
    case FeatureGroup::kRelation:
      return "op_pc_relation";
    case FeatureGroup::kGeneral:
      return "general";
  }
  return "";
}

FeatureGroup parse_feature_group(std::string_view name) {
  for (FeatureGroup g : all_feature_groups()) {
    if (group_name(g) == name) return g;
  }
  throw std::invalid_argument("unknown feature group '" + std::string(name) + "'");
}

std::vector<std::size_t> group_indices(FeatureGroup group) {
  std::size_t begin = 0;
  std::size_t end = 0;
  switch (group) {
    case FeatureGroup::kNonContextual:
      begin = 0, end = feat::kOpBase;
      break;
    case FeatureGroup::kOpUsage:
      begin = feat::kOpBase, end = feat::kPcBase;
      break;
    case FeatureGroup::kPcUsage:
      begin = feat::kPcBase, end = feat::kInBoth;
      break;
    case FeatureGroup::kRelation:
      begin = feat::kInBoth, end = feat::kOpLen;
      break;
    case FeatureGroup::kGeneral:
      begin = feat::kOpLen, end = kNumFeatures;
      break;
  }
  std::vector<std::size_t> out(end - begin);
  std::iota(out.begin(), out.end(), begin);
  return out;
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  Taxonomy t;
  for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty() || line.front() == '#') return;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos) {
      throw SchemaError(path.string() + ":" + std::to_string(number) + ": expected 3 columns");
    }
    const double lo = parse_double(line.substr(tab1 + 1, tab2 - tab1 - 1));
    const double hi = parse_double(line.substr(tab2 + 1));
    t.add(line.substr(0, tab1), static_cast<int>(lo), static_cast<int>(hi));
  });
  return t;
}

const Taxonomy& Taxonomy::standard() {
  static const Taxonomy t = load(resource_path("taxonomy.tsv"));
  return t;
}

void Taxonomy::add(std::string_view lemma, int min_depth, int max_depth) {
  const std::string stem = stem_token(lowercase_token(lemma));
  auto [it, inserted] = depths_.try_emplace(stem, min_depth, max_depth);
  if (!inserted) {
    it->second.first = std::min(it->second.first, min_depth);
    it->second.second = std::max(it->second.second, max_depth);
  }
}

std::pair<int, int> Taxonomy::depths(std::string_view stem) const {
  auto it = depths_.find(std::string(stem));
  return it == depths_.end() ? std::pair{0, 0} : it->second;
}

double CorpusStats::idf(std::string_view stem) const {
  return std::log(static_cast<double>(n_docs) / static_cast<double>(doc_freq(stem)));
}

std::size_t CorpusStats::doc_freq(std::string_view stem) const {
  auto it = df.find(std::string(stem));
  return it == df.end() ? 1 : it->second;
}

double CorpusStats::transfer(std::string_view stem) const {
  auto it = transfer_prob.find(std::string(stem));
  return it == transfer_prob.end() ? mean_transfer_prob : it->second;
}

json CorpusStats::to_json() const {
  // Sorted keys keep the file byte-stable across runs.
  std::map<std::string, std::size_t> sorted_df(df.begin(), df.end());
  std::map<std::string, double> sorted_transfer(transfer_prob.begin(), transfer_prob.end());
  return json{{"n_docs", n_docs},
              {"mean_transfer_prob", mean_transfer_prob},
              {"df", sorted_df},
              {"transfer_prob", sorted_transfer}};
}

CorpusStats CorpusStats::from_json(const json& j) {
  try {
    CorpusStats s;
    s.n_docs = j.at("n_docs").get<std::size_t>();
    s.mean_transfer_prob = j.at("mean_transfer_prob").get<double>();
    s.df = j.at("df").get<std::unordered_map<std::string, std::size_t>>();
    s.transfer_prob = j.at("transfer_prob").get<std::unordered_map<std::string, double>>();
    return s;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad corpus stats: ") + e.what());
  }
}

void CorpusStats::save(const std::filesystem::path& path) const {
  write_file_atomic(path, to_json().dump(1) + "\n");
}

CorpusStats CorpusStats::load(const std::filesystem::path& path) {
  try {
    return from_json(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

std::set<std::string> stem_set(const AnnotatedDoc& doc) {
  std::set<std::string> out;
  for (const Token& t : doc.tokens) out.insert(t.stem);
  return out;
}

CorpusStats build_corpus_stats(std::span<const AnnotatedTriple> training) {
  if (training.empty()) throw EmptyCorpusError("cannot build corpus statistics from no triples");
  CorpusStats stats;
  stats.n_docs = 2 * training.size();
  std::unordered_map<std::string, std::size_t> seen;
  std::unordered_map<std::string, std::size_t> echoed;
  for (const AnnotatedTriple& t : training) {
    const std::set<std::string> op = stem_set(t.op);
    const std::set<std::string> pc = stem_set(t.pc);
    const std::set<std::string> exp = stem_set(t.explanation);
    for (const auto& s : op) ++stats.df[s];
    for (const auto& s : pc) ++stats.df[s];
    std::set<std::string> explanandum = op;
    explanandum.insert(pc.begin(), pc.end());
    for (const auto& s : explanandum) {
      ++seen[s];
      if (exp.count(s)) ++echoed[s];
    }
  }
  // Sum in sorted order so the mean does not depend on hash iteration order.
  std::map<std::string, std::size_t> ordered(seen.begin(), seen.end());
  double total = 0;
  for (const auto& [stem, n] : ordered) {
    auto it = echoed.find(stem);
    const double p = it == echoed.end() ? 0.0 : static_cast<double>(it->second) / n;
    stats.transfer_prob.emplace(stem, p);
    total += p;
  }
  stats.mean_transfer_prob = ordered.empty() ? 0.0 : total / static_cast<double>(ordered.size());
  return stats;
}

SideProfile::SideProfile() {
  pos_dist.fill(1.0 / kNumUpos);
  dep_dist.fill(1.0 / kNumDepRoles);
}

std::map<std::string, SideProfile> side_profiles(const AnnotatedDoc& doc) {
  struct Acc {
    std::array<double, kNumUpos> pos{};
    std::array<double, kNumDepRoles> dep{};
    double tf = 0;
    double after = 0;
    double quotes = 0;
    double entities = 0;
    std::set<std::string> forms;
  };
  std::map<std::string, Acc> acc;
  const double n = static_cast<double>(doc.length());
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& t = doc.tokens[i];
    Acc& a = acc[t.stem];
    a.pos[static_cast<std::size_t>(t.pos)] += 1;
    a.dep[static_cast<std::size_t>(t.dep)] += 1;
    a.tf += 1;
    a.after += (n - 1 - static_cast<double>(i)) / n;
    if (t.in_quotes) a.quotes += 1;
    if (t.is_entity) a.entities += 1;
    a.forms.insert(t.lower);
  }
  std::map<std::string, SideProfile> out;
  for (auto& [stem, a] : acc) {
    SideProfile p;
    for (std::size_t i = 0; i < kNumUpos; ++i) p.pos_dist[i] = a.pos[i] / a.tf;
    for (std::size_t i = 0; i < kNumDepRoles; ++i) p.dep_dist[i] = a.dep[i] / a.tf;
    p.tf = a.tf;
    p.ntf = a.tf / n;
    p.location = a.after / a.tf;
    p.in_quotes = a.quotes;
    p.entity_frac = a.entities / n;
    p.surface_forms = std::move(a.forms);
    out.emplace(stem, std::move(p));
  }
  return out;
}

SideProfile side_usage(std::string_view stem, const AnnotatedDoc& doc) {
  std::map<std::string, SideProfile> all = side_profiles(doc);
  auto it = all.find(std::string(stem));
  return it == all.end() ? SideProfile{} : std::move(it->second);
}

double js_divergence(std::span<const double> p, std::span<const double> q, bool distance) {
  if (p.size() != q.size()) throw std::invalid_argument("js_divergence: dimension mismatch");
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0) d += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0) d += 0.5 * q[i] * std::log2(q[i] / m);
  }
  d = std::clamp(d, 0.0, 1.0);
  return distance ? std::sqrt(d) : d;
}

RelationFeatures relation_features(const SideProfile& op, const SideProfile& pc, bool js_distance) {
  RelationFeatures r;
  r.in_both = op.present() && pc.present() ? 1.0 : 0.0;
  for (const auto& form : op.surface_forms) {
    if (!pc.surface_forms.count(form)) r.uniq_sf_op_only += 1;
  }
  for (const auto& form : pc.surface_forms) {
    if (!op.surface_forms.count(form)) r.uniq_sf_pc_only += 1;
  }
  r.js_pos = js_divergence(op.pos_dist, pc.pos_dist, js_distance);
  r.js_dep = js_divergence(op.dep_dist, pc.dep_dist, js_distance);
  return r;
}

std::array<double, kNumUpos> doc_pos_dist(const AnnotatedDoc& doc) {
  std::array<double, kNumUpos> dist{};
  if (doc.empty()) {
    dist.fill(1.0 / kNumUpos);
    return dist;
  }
  for (const Token& t : doc.tokens) dist[static_cast<std::size_t>(t.pos)] += 1;
  for (double& v : dist) v /= static_cast<double>(doc.length());
  return dist;
}

double mean_token_length(const AnnotatedDoc& doc) {
  if (doc.empty()) return 0.0;
  double chars = 0;
  for (const Token& t : doc.tokens) chars += static_cast<double>(utf8_length(t.surface));
  return chars / static_cast<double>(doc.length());
}

std::array<double, 6> pair_features(const AnnotatedDoc& op, const AnnotatedDoc& pc, int pc_depth,
                                    bool js_distance) {
  const double op_len = static_cast<double>(op.length());
  const double pc_len = static_cast<double>(pc.length());
  return {op_len,
          pc_len,
          std::abs(op_len - pc_len),
          mean_token_length(op) - mean_token_length(pc),
          js_divergence(doc_pos_dist(op), doc_pos_dist(pc), js_distance),
          static_cast<double>(pc_depth)};
}

std::vector<CandidateRow> featurize_triple(const AnnotatedTriple& triple, const CorpusStats& stats,
                                           const Taxonomy& taxonomy,
                                           const FeatureOptions& options) {
  const std::map<std::string, SideProfile> op = side_profiles(triple.op);
  const std::map<std::string, SideProfile> pc = side_profiles(triple.pc);
  const std::set<std::string> exp = stem_set(triple.explanation);
  const std::array<double, 6> general =
      pair_features(triple.op, triple.pc, triple.pc_depth, options.js_distance);

  std::set<std::string> candidates;
  for (const auto& [stem, p] : op) candidates.insert(stem);
  for (const auto& [stem, p] : pc) candidates.insert(stem);

  const SideProfile absent;
  std::vector<CandidateRow> rows;
  rows.reserve(candidates.size());
  for (const std::string& stem : candidates) {
    auto op_it = op.find(stem);
    auto pc_it = pc.find(stem);
    const SideProfile& op_p = op_it == op.end() ? absent : op_it->second;
    const SideProfile& pc_p = pc_it == pc.end() ? absent : pc_it->second;

    CandidateRow row;
    row.triple_id = triple.triple_id;
    row.stem = stem;
    row.label = exp.count(stem) ? 1 : 0;
    FeatureVector& f = row.features;
    const auto [dmin, dmax] = taxonomy.depths(stem);
    f[feat::kIdf] = stats.idf(stem);
    f[feat::kStemLength] = static_cast<double>(utf8_length(stem));
    f[feat::kWnDepthMin] = dmin;
    f[feat::kWnDepthMax] = dmax;
    f[feat::kTransferProb] = stats.transfer(stem);
    write_side(f, feat::kOpBase, op_p);
    write_side(f, feat::kPcBase, pc_p);
    const RelationFeatures r = relation_features(op_p, pc_p, options.js_distance);
    f[feat::kInBoth] = r.in_both;
    f[feat::kUniqSfOpOnly] = r.uniq_sf_op_only;
    f[feat::kUniqSfPcOnly] = r.uniq_sf_pc_only;
    f[feat::kJsPos] = r.js_pos;
    f[feat::kJsDep] = r.js_dep;
    std::copy(general.begin(), general.end(), f.begin() + feat::kOpLen);
    rows.push_back(std::move(row));
  }
  return rows;
}

FeaturizeResult featurize_triples(std::span<const AnnotatedTriple> triples,
                                  const CorpusStats& stats, const Taxonomy& taxonomy,
                                  const FeatureOptions& options) {
  FeaturizeResult result;
  for (const AnnotatedTriple& t : triples) {
    std::vector<CandidateRow> rows = featurize_triple(t, stats, taxonomy, options);
    if (rows.empty()) ++result.empty_triples;
    std::move(rows.begin(), rows.end(), std::back_inserter(result.rows));
  }
  return result;
}

MinMaxScaler::MinMaxScaler(std::vector<double> min, std::vector<double> max)
    : min_(std::move(min)), max_(std::move(max)) {
  if (min_.size() != max_.size()) throw std::invalid_argument("scaler bounds differ in length");
}

MinMaxScaler MinMaxScaler::fit(std::span<const CandidateRow> rows) {
  if (rows.empty()) throw std::invalid_argument("cannot fit a scaler on no rows");
  std::vector<double> lo(rows.front().features.begin(), rows.front().features.end());
  std::vector<double> hi = lo;
  for (const CandidateRow& r : rows) {
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      lo[i] = std::min(lo[i], r.features[i]);
      hi[i] = std::max(hi[i], r.features[i]);
    }
  }
  return MinMaxScaler(std::move(lo), std::move(hi));
}

double MinMaxScaler::transform(std::size_t feature, double value) const {
  const double range = max_[feature] - min_[feature];
  if (!(range > 0)) return 0.0;
  return std::clamp((value - min_[feature]) / range, 0.0, 1.0);
}

FeatureVector MinMaxScaler::transform(const FeatureVector& x) const {
  if (min_.size() != kNumFeatures) throw std::invalid_argument("scaler is not fitted");
  FeatureVector out;
  for (std::size_t i = 0; i < kNumFeatures; ++i) out[i] = transform(i, x[i]);
  return out;
}

json MinMaxScaler::to_json() const { return json{{"min", min_}, {"max", max_}}; }

MinMaxScaler MinMaxScaler::from_json(const json& j) {
  try {
    return MinMaxScaler(j.at("min").get<std::vector<double>>(),
                        j.at("max").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad scaler: ") + e.what());
  }
}

void write_feature_csv(const std::filesystem::path& path, std::span<const CandidateRow> rows) {
  std::string out = "triple_id,stem,label";
  for (const auto& name : feature_names()) {
    out.push_back(',');
    out += name;
  }
  out.push_back('\n');
  for (const CandidateRow& r : rows) {
    append_csv_field(out, r.triple_id);
    out.push_back(',');
    append_csv_field(out, r.stem);
    out.push_back(',');
    out += r.label ? '1' : '0';
    for (double v : r.features) {
      out.push_back(',');
      out += format_double(v);
    }
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

std::vector<CandidateRow> read_feature_csv(const std::filesystem::path& path) {
  std::vector<CandidateRow> rows;
  for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::vector<std::string> fields = split_csv(line);
    const std::string where = path.string() + ":" + std::to_string(number) + ": ";
    if (fields.size() != kNumFeatures + 3) {
      throw SchemaError(where + "expected " + std::to_string(kNumFeatures + 3) + " columns, got " +
                        std::to_string(fields.size()));
    }
    if (number == 1) {
      bool ok = fields[0] == "triple_id" && fields[1] == "stem" && fields[2] == "label";
      for (std::size_t i = 0; ok && i < kNumFeatures; ++i) ok = fields[i + 3] == feature_names()[i];
      if (!ok) throw SchemaError(where + "unexpected feature CSV header");
      return;
    }
    CandidateRow row;
    row.triple_id = fields[0];
    row.stem = fields[1];
    if (fields[2] != "0" && fields[2] != "1") throw SchemaError(where + "label must be 0 or 1");
    row.label = fields[2] == "1" ? 1 : 0;
    for (std::size_t i = 0; i < kNumFeatures; ++i) row.features[i] = parse_double(fields[i + 3]);
    rows.push_back(std::move(row));
  });
  return rows;
}

}  // namespace echotrace
