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

#include "echotrace/eval.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "echotrace/io.h"
#include "echotrace/stopwords.h"

namespace echotrace {
namespace {

using nlohmann::json;

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

double side_tf(const CandidateRow& row, std::size_t base) { return row.features[base + feat::kTf]; }

bool sentence_final(std::string_view token) {
  return !token.empty() && token.find_first_not_of(".!?") == std::string_view::npos;
}

struct MeanSe {
  double sum = 0;
  double sum_sq = 0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  EchoFraction result() const {
    EchoFraction f;
    f.triples = n;
    if (n == 0) return f;
    const double mean = sum / n;
    f.mean = mean;
    if (n > 1) {
      const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
      f.std_error = std::sqrt(var / n);
    }
    return f;
  }
};

json echo_json(const EchoFraction& f) {
  return json{{"mean", optional_json(f.mean)}, {"std_error", f.std_error}, {"triples", f.triples}};
}

// Stem set of a doc, optionally skipping quoted tokens and stopwords.
std::set<std::string> stems(const AnnotatedDoc& doc, bool skip_quoted, bool content_only) {
  std::set<std::string> out;
  for (const Token& t : doc.tokens) {
    if (skip_quoted && t.in_quotes) continue;
    if (content_only && is_stopword(t.stem)) continue;
    out.insert(t.stem);
  }
  return out;
}

// Fraction of `target` found in either source set; nullopt when target is empty.
std::optional<double> covered(const std::set<std::string>& target, const std::set<std::string>& a,
                              const std::set<std::string>* b) {
  if (target.empty()) return std::nullopt;
  std::size_t hit = 0;
  for (const auto& s : target) {
    if (a.count(s) || (b && b->count(s))) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(target.size());
}

}  // namespace

json to_json(const SubsetScore& s) {
  return json{{"f1", optional_json(s.f1)},
              {"n", s.size()},
              {"tp", s.confusion.tp},
              {"fp", s.confusion.fp},
              {"fn", s.confusion.fn}};
}

SubsetScore score_subset(std::span<const int> preds, std::span<const int> labels,
                         const std::vector<bool>& mask) {
  if (preds.size() != labels.size()) throw std::invalid_argument("score_subset: length mismatch");
  if (!mask.empty() && mask.size() != preds.size()) {
    throw std::invalid_argument("score_subset: mask length mismatch");
  }
  SubsetScore s;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    s.confusion += confusion(preds.subspan(i, 1), labels.subspan(i, 1));
  }
  if (s.size() > 0) s.f1 = s.confusion.f1();
  return s;
}

std::string_view source_name(WordSource s) {
  switch (s) {
    case WordSource::kOpOnly:
      return "op_only";
    case WordSource::kPcOnly:
      return "pc_only";
    case WordSource::kBoth:
      return "both";
  }
  return "";
}

WordSource word_source(const CandidateRow& row) {
  if (row.features[feat::kInBoth] > 0.5) return WordSource::kBoth;
  return side_tf(row, feat::kOpBase) > 0 ? WordSource::kOpOnly : WordSource::kPcOnly;
}

Upos modal_pos(const CandidateRow& row) {
  const double op_tf = side_tf(row, feat::kOpBase);
  const double pc_tf = side_tf(row, feat::kPcBase);
  std::optional<Upos> best;
  double best_count = -1;
  for (Upos tag : all_upos()) {
    const std::size_t k = static_cast<std::size_t>(tag);
    // Frequencies are integers times exact fractions; round away float noise.
    const double count = std::round(op_tf * row.features[feat::kOpBase + feat::kPos + k] +
                                    pc_tf * row.features[feat::kPcBase + feat::kPos + k]);
    if (count > best_count || (count == best_count && upos_name(tag) < upos_name(*best))) {
      best = tag;
      best_count = count;
    }
  }
  return *best;
}

bool is_stopword_row(const CandidateRow& row) { return is_stopword(row.stem); }

const std::vector<std::pair<Upos, std::string>>& breakdown_tags() {
  static const std::vector<std::pair<Upos, std::string>> tags = {
      {Upos::kNoun, "noun"},
      {Upos::kAdv, "adverb"},
      {Upos::kVerb, "verb"},
      {Upos::kPropn, "proper noun"},
      {Upos::kAdj, "adjective"}};
  return tags;
}

json EvalReport::to_json() const {
  json pos_json = json::object();
  for (const auto& [name, s] : pos) {
    pos_json[name] = {{"content", echotrace::to_json(s.content)},
                      {"all", echotrace::to_json(s.all)},
                      {"random_content", echotrace::to_json(s.random_content)}};
  }
  json src = json::object();
  for (const auto& [name, s] : source) src[name] = echotrace::to_json(s);
  json rsrc = json::object();
  for (const auto& [name, s] : random_source) rsrc[name] = echotrace::to_json(s);
  return json{{"all", echotrace::to_json(all)},
              {"content", echotrace::to_json(content)},
              {"stop", echotrace::to_json(stop)},
              {"random",
               {{"all", echotrace::to_json(random_all)},
                {"content", echotrace::to_json(random_content)},
                {"stop", echotrace::to_json(random_stop)}}},
              {"pos_breakdown", std::move(pos_json)},
              {"source_breakdown", std::move(src)},
              {"random_source_breakdown", std::move(rsrc)}};
}

EvalReport evaluate(std::span<const int> preds, std::span<const int> random_preds,
                    std::span<const CandidateRow> rows) {
  if (preds.size() != rows.size() || random_preds.size() != rows.size()) {
    throw std::invalid_argument("evaluate: prediction count differs from row count");
  }
  const std::vector<int> y = labels_of(rows);
  const std::size_t n = rows.size();
  std::vector<bool> stop(n);
  std::vector<bool> content(n);
  for (std::size_t i = 0; i < n; ++i) {
    stop[i] = is_stopword_row(rows[i]);
    content[i] = !stop[i];
  }
  EvalReport r;
  r.all = score_subset(preds, y);
  r.content = score_subset(preds, y, content);
  r.stop = score_subset(preds, y, stop);
  r.random_all = score_subset(random_preds, y);
  r.random_content = score_subset(random_preds, y, content);
  r.random_stop = score_subset(random_preds, y, stop);

  std::vector<Upos> modal(n);
  for (std::size_t i = 0; i < n; ++i) modal[i] = modal_pos(rows[i]);
  for (const auto& [tag, name] : breakdown_tags()) {
    std::vector<bool> in_tag(n);
    std::vector<bool> in_tag_content(n);
    for (std::size_t i = 0; i < n; ++i) {
      in_tag[i] = modal[i] == tag;
      in_tag_content[i] = in_tag[i] && content[i];
    }
    r.pos[name] = PosScore{score_subset(preds, y, in_tag_content), score_subset(preds, y, in_tag),
                           score_subset(random_preds, y, in_tag_content)};
  }
  for (WordSource s : {WordSource::kOpOnly, WordSource::kPcOnly, WordSource::kBoth}) {
    std::vector<bool> mask(n);
    for (std::size_t i = 0; i < n; ++i) mask[i] = word_source(rows[i]) == s;
    r.source[std::string(source_name(s))] = score_subset(preds, y, mask);
    r.random_source[std::string(source_name(s))] = score_subset(random_preds, y, mask);
  }
  return r;
}

EvalReport evaluate(const TrainedModel& model, std::span<const CandidateRow> rows,
                    std::uint64_t seed, double random_p) {
  return evaluate(model.predict(rows), random_baseline(rows.size(), random_p, seed), rows);
}

std::vector<std::size_t> forward_features(std::span<const FeatureGroup> groups) {
  std::set<std::size_t> keep;
  for (FeatureGroup g : groups) {
    for (std::size_t i : group_indices(g)) keep.insert(i);
  }
  return {keep.begin(), keep.end()};
}

std::vector<std::size_t> backward_features(std::span<const FeatureGroup> groups) {
  std::set<std::size_t> drop;
  for (FeatureGroup g : groups) {
    for (std::size_t i : group_indices(g)) drop.insert(i);
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (!drop.count(i)) keep.push_back(i);
  }
  return keep;
}

json AblationTable::to_json() const {
  json entries_json = json::array();
  for (const AblationEntry& e : entries) {
    entries_json.push_back({{"group", e.group},
                            {"forward_content", echotrace::to_json(e.forward_content)},
                            {"forward_stop", echotrace::to_json(e.forward_stop)},
                            {"backward_content", echotrace::to_json(e.backward_content)},
                            {"backward_stop", echotrace::to_json(e.backward_stop)}});
  }
  return json{{"full_content", echotrace::to_json(full_content)},
              {"full_stop", echotrace::to_json(full_stop)},
              {"groups", std::move(entries_json)}};
}

AblationTable ablation(ModelKind kind, std::span<const CandidateRow> train,
                       std::span<const CandidateRow> validation,
                       std::span<const CandidateRow> test, const GridSpec& grid,
                       std::span<const std::string> groups, double threshold) {
  std::vector<FeatureGroup> parsed;
  for (const std::string& name : groups) parsed.push_back(parse_feature_group(name));

  const std::vector<int> y = labels_of(test);
  std::vector<bool> stop(test.size());
  std::vector<bool> content(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    stop[i] = is_stopword_row(test[i]);
    content[i] = !stop[i];
  }
  auto run = [&](const std::vector<std::size_t>& features) {
    const GridResult g = grid_search(kind, train, validation, grid, features, threshold);
    const std::vector<int> preds = g.model.predict(test);
    return std::pair{score_subset(preds, y, content), score_subset(preds, y, stop)};
  };

  AblationTable table;
  std::tie(table.full_content, table.full_stop) = run(all_feature_indices());
  for (FeatureGroup g : parsed) {
    AblationEntry e;
    e.group = std::string(group_name(g));
    const std::array<FeatureGroup, 1> one = {g};
    std::tie(e.forward_content, e.forward_stop) = run(forward_features(one));
    std::tie(e.backward_content, e.backward_stop) = run(backward_features(one));
    table.entries.push_back(std::move(e));
  }
  return table;
}

DecileCurve echo_prob_by_df_decile(std::vector<DfLabel> items) {
  DecileCurve curve;
  curve.total = items.size();
  if (items.empty()) {
    curve.warnings.push_back("no candidates");
    return curve;
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const DfLabel& a, const DfLabel& b) { return a.df < b.df; });
  const std::size_t n = items.size();
  std::size_t echoed_total = 0;
  std::vector<DecileBin> bins(10);
  std::vector<bool> used(10, false);
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && items[end].df == items[start].df) ++end;
    // A tie group goes wholly to the decile holding its first member.
    const std::size_t b = std::min<std::size_t>(9, 10 * start / n);
    DecileBin& bin = bins[b];
    if (!used[b]) bin.df_min = items[start].df;
    used[b] = true;
    bin.df_max = items[start].df;
    for (std::size_t i = start; i < end; ++i) {
      ++bin.count;
      if (items[i].label) ++bin.echoed;
    }
    start = end;
  }
  for (std::size_t b = 0; b < 10; ++b) {
    if (!used[b]) continue;
    DecileBin bin = bins[b];
    bin.probability = static_cast<double>(bin.echoed) / static_cast<double>(bin.count);
    bin.std_error = std::sqrt(bin.probability * (1 - bin.probability) / bin.count);
    echoed_total += bin.echoed;
    curve.bins.push_back(bin);
  }
  curve.global_rate = static_cast<double>(echoed_total) / static_cast<double>(n);
  if (curve.bins.size() < 10) {
    curve.warnings.push_back("document-frequency ties merged deciles into " +
                             std::to_string(curve.bins.size()) + " buckets");
  }
  return curve;
}

std::vector<DfLabel> df_labels(std::span<const CandidateRow> rows, const CorpusStats& stats) {
  std::vector<DfLabel> out;
  out.reserve(rows.size());
  for (const CandidateRow& r : rows) out.push_back({stats.doc_freq(r.stem), r.label});
  return out;
}

std::vector<DfLabel> pc_from_op_labels(std::span<const AnnotatedTriple> triples,
                                       const CorpusStats& stats) {
  std::vector<DfLabel> out;
  for (const AnnotatedTriple& t : triples) {
    const std::set<std::string> op = stem_set(t.op);
    for (const std::string& s : stem_set(t.pc)) {
      out.push_back({stats.doc_freq(s), op.count(s) ? 1 : 0});
    }
  }
  return out;
}

void write_decile_csv(const std::filesystem::path& path, const DecileCurve& curve) {
  std::string out = "bucket,df_min,df_max,count,echoed,probability,std_error\n";
  for (std::size_t i = 0; i < curve.bins.size(); ++i) {
    const DecileBin& b = curve.bins[i];
    out += std::to_string(i) + "," + std::to_string(b.df_min) + "," + std::to_string(b.df_max) +
           "," + std::to_string(b.count) + "," + std::to_string(b.echoed) + "," +
           format_double(b.probability) + "," + format_double(b.std_error) + "\n";
  }
  write_file_atomic(path, out);
}

std::optional<WelchResult> welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) return std::nullopt;
  auto moments = [](std::span<const double> v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, ss / (n - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double sa = va / static_cast<double>(a.size());
  const double sb = vb / static_cast<double>(b.size());
  const double se2 = sa + sb;
  if (!(se2 > 0)) return std::nullopt;
  WelchResult r;
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 /
         (sa * sa / static_cast<double>(a.size() - 1) + sb * sb / static_cast<double>(b.size() - 1));
  const boost::math::students_t dist(r.df);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  return r;
}

std::string significance_arrows(double corrected_p, double mean_diff) {
  int count = 0;
  if (corrected_p < 0.0001) {
    count = 4;
  } else if (corrected_p < 0.001) {
    count = 3;
  } else if (corrected_p < 0.01) {
    count = 2;
  } else if (corrected_p < 0.05) {
    count = 1;
  }
  if (mean_diff == 0) count = 0;
  std::string out;
  for (int i = 0; i < count; ++i) out += mean_diff > 0 ? "\xE2\x86\x91" : "\xE2\x86\x93";
  return out;
}

std::string_view population_name(Population p) {
  switch (p) {
    case Population::kAll:
      return "all";
    case Population::kContent:
      return "content";
    case Population::kStop:
      return "stop";
  }
  return "";
}

std::vector<SignificanceRow> significance_tests(std::span<const CandidateRow> rows,
                                                std::size_t comparisons) {
  std::vector<SignificanceRow> out;
  for (Population pop : {Population::kAll, Population::kContent, Population::kStop}) {
    std::vector<const CandidateRow*> echoed;
    std::vector<const CandidateRow*> not_echoed;
    for (const CandidateRow& r : rows) {
      if (pop != Population::kAll && is_stopword_row(r) != (pop == Population::kStop)) continue;
      (r.label ? echoed : not_echoed).push_back(&r);
    }
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      std::vector<double> a;
      std::vector<double> b;
      for (const CandidateRow* r : echoed) a.push_back(r->features[f]);
      for (const CandidateRow* r : not_echoed) b.push_back(r->features[f]);
      SignificanceRow row;
      row.feature = f;
      row.population = pop;
      row.n_echoed = a.size();
      row.n_not = b.size();
      if (!a.empty()) row.mean_echoed = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
      if (!b.empty()) row.mean_not = std::accumulate(b.begin(), b.end(), 0.0) / b.size();
      const std::optional<WelchResult> w = welch_t_test(a, b);
      if (!w) {
        row.skipped = true;
      } else {
        row.t = w->t;
        row.raw_p = w->p;
        row.corrected_p = std::min(1.0, w->p * static_cast<double>(comparisons));
        row.arrows = significance_arrows(row.corrected_p, row.mean_echoed - row.mean_not);
      }
      out.push_back(std::move(row));
    }
  }
  return out;
}

void write_significance_csv(const std::filesystem::path& path,
                            std::span<const SignificanceRow> rows) {
  std::string out =
      "feature,label,population,n_echoed,n_not,mean_echoed,mean_not,t,raw_p,corrected_p,"
      "arrows,skipped\n";
  for (const SignificanceRow& r : rows) {
    std::string label = feature_labels()[r.feature];
    if (label.find(',') != std::string::npos) label = "\"" + label + "\"";
    out += feature_names()[r.feature] + "," + label + "," +
           std::string(population_name(r.population)) + "," + std::to_string(r.n_echoed) + "," +
           std::to_string(r.n_not) + "," + format_double(r.mean_echoed) + "," +
           format_double(r.mean_not) + ",";
    if (r.skipped) {
      out += ",,,,1\n";
    } else {
      out += format_double(r.t) + "," + format_double(r.raw_p) + "," +
             format_double(r.corrected_p) + "," + r.arrows + ",0\n";
    }
  }
  write_file_atomic(path, out);
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson: length mismatch");
  if (a.size() < 2) return std::nullopt;
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0) || !(sbb > 0)) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::size_t count_sentences(const AnnotatedDoc& doc) {
  std::size_t count = 0;
  bool open = false;  // words seen since the last terminator
  for (const Token& t : doc.tokens) {
    if (sentence_final(t.surface)) {
      if (open) ++count;
      open = false;
    } else {
      open = true;
    }
  }
  if (open) ++count;
  return count;
}

json Descriptives::to_json() const {
  return json{
      {"triples", triples},
      {"length_correlation",
       {{"op_pc", optional_json(corr_op_pc)},
        {"op_exp", optional_json(corr_op_exp)},
        {"pc_exp", optional_json(corr_pc_exp)}}},
      {"echo_fraction",
       {{"exp_from_op_pc", echo_json(exp_from_explanandum)},
        {"pc_from_op", echo_json(pc_from_op)},
        {"exp_from_op_pc_unquoted", echo_json(exp_from_explanandum_unquoted)},
        {"pc_from_op_unquoted", echo_json(pc_from_op_unquoted)},
        {"exp_from_op_pc_content", echo_json(exp_from_explanandum_content)},
        {"pc_from_op_content", echo_json(pc_from_op_content)}}},
      {"mean_sentences", {{"op", op_sentences}, {"pc", pc_sentences}, {"exp", exp_sentences}}},
      {"mean_words", {{"op", op_words}, {"pc", pc_words}, {"exp", exp_words}}}};
}

Descriptives corpus_descriptives(std::span<const AnnotatedTriple> triples) {
  Descriptives d;
  d.triples = triples.size();
  std::vector<double> op_len, pc_len, exp_len;
  MeanSe exp_all, pc_all, exp_unq, pc_unq, exp_content, pc_content;
  double op_sent = 0, pc_sent = 0, exp_sent = 0;
  for (const AnnotatedTriple& t : triples) {
    op_len.push_back(static_cast<double>(t.op.length()));
    pc_len.push_back(static_cast<double>(t.pc.length()));
    exp_len.push_back(static_cast<double>(t.explanation.length()));
    op_sent += static_cast<double>(count_sentences(t.op));
    pc_sent += static_cast<double>(count_sentences(t.pc));
    exp_sent += static_cast<double>(count_sentences(t.explanation));

    struct Variant {
      bool skip_quoted;
      bool content_only;
      MeanSe* exp;
      MeanSe* pc;
    };
    for (const Variant& v : {Variant{false, false, &exp_all, &pc_all},
                             Variant{true, false, &exp_unq, &pc_unq},
                             Variant{false, true, &exp_content, &pc_content}}) {
      const auto op = stems(t.op, v.skip_quoted, v.content_only);
      const auto pc = stems(t.pc, v.skip_quoted, v.content_only);
      const auto exp = stems(t.explanation, v.skip_quoted, v.content_only);
      if (auto f = covered(exp, op, &pc)) v.exp->add(*f);
      if (auto f = covered(pc, op, nullptr)) v.pc->add(*f);
    }
  }
  d.corr_op_pc = pearson(op_len, pc_len);
  d.corr_op_exp = pearson(op_len, exp_len);
  d.corr_pc_exp = pearson(pc_len, exp_len);
  d.exp_from_explanandum = exp_all.result();
  d.pc_from_op = pc_all.result();
  d.exp_from_explanandum_unquoted = exp_unq.result();
  d.pc_from_op_unquoted = pc_unq.result();
  d.exp_from_explanandum_content = exp_content.result();
  d.pc_from_op_content = pc_content.result();
  if (!triples.empty()) {
    const double n = static_cast<double>(triples.size());
    d.op_sentences = op_sent / n;
    d.pc_sentences = pc_sent / n;
    d.exp_sentences = exp_sent / n;
    d.op_words = std::accumulate(op_len.begin(), op_len.end(), 0.0) / n;
    d.pc_words = std::accumulate(pc_len.begin(), pc_len.end(), 0.0) / n;
    d.exp_words = std::accumulate(exp_len.begin(), exp_len.end(), 0.0) / n;
  }
  return d;
}

}  // namespace echotrace
