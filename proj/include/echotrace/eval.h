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

#ifndef ECHOTRACE_EVAL_H_
#define ECHOTRACE_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "echotrace/annotate.h"
#include "echotrace/features.h"
#include "echotrace/learn.h"
#include "echotrace/metrics.h"

namespace echotrace {

// F1 over a subset of rows; `f1` is empty when the subset is.
struct SubsetScore {
  std::optional<double> f1;
  Confusion confusion;
  std::size_t size() const { return confusion.total(); }
};

nlohmann::json to_json(const SubsetScore& s);

// Scores the rows i with mask[i] set (or all rows when mask is empty).
SubsetScore score_subset(std::span<const int> preds, std::span<const int> labels,
                         const std::vector<bool>& mask = {});

enum class WordSource { kOpOnly, kPcOnly, kBoth };
std::string_view source_name(WordSource s);

// From the raw side term frequencies of a row.
WordSource word_source(const CandidateRow& row);

// Most frequent POS of the stem across its OP and PC occurrences, recovered
// from the raw features. Ties go to the alphabetically first tag name.
Upos modal_pos(const CandidateRow& row);

bool is_stopword_row(const CandidateRow& row);

struct PosScore {
  SubsetScore content;
  SubsetScore all;
  SubsetScore random_content;
};

struct EvalReport {
  SubsetScore all;
  SubsetScore content;
  SubsetScore stop;
  SubsetScore random_all;
  SubsetScore random_content;
  SubsetScore random_stop;
  // Keyed by "noun", "adverb", "verb", "proper noun", "adjective".
  std::map<std::string, PosScore> pos;
  std::map<std::string, SubsetScore> source;
  std::map<std::string, SubsetScore> random_source;

  nlohmann::json to_json() const;
};

// The POS tags reported in the breakdown, paired with their report keys.
const std::vector<std::pair<Upos, std::string>>& breakdown_tags();

EvalReport evaluate(std::span<const int> preds, std::span<const int> random_preds,
                    std::span<const CandidateRow> rows);
// Random predictions are Bernoulli(random_p) seeded with `seed`.
EvalReport evaluate(const TrainedModel& model, std::span<const CandidateRow> rows,
                    std::uint64_t seed, double random_p = 0.15);

// Features left when using only `groups` (forward) or removing them (backward).
std::vector<std::size_t> forward_features(std::span<const FeatureGroup> groups);
std::vector<std::size_t> backward_features(std::span<const FeatureGroup> groups);

struct AblationEntry {
  std::string group;
  SubsetScore forward_content;
  SubsetScore forward_stop;
  SubsetScore backward_content;
  SubsetScore backward_stop;
};

struct AblationTable {
  SubsetScore full_content;
  SubsetScore full_stop;
  std::vector<AblationEntry> entries;

  nlohmann::json to_json() const;
};

// Retunes on validation F1 over all words for every variant, then scores the
// test rows. Throws std::invalid_argument for an unknown group name.
AblationTable ablation(ModelKind kind, std::span<const CandidateRow> train,
                       std::span<const CandidateRow> validation,
                       std::span<const CandidateRow> test, const GridSpec& grid,
                       std::span<const std::string> groups, double threshold = 0.5);

struct DfLabel {
  std::size_t df = 0;
  int label = 0;
};

struct DecileBin {
  std::size_t df_min = 0;
  std::size_t df_max = 0;
  std::size_t count = 0;
  std::size_t echoed = 0;
  double probability = 0.0;
  double std_error = 0.0;  // binomial sqrt(p(1-p)/n)
};

struct DecileCurve {
  std::vector<DecileBin> bins;
  double global_rate = 0.0;
  std::size_t total = 0;
  std::vector<std::string> warnings;
};

// Buckets candidates into ten document-frequency deciles. Candidates sharing a
// df value always land in the same bucket, so buckets can be fewer than ten.
DecileCurve echo_prob_by_df_decile(std::vector<DfLabel> items);

// Candidate stems with their training df and echo labels.
std::vector<DfLabel> df_labels(std::span<const CandidateRow> rows, const CorpusStats& stats);
// PC stems labeled by whether they occur in the OP.
std::vector<DfLabel> pc_from_op_labels(std::span<const AnnotatedTriple> triples,
                                       const CorpusStats& stats);

void write_decile_csv(const std::filesystem::path& path, const DecileCurve& curve);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// nullopt when either group has fewer than two values or both variances are 0.
std::optional<WelchResult> welch_t_test(std::span<const double> a, std::span<const double> b);

// "↑" or "↓" repeated 4/3/2/1 times for p < 0.0001/0.001/0.01/0.05; empty
// otherwise.
std::string significance_arrows(double corrected_p, double mean_diff);

enum class Population { kAll, kContent, kStop };
std::string_view population_name(Population p);

struct SignificanceRow {
  std::size_t feature = 0;
  Population population = Population::kAll;
  std::size_t n_echoed = 0;
  std::size_t n_not = 0;
  double mean_echoed = 0.0;
  double mean_not = 0.0;
  bool skipped = false;
  double t = 0.0;
  double raw_p = 1.0;
  double corrected_p = 1.0;
  std::string arrows;
};

// Welch test per feature and population; p-values are multiplied by
// `comparisons` (capped at 1). Populations with fewer than two rows per class
// are reported as skipped.
std::vector<SignificanceRow> significance_tests(std::span<const CandidateRow> rows,
                                                std::size_t comparisons = kNumFeatures);

void write_significance_csv(const std::filesystem::path& path,
                            std::span<const SignificanceRow> rows);

struct EchoFraction {
  std::optional<double> mean;
  double std_error = 0.0;
  std::size_t triples = 0;
};

struct Descriptives {
  std::size_t triples = 0;
  // Pearson correlations of token lengths; absent under zero variance.
  std::optional<double> corr_op_pc;
  std::optional<double> corr_op_exp;
  std::optional<double> corr_pc_exp;
  // Per-triple fraction of explanation stems found in OP or PC, and of PC
  // stems found in the OP, with variants ignoring quoted tokens and
  // restricted to content stems.
  EchoFraction exp_from_explanandum;
  EchoFraction pc_from_op;
  EchoFraction exp_from_explanandum_unquoted;
  EchoFraction pc_from_op_unquoted;
  EchoFraction exp_from_explanandum_content;
  EchoFraction pc_from_op_content;
  // Mean sentences (sentence-final punctuation runs) and words per document.
  double op_sentences = 0, pc_sentences = 0, exp_sentences = 0;
  double op_words = 0, pc_words = 0, exp_words = 0;

  nlohmann::json to_json() const;
};

std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

// Sentences approximated by runs of ".", "!" or "?" tokens; a non-empty doc
// without one counts as one sentence.
std::size_t count_sentences(const AnnotatedDoc& doc);

Descriptives corpus_descriptives(std::span<const AnnotatedTriple> triples);

}  // namespace echotrace

#endif  // ECHOTRACE_EVAL_H_
