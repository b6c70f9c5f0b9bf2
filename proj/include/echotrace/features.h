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

#ifndef ECHOTRACE_FEATURES_H_
#define ECHOTRACE_FEATURES_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "echotrace/annotate.h"
#include "echotrace/document.h"

namespace echotrace {

inline constexpr std::size_t kNumFeatures = 66;
using FeatureVector = std::array<double, kNumFeatures>;

// Zero-based positions of the per-stem features.
namespace feat {
inline constexpr std::size_t kIdf = 0;
inline constexpr std::size_t kStemLength = 1;
inline constexpr std::size_t kWnDepthMin = 2;
inline constexpr std::size_t kWnDepthMax = 3;
inline constexpr std::size_t kTransferProb = 4;
// Start of the OP and PC usage blocks; offsets within a block follow.
inline constexpr std::size_t kOpBase = 5;
inline constexpr std::size_t kPcBase = 30;
inline constexpr std::size_t kPos = 0;  // 16 entries in Upos order
inline constexpr std::size_t kDep = 16;  // subject, object, other
inline constexpr std::size_t kTf = 19;
inline constexpr std::size_t kNtf = 20;
inline constexpr std::size_t kSurfaceForms = 21;
inline constexpr std::size_t kLocation = 22;
inline constexpr std::size_t kInQuotes = 23;
inline constexpr std::size_t kEntityFrac = 24;
inline constexpr std::size_t kSideWidth = 25;
inline constexpr std::size_t kInBoth = 55;
inline constexpr std::size_t kUniqSfOpOnly = 56;
inline constexpr std::size_t kUniqSfPcOnly = 57;
inline constexpr std::size_t kJsPos = 58;
inline constexpr std::size_t kJsDep = 59;
inline constexpr std::size_t kOpLen = 60;
inline constexpr std::size_t kPcLen = 61;
inline constexpr std::size_t kAbsLenDiff = 62;
inline constexpr std::size_t kAvgWordLenDiff = 63;
inline constexpr std::size_t kJsPosDocs = 64;
inline constexpr std::size_t kPcDepth = 65;
}  // namespace feat

// Machine names used as CSV columns, e.g. "op_pos_noun".
const std::array<std::string, kNumFeatures>& feature_names();
// Human-readable row labels, e.g. "OP NOUN".
const std::array<std::string, kNumFeatures>& feature_labels();

enum class FeatureGroup { kNonContextual, kOpUsage, kPcUsage, kRelation, kGeneral };

const std::array<FeatureGroup, 5>& all_feature_groups();
std::string_view group_name(FeatureGroup group);
// Throws std::invalid_argument for an unknown name.
FeatureGroup parse_feature_group(std::string_view name);
std::vector<std::size_t> group_indices(FeatureGroup group);

// Hypernym path lengths keyed by the stem of each lemma. Several lemmas can
// share a stem; the lookup returns the min of their minimum depths and the max
// of their maximum depths.
class Taxonomy {
 public:
  // TSV lines "lemma<TAB>min_depth<TAB>max_depth".
  static Taxonomy load(const std::filesystem::path& path);
  static const Taxonomy& standard();

  void add(std::string_view lemma, int min_depth, int max_depth);
  // (0, 0) for stems with no entry.
  std::pair<int, int> depths(std::string_view stem) const;
  std::size_t size() const { return depths_.size(); }

 private:
  std::unordered_map<std::string, std::pair<int, int>> depths_;
};

struct CorpusStats {
  std::size_t n_docs = 0;
  std::unordered_map<std::string, std::size_t> df;
  std::unordered_map<std::string, double> transfer_prob;
  double mean_transfer_prob = 0.0;

  // ln(N / df), with df = 1 for unseen stems.
  double idf(std::string_view stem) const;
  std::size_t doc_freq(std::string_view stem) const;
  double transfer(std::string_view stem) const;

  nlohmann::json to_json() const;
  static CorpusStats from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static CorpusStats load(const std::filesystem::path& path);
};

// Distinct stems of a document.
std::set<std::string> stem_set(const AnnotatedDoc& doc);

// Counts each training OP and PC as one document. Throws EmptyCorpusError on
// an empty training set.
CorpusStats build_corpus_stats(std::span<const AnnotatedTriple> training);

// Usage of one stem on one side (OP or PC).
struct SideProfile {
  std::array<double, kNumUpos> pos_dist;
  std::array<double, kNumDepRoles> dep_dist;
  double tf = 0;
  double ntf = 0;
  double location = 0.5;
  double in_quotes = 0;
  double entity_frac = 0;
  std::set<std::string> surface_forms;  // lowercased

  SideProfile();
  bool present() const { return tf > 0; }
};

// Profiles for every stem in the document, computed in one pass.
std::map<std::string, SideProfile> side_profiles(const AnnotatedDoc& doc);
// Profile of a single stem; absent stems get the defaults.
SideProfile side_usage(std::string_view stem, const AnnotatedDoc& doc);

// Base-2 Jensen-Shannon divergence, or its square root when `distance` is set.
// Throws std::invalid_argument when the lengths differ.
double js_divergence(std::span<const double> p, std::span<const double> q, bool distance = false);

struct RelationFeatures {
  double in_both = 0;
  double uniq_sf_op_only = 0;
  double uniq_sf_pc_only = 0;
  double js_pos = 0;
  double js_dep = 0;
};

RelationFeatures relation_features(const SideProfile& op, const SideProfile& pc,
                                   bool js_distance = false);

// POS tag distribution over a whole document; uniform when empty.
std::array<double, kNumUpos> doc_pos_dist(const AnnotatedDoc& doc);
// Mean code points per token; 0 when empty.
double mean_token_length(const AnnotatedDoc& doc);

// op_len, pc_len, abs_len_diff, avg_word_len_diff, js_pos_docs, pc_depth.
std::array<double, 6> pair_features(const AnnotatedDoc& op, const AnnotatedDoc& pc, int pc_depth,
                                    bool js_distance = false);

struct CandidateRow {
  std::string triple_id;
  std::string stem;
  FeatureVector features{};
  int label = 0;
};

struct FeatureOptions {
  // Use the square root of the JS divergence.
  bool js_distance = false;
};

// One row per stem of the OP and PC, ordered by stem. Label 1 iff the stem
// occurs in the explanation.
std::vector<CandidateRow> featurize_triple(const AnnotatedTriple& triple, const CorpusStats& stats,
                                           const Taxonomy& taxonomy,
                                           const FeatureOptions& options = {});

struct FeaturizeResult {
  std::vector<CandidateRow> rows;
  std::size_t empty_triples = 0;
};

FeaturizeResult featurize_triples(std::span<const AnnotatedTriple> triples,
                                  const CorpusStats& stats, const Taxonomy& taxonomy,
                                  const FeatureOptions& options = {});

class MinMaxScaler {
 public:
  MinMaxScaler() = default;
  MinMaxScaler(std::vector<double> min, std::vector<double> max);

  // Throws std::invalid_argument on an empty set.
  static MinMaxScaler fit(std::span<const CandidateRow> rows);

  // Constant columns map to 0; everything is clipped into [0, 1].
  double transform(std::size_t feature, double value) const;
  FeatureVector transform(const FeatureVector& x) const;

  const std::vector<double>& min() const { return min_; }
  const std::vector<double>& max() const { return max_; }

  nlohmann::json to_json() const;
  static MinMaxScaler from_json(const nlohmann::json& j);

 private:
  std::vector<double> min_;
  std::vector<double> max_;
};

// Header: triple_id,stem,label,<66 feature names>.
void write_feature_csv(const std::filesystem::path& path, std::span<const CandidateRow> rows);
std::vector<CandidateRow> read_feature_csv(const std::filesystem::path& path);

}  // namespace echotrace

#endif  // ECHOTRACE_FEATURES_H_
