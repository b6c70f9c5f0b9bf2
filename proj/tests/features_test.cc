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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "echotrace/error.h"
#include "echotrace/features.h"
#include "echotrace/stopwords.h"
#include "test_support.h"

namespace echotrace {
namespace {

using testing::make_doc;
using testing::words;

TEST(Oracle, AllFeaturesMatchBruteForce) {
  const testing::OracleCheck check = testing::check_against_oracle(1e-9);
  EXPECT_EQ(check.triples, 20u);
  EXPECT_GT(check.rows, 200u);
  for (const auto& m : check.mismatches) ADD_FAILURE() << m;
  EXPECT_EQ(check.mismatch_count, 0u);
}

TEST(Names, SixtySixDistinct) {
  std::set<std::string> names(feature_names().begin(), feature_names().end());
  EXPECT_EQ(names.size(), kNumFeatures);
  EXPECT_EQ(feature_names()[feat::kIdf], "idf");
  EXPECT_EQ(feature_names()[feat::kInBoth], "in_both");
  EXPECT_EQ(feature_labels()[feat::kOpBase + feat::kPos + static_cast<int>(Upos::kNoun)], "OP NOUN");
  EXPECT_EQ(feature_names()[feat::kPcDepth], "pc_depth");
}

TEST(Groups, PartitionTheFeatures) {
  std::vector<int> seen(kNumFeatures, 0);
  for (FeatureGroup g : all_feature_groups()) {
    for (std::size_t i : group_indices(g)) ++seen[i];
    EXPECT_EQ(parse_feature_group(group_name(g)), g);
  }
  for (int n : seen) EXPECT_EQ(n, 1);
  EXPECT_EQ(group_indices(FeatureGroup::kNonContextual).size(), 5u);
  EXPECT_EQ(group_indices(FeatureGroup::kOpUsage).size(), 25u);
  EXPECT_EQ(group_indices(FeatureGroup::kRelation).size(), 5u);
  EXPECT_EQ(group_indices(FeatureGroup::kGeneral).size(), 6u);
  EXPECT_THROW(parse_feature_group("bogus"), std::invalid_argument);
}

TEST(JsDivergence, Properties) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_dist = [&](std::size_t n) {
    std::vector<double> p(n);
    double s = 0;
    for (double& v : p) s += v = u(rng);
    for (double& v : p) v /= s;
    return p;
  };
  for (int i = 0; i < 200; ++i) {
    const auto p = random_dist(16);
    const auto q = random_dist(16);
    EXPECT_NEAR(js_divergence(p, q), js_divergence(q, p), 1e-12);
    EXPECT_GE(js_divergence(p, q), -1e-12);
    EXPECT_LE(js_divergence(p, q), 1 + 1e-12);
    EXPECT_NEAR(js_divergence(p, p), 0.0, 1e-12);
    EXPECT_NEAR(js_divergence(p, q, true), std::sqrt(js_divergence(p, q)), 1e-12);
  }
  const std::vector<double> a = {1, 0};
  const std::vector<double> b = {0, 1};
  EXPECT_NEAR(js_divergence(a, b), 1.0, 1e-12);
  EXPECT_THROW(js_divergence(a, std::vector<double>{1, 0, 0}), std::invalid_argument);
}

TEST(SideUsage, AbsentStemDefaults) {
  const SideProfile p = side_usage("zzz", words("a b c"));
  EXPECT_FALSE(p.present());
  for (double v : p.pos_dist) EXPECT_DOUBLE_EQ(v, 1.0 / 16);
  for (double v : p.dep_dist) EXPECT_DOUBLE_EQ(v, 1.0 / 3);
  EXPECT_DOUBLE_EQ(p.location, 0.5);
  EXPECT_EQ(p.tf, 0);
  EXPECT_EQ(p.entity_frac, 0);
}

TEST(SideUsage, Counts) {
  const AnnotatedDoc doc = make_doc({{"Taxes", Upos::kNoun, DepRole::kSubject, false},
                                     {"\"", Upos::kPunct},
                                     {"tax", Upos::kVerb, DepRole::kObject},
                                     {"\"", Upos::kPunct},
                                     {"Paris", Upos::kPropn, DepRole::kOther, true}});
  const SideProfile p = side_usage("tax", doc);
  EXPECT_EQ(p.tf, 2);
  EXPECT_DOUBLE_EQ(p.ntf, 2.0 / 5);
  EXPECT_EQ(p.surface_forms.size(), 2u);
  EXPECT_DOUBLE_EQ(p.location, (4.0 / 5 + 2.0 / 5) / 2);
  EXPECT_EQ(p.in_quotes, 1);
  EXPECT_DOUBLE_EQ(p.pos_dist[static_cast<int>(Upos::kNoun)], 0.5);
  EXPECT_DOUBLE_EQ(p.dep_dist[static_cast<int>(DepRole::kObject)], 0.5);
  EXPECT_DOUBLE_EQ(p.entity_frac, 0.0);
  EXPECT_DOUBLE_EQ(side_usage("pari", doc).entity_frac, 1.0 / 5);
  // Single pass agrees with the per-stem lookup.
  const auto all = side_profiles(doc);
  EXPECT_EQ(all.at("tax").tf, p.tf);
  EXPECT_EQ(all.at("tax").location, p.location);
}

TEST(Relation, InBothAndUniqueForms) {
  const auto op = side_usage("tax", words("taxes are taxing"));
  const auto pc = side_usage("tax", words("taxes matter"));
  const RelationFeatures r = relation_features(op, pc);
  EXPECT_EQ(r.in_both, 1);
  EXPECT_EQ(r.uniq_sf_op_only, 1);
  EXPECT_EQ(r.uniq_sf_pc_only, 0);
  const auto absent = side_usage("tax", words("nothing here"));
  EXPECT_EQ(relation_features(op, absent).in_both, 0);
}

TEST(Pair, GeneralProperties) {
  const auto p = pair_features(words("aa bbbb"), words("c"), 3);
  EXPECT_EQ(p[0], 2);
  EXPECT_EQ(p[1], 1);
  EXPECT_EQ(p[2], 1);
  EXPECT_DOUBLE_EQ(p[3], 3.0 - 1.0);
  EXPECT_EQ(p[5], 3);
  const auto empty = pair_features(AnnotatedDoc{}, AnnotatedDoc{}, 1);
  EXPECT_EQ(empty[3], 0);
  EXPECT_NEAR(empty[4], 0.0, 1e-12);
}

AnnotatedTriple triple(std::string id, std::string op, std::string pc, std::string exp) {
  AnnotatedTriple t;
  t.triple_id = std::move(id);
  t.op = words(op);
  t.pc = words(pc);
  t.explanation = words(exp);
  return t;
}

TEST(Stats, DocFrequencyIdfAndTransfer) {
  const std::vector<AnnotatedTriple> train = {
      triple("a", "cats purr", "cats sleep", "cats"),
      triple("b", "dogs bark", "birds sing", "nothing"),
  };
  const CorpusStats s = build_corpus_stats(train);
  EXPECT_EQ(s.n_docs, 4u);
  EXPECT_EQ(s.doc_freq("cat"), 2u);
  EXPECT_DOUBLE_EQ(s.idf("cat"), std::log(2.0));
  EXPECT_EQ(s.doc_freq("unseen"), 1u);
  EXPECT_DOUBLE_EQ(s.idf("unseen"), std::log(4.0));
  EXPECT_DOUBLE_EQ(s.transfer("cat"), 1.0);
  EXPECT_DOUBLE_EQ(s.transfer("dog"), 0.0);
  // Stems: cat purr sleep dog bark bird sing -> one of seven echoed.
  EXPECT_DOUBLE_EQ(s.transfer("unseen"), 1.0 / 7);
  const CorpusStats back = CorpusStats::from_json(s.to_json());
  EXPECT_EQ(back.to_json(), s.to_json());
  EXPECT_THROW(build_corpus_stats({}), EmptyCorpusError);
}

TEST(Taxonomy, StemCollisionsTakeMinAndMax) {
  Taxonomy t;
  t.add("tradition", 4, 7);
  t.add("traditional", 2, 5);
  EXPECT_EQ(t.depths("tradit"), (std::pair<int, int>{2, 7}));
  EXPECT_EQ(t.depths("nothing"), (std::pair<int, int>{0, 0}));
  EXPECT_GT(Taxonomy::standard().size(), 1000u);
}

TEST(Featurize, RowsLabelsAndInvariants) {
  const std::vector<AnnotatedTriple> train = {triple("a", "cats purr", "cats sleep", "cats")};
  const CorpusStats stats = build_corpus_stats(train);
  const AnnotatedTriple t = triple("x", "The cats sleep .", "Dogs sleep too", "sleep dogs");
  const auto rows = featurize_triple(t, stats, Taxonomy{});
  std::vector<std::string> stems;
  for (const auto& r : rows) stems.push_back(r.stem);
  EXPECT_TRUE(std::is_sorted(stems.begin(), stems.end()));
  EXPECT_EQ(stems, (std::vector<std::string>{".", "cat", "dog", "sleep", "the", "too"}));
  for (const auto& r : rows) {
    const bool op = r.features[feat::kOpBase + feat::kTf] > 0;
    const bool pc = r.features[feat::kPcBase + feat::kTf] > 0;
    EXPECT_TRUE(op || pc);
    EXPECT_EQ(r.features[feat::kInBoth], (op && pc) ? 1.0 : 0.0);
    EXPECT_EQ(r.label, (r.stem == "sleep" || r.stem == "dog") ? 1 : 0);
    double pos_sum = 0;
    for (std::size_t i = 0; i < kNumUpos; ++i) pos_sum += r.features[feat::kOpBase + i];
    EXPECT_NEAR(pos_sum, 1.0, 1e-12);
  }
  const auto res = featurize_triples(std::vector{t, triple("e", "", "", "x")}, stats, Taxonomy{});
  EXPECT_EQ(res.rows.size(), rows.size());
  EXPECT_EQ(res.empty_triples, 1u);
}

TEST(Scaler, ConstantColumnsAndClipping) {
  std::vector<CandidateRow> rows(2);
  rows[0].features.fill(3);
  rows[1].features.fill(3);
  rows[0].features[0] = 1;
  rows[1].features[0] = 5;
  const MinMaxScaler s = MinMaxScaler::fit(rows);
  EXPECT_DOUBLE_EQ(s.transform(0, 2), 0.25);
  EXPECT_DOUBLE_EQ(s.transform(0, 9), 1.0);
  EXPECT_DOUBLE_EQ(s.transform(0, -9), 0.0);
  EXPECT_DOUBLE_EQ(s.transform(1, 3), 0.0);
  EXPECT_DOUBLE_EQ(s.transform(1, 7), 0.0);
  const MinMaxScaler back = MinMaxScaler::from_json(s.to_json());
  EXPECT_EQ(back.min(), s.min());
  EXPECT_EQ(back.max(), s.max());
  EXPECT_THROW(MinMaxScaler::fit({}), std::invalid_argument);
}

TEST(Csv, RoundTripIsExact) {
  testing::TempDir dir("csv");
  std::vector<CandidateRow> rows(2);
  rows[0] = {"t,1", "\"q\"", {}, 1};
  rows[1] = {"t2", "tax", {}, 0};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (auto& r : rows) {
    for (double& v : r.features) v = u(rng);
  }
  write_feature_csv(dir.path() / "f.csv", rows);
  const auto back = read_feature_csv(dir.path() / "f.csv");
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].triple_id, rows[i].triple_id);
    EXPECT_EQ(back[i].stem, rows[i].stem);
    EXPECT_EQ(back[i].label, rows[i].label);
    EXPECT_EQ(back[i].features, rows[i].features);
  }
}

}  // namespace
}  // namespace echotrace
