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

#ifndef ECHOTRACE_TESTS_ORACLE_FEATURE_ORACLE_H_
#define ECHOTRACE_TESTS_ORACLE_FEATURE_ORACLE_H_

// Slow reference computation of the per-stem features, written from the
// feature definitions without reusing the library's feature code. Only the
// Porter stemmer is shared (it is checked against its own reference list).

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace echotrace::oracle {

struct OTok {
  std::string text;
  std::string upos;
  std::string dep;
  std::string ent;
};

struct OTriple {
  std::string id;
  int depth = 1;
  std::vector<OTok> op;
  std::vector<OTok> pc;
  std::vector<OTok> exp;
};

std::vector<OTriple> load_fixture(const std::filesystem::path& triples,
                                  const std::filesystem::path& exchange);

using Taxonomy = std::vector<std::tuple<std::string, int, int>>;
Taxonomy load_taxonomy(const std::filesystem::path& path);

struct OracleRow {
  std::array<double, 66> f{};
  int label = 0;
};

// Candidate stem -> features and label.
std::map<std::string, OracleRow> oracle_rows(const OTriple& triple,
                                             const std::vector<OTriple>& train,
                                             const Taxonomy& taxonomy);

// 1-based feature numbers whose values are integer counts.
bool is_count_feature(int number);

}  // namespace echotrace::oracle

#endif  // ECHOTRACE_TESTS_ORACLE_FEATURE_ORACLE_H_
