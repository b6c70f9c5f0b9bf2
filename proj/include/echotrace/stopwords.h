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

#ifndef ECHOTRACE_STOPWORDS_H_
#define ECHOTRACE_STOPWORDS_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>

namespace echotrace {

// English stopwords matched at the stem level: the surface list is stemmed
// once at load and candidates are compared against the stemmed entries.
class StopwordSet {
 public:
  // One word per line; blank lines and lines starting with '#' are ignored.
  static StopwordSet load(const std::filesystem::path& path);

  // The bundled list, loaded on first use.
  static const StopwordSet& standard();

  bool contains_stem(std::string_view stem) const;

  std::size_t surface_count() const { return surface_count_; }
  std::size_t stem_count() const { return stems_.size(); }

 private:
  std::unordered_set<std::string> stems_;
  std::size_t surface_count_ = 0;
};

// Membership in the bundled list.
bool is_stopword(std::string_view stem);

}  // namespace echotrace

#endif  // ECHOTRACE_STOPWORDS_H_
