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

#include "echotrace/stopwords.h"

#include <fstream>

#include "echotrace/error.h"
#include "echotrace/resources.h"
#include "echotrace/textprep.h"

namespace echotrace {

StopwordSet StopwordSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword list " + path.string());
  StopwordSet set;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    ++set.surface_count_;
    set.stems_.insert(stem_token(lowercase_token(line)));
  }
  return set;
}

const StopwordSet& StopwordSet::standard() {
  static const StopwordSet set = load(resource_path("stopwords.txt"));
  return set;
}

bool StopwordSet::contains_stem(std::string_view stem) const {
  return stems_.find(std::string(stem)) != stems_.end();
}

bool is_stopword(std::string_view stem) { return StopwordSet::standard().contains_stem(stem); }

}  // namespace echotrace
