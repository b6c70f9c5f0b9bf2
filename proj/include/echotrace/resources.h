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

#ifndef ECHOTRACE_RESOURCES_H_
#define ECHOTRACE_RESOURCES_H_

#include <filesystem>
#include <string_view>

namespace echotrace {

// Directory holding the bundled data files (stopwords.txt, taxonomy.tsv,
// porter_fixture.tsv). ECHOTRACE_RESOURCE_DIR overrides the build-time default.
std::filesystem::path resource_dir();

std::filesystem::path resource_path(std::string_view name);

}  // namespace echotrace

#endif  // ECHOTRACE_RESOURCES_H_
