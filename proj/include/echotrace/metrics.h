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

#ifndef ECHOTRACE_METRICS_H_
#define ECHOTRACE_METRICS_H_

#include <cstddef>
#include <span>

namespace echotrace {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  double precision() const;
  double recall() const;
  // 2PR / (P + R); 0 when P + R = 0.
  double f1() const;
  Confusion& operator+=(const Confusion& other);
};

// Throws std::invalid_argument when the lengths differ.
Confusion confusion(std::span<const int> preds, std::span<const int> labels);
double f1_score(std::span<const int> preds, std::span<const int> labels);

}  // namespace echotrace

#endif  // ECHOTRACE_METRICS_H_
