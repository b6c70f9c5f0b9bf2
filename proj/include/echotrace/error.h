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

#ifndef ECHOTRACE_ERROR_H_
#define ECHOTRACE_ERROR_H_

#include <stdexcept>
#include <string>

namespace echotrace {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// An input that must contain records contained none.
class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

// A record does not match the expected exchange or artifact schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage is missing an upstream artifact.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace echotrace

#endif  // ECHOTRACE_ERROR_H_
