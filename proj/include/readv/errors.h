// Copyright 2026 The readv Authors.
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

#ifndef READV_ERRORS_H_
#define READV_ERRORS_H_

#include <stdexcept>
#include <string>

namespace readv {

// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input could not be parsed (malformed JSON, wrong field types).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Input parsed but violates a corpus invariant (spans, ids, labels).
class ValidationError : public Error {
 public:
  ValidationError(const std::string& example_id, const std::string& what)
      : Error("example '" + example_id + "': " + what),
        example_id_(example_id) {}

  const std::string& example_id() const { return example_id_; }

 private:
  std::string example_id_;
};

// A caller broke an operation's precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Prediction file does not line up with the gold dataset it is scored
// against.
class AlignmentError : public Error {
 public:
  AlignmentError(const std::string& id, const std::string& what)
      : Error(what), id_(id) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class MissingPrediction : public AlignmentError {
 public:
  explicit MissingPrediction(const std::string& id)
      : AlignmentError(id, "missing prediction for id '" + id + "'") {}
};

class UnknownId : public AlignmentError {
 public:
  explicit UnknownId(const std::string& id)
      : AlignmentError(id, "prediction for unknown id '" + id + "'") {}
};

class DuplicateId : public AlignmentError {
 public:
  explicit DuplicateId(const std::string& id)
      : AlignmentError(id, "duplicate prediction for id '" + id + "'") {}
};

class UnknownLabel : public AlignmentError {
 public:
  UnknownLabel(const std::string& id, const std::string& label)
      : AlignmentError(id, "unknown label '" + label + "' for id '" + id + "'"),
        label_(label) {}

  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

}  // namespace readv

#endif  // READV_ERRORS_H_
