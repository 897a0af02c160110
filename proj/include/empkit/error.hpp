// Copyright 2026 The empkit Authors.
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

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace empkit {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input (graph file, EMP text, out-of-range node).
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class EmpParseError : public InputError {
 public:
  using InputError::InputError;
};

class InvalidGraph : public InputError {
 public:
  using InputError::InputError;
};

class UnknownNodeLabel : public InvalidGraph {
 public:
  using InvalidGraph::InvalidGraph;
};

class SelfLoop : public InvalidGraph {
 public:
  using InvalidGraph::InvalidGraph;
};

class DuplicateEdge : public InvalidGraph {
 public:
  using InvalidGraph::InvalidGraph;
};

class CycleDetected : public InvalidGraph {
 public:
  CycleDetected(const std::string& what, std::vector<std::string> cycle)
      : InvalidGraph(what), cycle_(std::move(cycle)) {}

  /// Labels along one directed cycle, first label repeated at the end.
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class UnknownNode : public InputError {
 public:
  using InputError::InputError;
};

class EmptySelection : public InputError {
 public:
  using InputError::InputError;
};

class TooLarge : public InputError {
 public:
  using InputError::InputError;
};

class NotAStructuralZero : public InputError {
 public:
  using InputError::InputError;
};

/// Internal inconsistency: engine bug or an unresolvable oracle disagreement.
class InternalError : public Error {
 public:
  using Error::Error;
};

class SynthesisFailed : public InternalError {
 public:
  using InternalError::InternalError;
};

class OracleDisagreement : public InternalError {
 public:
  using InternalError::InternalError;
};

}  // namespace empkit
