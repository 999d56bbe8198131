// Copyright 2026 The sstoken Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SSTOKEN_ERRORS_HPP_
#define SSTOKEN_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sstoken {

/// Bad arguments: out-of-range indices, width mismatches, malformed values.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition of an operation was violated by otherwise valid arguments
/// (e.g. moving a node that is not privileged).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The request exceeds a documented size bound.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Circuit construction misuse, such as reusing an ancilla slot.
class ConstructionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Circuit text could not be parsed. Carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

}  // namespace sstoken

#endif  // SSTOKEN_ERRORS_HPP_
