// Copyright 2026 The eposim Authors
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

namespace eposim {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files or values that violate a type invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input text could not be parsed. Message carries line and field context.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& field, const std::string& what)
      : ConfigError(source + ":" + std::to_string(line) + ": " +
                    (field.empty() ? "" : "field '" + field + "': ") + what),
        line_(line),
        field_(field) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// Parsed input violates a documented invariant.
class ValidationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// No configuration satisfies the capacity constraints (e.g. batch 1 does not fit).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Process exit code for an exception escaping to the CLI.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace eposim
