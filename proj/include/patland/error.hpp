// Copyright 2026 The patland Authors
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

#ifndef PATLAND_ERROR_HPP_
#define PATLAND_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace patland {

// Numeric values are mirrored by pl_status in the C API.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kParse = 2,
  kValidation = 3,
  kFormat = 4,
  kNotFound = 5,
  kConflict = 6,
  kPrecondition = 7,
  kNumerical = 8,
  kConvergence = 9,
  kIo = 10,
  kInternal = 11,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failure tied to a 1-based line (or row) number of the input.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, const std::string& message)
      : Error(code, "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Raised when a label conflicts with one already recorded; carries the prior label.
class ConflictError : public Error {
 public:
  ConflictError(const std::string& message, std::string existing_label)
      : Error(ErrorCode::kConflict, message), existing_label_(std::move(existing_label)) {}

  const std::string& existing_label() const noexcept { return existing_label_; }

 private:
  std::string existing_label_;
};

// SMO did not reach the KKT tolerance within its iteration budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::size_t iterations, double max_violation)
      : Error(ErrorCode::kConvergence,
              "SMO did not converge after " + std::to_string(iterations) +
                  " iterations (max KKT violation " + std::to_string(max_violation) + ")"),
        iterations_(iterations),
        max_violation_(max_violation) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double max_violation() const noexcept { return max_violation_; }

 private:
  std::size_t iterations_;
  double max_violation_;
};

}  // namespace patland

#endif  // PATLAND_ERROR_HPP_
