// Copyright 2026 The qrask Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrask {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A row of the operator has zero Euclidean norm and cannot be normalized.
class ZeroRow : public Error {
 public:
  explicit ZeroRow(std::size_t row)
      : Error("row " + std::to_string(row) + " has zero norm"), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnsupportedField : public Error {
 public:
  using Error::Error;
};

/// A computed step parameter is NaN or infinite.
class NonFinite : public Error {
 public:
  using Error::Error;
};

/// An internal invariant was violated beyond its floating-point tolerance.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A brute-force routine was asked for an instance too large to enumerate.
class SizeGuard : public Error {
 public:
  using Error::Error;
};

class DegenerateTrajectory : public Error {
 public:
  using Error::Error;
};

class BundleError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace qrask
