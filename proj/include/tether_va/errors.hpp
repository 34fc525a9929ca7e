// Copyright 2026 The tether_va Authors
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

#ifndef TETHER_VA__ERRORS_HPP_
#define TETHER_VA__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace tva
{

/// Machine-readable failure class. Values double as CLI exit codes.
enum class ErrorCategory : int {
  kConfig = 1,
  kNoPath = 2,
  kEntanglement = 3,
  kGeometry = 4,
};

const char * category_name(ErrorCategory c);

class Error : public std::runtime_error
{
public:
  Error(ErrorCategory category, const std::string & what)
  : std::runtime_error(what), category_(category)
  {
  }
  ErrorCategory category() const noexcept { return category_; }

private:
  ErrorCategory category_;
};

/// Query outside the valid domain (out of bounds, inside an obstacle, bad argument).
class DomainError : public Error
{
public:
  explicit DomainError(const std::string & what) : Error(ErrorCategory::kGeometry, what) {}
};

/// Geometrically undefined result (coincident points, zero spread).
class DegenerateError : public Error
{
public:
  explicit DegenerateError(const std::string & what) : Error(ErrorCategory::kGeometry, what) {}
};

/// Velocity mapping near gimbal lock or zero tether length.
class SingularityError : public Error
{
public:
  SingularityError(const std::string & quantity, double value)
  : Error(
      ErrorCategory::kGeometry,
      "singular configuration: " + quantity + " = " + std::to_string(value)),
    quantity_(quantity),
    value_(value)
  {
  }
  const std::string & quantity() const noexcept { return quantity_; }
  double value() const noexcept { return value_; }

private:
  std::string quantity_;
  double value_;
};

class NoPathError : public Error
{
public:
  explicit NoPathError(const std::string & what) : Error(ErrorCategory::kNoPath, what) {}
};

class EntanglementError : public Error
{
public:
  explicit EntanglementError(const std::string & what) : Error(ErrorCategory::kEntanglement, what)
  {
  }
};

class ConfigError : public Error
{
public:
  explicit ConfigError(const std::string & what) : Error(ErrorCategory::kConfig, what) {}
};

inline const char * category_name(ErrorCategory c)
{
  switch (c) {
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kNoPath:
      return "no_path";
    case ErrorCategory::kEntanglement:
      return "entanglement";
    case ErrorCategory::kGeometry:
      return "geometry";
  }
  return "unknown";
}

}  // namespace tva

#endif  // TETHER_VA__ERRORS_HPP_
