/*
 * Copyright 2026 The t2t Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef T2T_ERRORS_HPP_
#define T2T_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace t2t {

// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorCategory {
  kConfig,   // bad arguments, invalid configuration, violated preconditions
  kIo,       // file system and on-disk format problems
  kNumeric,  // solver or optimizer failures
  kShape,    // dimension mismatches between models, images and arrays
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

#define T2T_DEFINE_ERROR(Name, Category)                       \
  class Name : public Error {                                  \
   public:                                                     \
    explicit Name(const std::string& what)                     \
        : Error(ErrorCategory::Category, #Name ": " + what) {} \
  };

T2T_DEFINE_ERROR(InvalidArgument, kConfig)
T2T_DEFINE_ERROR(ConfigError, kConfig)
T2T_DEFINE_ERROR(MissingVersion, kConfig)
T2T_DEFINE_ERROR(DegenerateInput, kNumeric)
T2T_DEFINE_ERROR(ForceUnreachable, kNumeric)
T2T_DEFINE_ERROR(SingularSystem, kNumeric)
T2T_DEFINE_ERROR(Diverged, kNumeric)
T2T_DEFINE_ERROR(NonDifferentiableKind, kConfig)
T2T_DEFINE_ERROR(GridMismatch, kShape)
T2T_DEFINE_ERROR(OutOfBounds, kShape)
T2T_DEFINE_ERROR(ShapeMismatch, kShape)
T2T_DEFINE_ERROR(LengthMismatch, kShape)
T2T_DEFINE_ERROR(IoError, kIo)
T2T_DEFINE_ERROR(ChecksumMismatch, kIo)

#undef T2T_DEFINE_ERROR

// Malformed file contents. `offset` is the byte position where parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(ErrorCategory::kIo,
              "FormatError: " + what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace t2t

#endif  // T2T_ERRORS_HPP_
