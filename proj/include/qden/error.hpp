// Copyright 2026 The qden Authors
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qden {

enum class ErrorCode : int {
  kInvalidArgument = 1,
  kIo = 2,
  kFormat = 3,
  kNumeric = 4,
  kConfigMismatch = 5,
};

// Base of every exception thrown by the library. The C API maps `code()` onto
// its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::kInvalidArgument, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCode::kNumeric, what) {}
};

class ConfigMismatch : public Error {
 public:
  explicit ConfigMismatch(const std::string& what) : Error(ErrorCode::kConfigMismatch, what) {}
};

// Malformed binary file. `offset` is the byte position where decoding failed;
// `record` is the record index, or -1 when the failure is in the header.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset, std::int64_t record = -1)
      : Error(ErrorCode::kFormat, what + " (at byte offset " + std::to_string(offset) +
                                      (record >= 0 ? ", record " + std::to_string(record) : "") + ")"),
        offset_(offset),
        record_(record) {}
  std::uint64_t offset() const noexcept { return offset_; }
  std::int64_t record() const noexcept { return record_; }

 private:
  std::uint64_t offset_;
  std::int64_t record_;
};

}  // namespace qden
