// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mtsar {

// Numeric values are shared with mtsar_status in mtsar.h.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kEmptyStack = 3,
  kNonPositiveLooks = 4,
  kOutOfBounds = 5,
  kNonPositiveValue = 6,
  kNonFinite = 7,
  kIndexOutOfRange = 8,
  kDegenerateRegion = 9,
  kIoFailure = 10,
  kBadMagic = 11,
  kUnsupportedVersion = 12,
  kUnsupportedDtype = 13,
  kTruncatedPayload = 14,
  kTrailingData = 15,
  kSchemaViolation = 16,
  kSubprocessFailure = 17,
  kTimeout = 18,
  kMalformedOutput = 19,
  kInternal = 99,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mtsar
