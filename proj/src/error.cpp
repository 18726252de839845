// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#include "mtsar/error.hpp"

namespace mtsar {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kEmptyStack: return "empty-stack";
    case ErrorCode::kNonPositiveLooks: return "non-positive-looks";
    case ErrorCode::kOutOfBounds: return "out-of-bounds";
    case ErrorCode::kNonPositiveValue: return "non-positive-value";
    case ErrorCode::kNonFinite: return "non-finite-pixels";
    case ErrorCode::kIndexOutOfRange: return "index-out-of-range";
    case ErrorCode::kDegenerateRegion: return "degenerate-region";
    case ErrorCode::kIoFailure: return "io-failure";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported-version";
    case ErrorCode::kUnsupportedDtype: return "unsupported-dtype";
    case ErrorCode::kTruncatedPayload: return "truncated-payload";
    case ErrorCode::kTrailingData: return "trailing-data";
    case ErrorCode::kSchemaViolation: return "schema-violation";
    case ErrorCode::kSubprocessFailure: return "subprocess-failure";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kMalformedOutput: return "malformed-output";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

}  // namespace mtsar
