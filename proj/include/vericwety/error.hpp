// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vericwety {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kEmptyCorpus,
  kDuplicateDesignId,
  kChecksumMismatch,
  kProviderTimeout,
  kMalformedResponse,
  kAuthError,
  kMixedDesign,
  kMissingVotes,
  kBackendUnavailable,
  kDimensionMismatch,
  kDesignMismatch,
  kKeyMissing,
  kKeyExists,
  kBackendMismatch,
  kTooFewExamples,
  kDegenerateLabels,
  kMissingEmbeddings,
  kLengthMismatch,
  kUnknownLabel,
  kMissingArtifact,
  kFormat,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status and tests can assert on the kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vericwety
