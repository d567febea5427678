// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vericwety/error.hpp"

namespace vericwety {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kDuplicateDesignId: return "DuplicateDesignId";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kProviderTimeout: return "ProviderTimeout";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kAuthError: return "AuthError";
    case ErrorCode::kMixedDesign: return "MixedDesign";
    case ErrorCode::kMissingVotes: return "MissingVotes";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDesignMismatch: return "DesignMismatch";
    case ErrorCode::kKeyMissing: return "KeyMissing";
    case ErrorCode::kKeyExists: return "KeyExists";
    case ErrorCode::kBackendMismatch: return "BackendMismatch";
    case ErrorCode::kTooFewExamples: return "TooFewExamples";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kMissingEmbeddings: return "MissingEmbeddings";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kMissingArtifact: return "MissingArtifact";
    case ErrorCode::kFormat: return "FormatError";
  }
  return "Unknown";
}

}  // namespace vericwety
