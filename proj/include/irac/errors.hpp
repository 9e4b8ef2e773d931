// Copyright 2026 The IRAC-KG Authors.
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
#include <string_view>

namespace irac {

// Every failure the library surfaces carries one of these codes. The CLI
// prints the code name verbatim in its machine-readable error output.
enum class ErrorCode {
  // corpus
  MissingRoot,
  EmptyCorpus,
  CaseNotFound,
  DuplicateCaseId,
  InvalidCaseId,
  ManifestError,
  // kg
  UnparseableDocument,
  InvalidGraph,
  NoObjectFound,
  // llm gateway
  BackendUnavailable,
  RateLimited,
  Refused,
  CacheIoError,
  // graph queries
  NotAnIssue,
  NotAFact,
  // generators
  EchoMismatch,
  MalformedSftXml,
  JudgeParseFailure,
  // dataset
  EmptyInput,
  IoError,
  LineParseError,
  // review
  InsufficientCases,
  UnknownItem,
  UnknownBatch,
  ClosedBatch,
  InvalidLabel,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingRoot: return "MissingRoot";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::CaseNotFound: return "CaseNotFound";
    case ErrorCode::DuplicateCaseId: return "DuplicateCaseId";
    case ErrorCode::InvalidCaseId: return "InvalidCaseId";
    case ErrorCode::ManifestError: return "ManifestError";
    case ErrorCode::UnparseableDocument: return "UnparseableDocument";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::NoObjectFound: return "NoObjectFound";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::Refused: return "Refused";
    case ErrorCode::CacheIoError: return "CacheIoError";
    case ErrorCode::NotAnIssue: return "NotAnIssue";
    case ErrorCode::NotAFact: return "NotAFact";
    case ErrorCode::EchoMismatch: return "EchoMismatch";
    case ErrorCode::MalformedSftXml: return "MalformedSftXml";
    case ErrorCode::JudgeParseFailure: return "JudgeParseFailure";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::LineParseError: return "LineParseError";
    case ErrorCode::InsufficientCases: return "InsufficientCases";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::UnknownBatch: return "UnknownBatch";
    case ErrorCode::ClosedBatch: return "ClosedBatch";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by read_jsonl; line numbers are 1-based.
class LineError : public Error {
 public:
  LineError(std::size_t line, const std::string& message)
      : Error(ErrorCode::LineParseError, "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// MalformedSftXml names the missing or broken tag.
class SftXmlError : public Error {
 public:
  explicit SftXmlError(std::string tag)
      : Error(ErrorCode::MalformedSftXml, "missing or malformed <" + tag + ">"), tag_(std::move(tag)) {}

  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

}  // namespace irac
