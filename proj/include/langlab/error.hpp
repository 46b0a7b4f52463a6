#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace langlab {

/// Domain error codes shared by every module. The CLI maps any Error to exit
/// code 1 and prints the code name in its error object.
enum class Errc {
  // grammar
  OverlappingAlphabets,
  UnknownLabelInRule,
  EmptyLhs,
  MissingStart,
  SearchBudgetExceeded,
  NotContextFree,
  UnknownToken,
  InfinitelyAmbiguous,
  MissingHeadAssignment,
  // pregroup
  UnknownWord,
  UnknownGenerator,
  // vector semantics
  BasisMismatch,
  ZeroVector,
  EmptyDocument,
  TermAbsentEverywhere,
  // concepts
  UnknownId,
  CapExceeded,
  NoConvergence,
  BadRank,
  // stochastic
  ZeroCondition,
  HorizonExceeded,
  InvalidDistribution,
  // ngram
  EmptyPhrase,
  PhraseTooShort,
  CorpusTooShort,
  UnseenContext,
  BadOrder,
  // neural / belief
  DimMismatch,
  OutOfDomain,
  NonDifferentiableActivation,
  EmptyContext,
  // io / cli
  ParseError,
  SchemaError,
  VersionError,
  IoError,
  UnknownDemo,
  InvalidArgument,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::OverlappingAlphabets: return "OverlappingAlphabets";
    case Errc::UnknownLabelInRule: return "UnknownLabelInRule";
    case Errc::EmptyLhs: return "EmptyLhs";
    case Errc::MissingStart: return "MissingStart";
    case Errc::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case Errc::NotContextFree: return "NotContextFree";
    case Errc::UnknownToken: return "UnknownToken";
    case Errc::InfinitelyAmbiguous: return "InfinitelyAmbiguous";
    case Errc::MissingHeadAssignment: return "MissingHeadAssignment";
    case Errc::UnknownWord: return "UnknownWord";
    case Errc::UnknownGenerator: return "UnknownGenerator";
    case Errc::BasisMismatch: return "BasisMismatch";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::EmptyDocument: return "EmptyDocument";
    case Errc::TermAbsentEverywhere: return "TermAbsentEverywhere";
    case Errc::UnknownId: return "UnknownId";
    case Errc::CapExceeded: return "CapExceeded";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::BadRank: return "BadRank";
    case Errc::ZeroCondition: return "ZeroCondition";
    case Errc::HorizonExceeded: return "HorizonExceeded";
    case Errc::InvalidDistribution: return "InvalidDistribution";
    case Errc::EmptyPhrase: return "EmptyPhrase";
    case Errc::PhraseTooShort: return "PhraseTooShort";
    case Errc::CorpusTooShort: return "CorpusTooShort";
    case Errc::UnseenContext: return "UnseenContext";
    case Errc::BadOrder: return "BadOrder";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::NonDifferentiableActivation: return "NonDifferentiableActivation";
    case Errc::EmptyContext: return "EmptyContext";
    case Errc::ParseError: return "ParseError";
    case Errc::SchemaError: return "SchemaError";
    case Errc::VersionError: return "VersionError";
    case Errc::IoError: return "IoError";
    case Errc::UnknownDemo: return "UnknownDemo";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace langlab
