#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace efunc {

enum class ErrorCode {
  InvalidInput,
  SyntaxError,
  FieldMismatch,
  NotSquarefree,
  AutomorphismInvalid,
  RootIsolationFailure,
  DivisionByZero,
  NotGalois,
  SearchExhausted,
  NotCoprime,
  DivisionByZeroPolynomial,
  InconsistentSeeds,
  InsufficientSeeds,
  ZeroIsIrregular,
  SystemRequired,
  FieldLacksI,
  NotNormalBasis,
  RationalityViolation,
  ConstantTermZero,
  NotASingularity,
  SingularityOutsideField,
  IndependenceSuspect,
  LoopCap,
  CertificateInconsistent,
  PrecisionExhausted,
  GrowthUnboundedOnPrefix,
  InsufficientPrecision,
  RationalDetected,
  PrecisionTooLow,
  BudgetExceeded,
  AssertedRelationFailsNumerically,
  HeuristicCheckFailed,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::NotSquarefree: return "NotSquarefree";
    case ErrorCode::AutomorphismInvalid: return "AutomorphismInvalid";
    case ErrorCode::RootIsolationFailure: return "RootIsolationFailure";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::NotGalois: return "NotGalois";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::NotCoprime: return "NotCoprime";
    case ErrorCode::DivisionByZeroPolynomial: return "DivisionByZeroPolynomial";
    case ErrorCode::InconsistentSeeds: return "InconsistentSeeds";
    case ErrorCode::InsufficientSeeds: return "InsufficientSeeds";
    case ErrorCode::ZeroIsIrregular: return "ZeroIsIrregular";
    case ErrorCode::SystemRequired: return "SystemRequired";
    case ErrorCode::FieldLacksI: return "FieldLacksI";
    case ErrorCode::NotNormalBasis: return "NotNormalBasis";
    case ErrorCode::RationalityViolation: return "RationalityViolation";
    case ErrorCode::ConstantTermZero: return "ConstantTermZero";
    case ErrorCode::NotASingularity: return "NotASingularity";
    case ErrorCode::SingularityOutsideField: return "SingularityOutsideField";
    case ErrorCode::IndependenceSuspect: return "IndependenceSuspect";
    case ErrorCode::LoopCap: return "LoopCap";
    case ErrorCode::CertificateInconsistent: return "CertificateInconsistent";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::GrowthUnboundedOnPrefix: return "GrowthUnboundedOnPrefix";
    case ErrorCode::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorCode::RationalDetected: return "RationalDetected";
    case ErrorCode::PrecisionTooLow: return "PrecisionTooLow";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::AssertedRelationFailsNumerically: return "AssertedRelationFailsNumerically";
    case ErrorCode::HeuristicCheckFailed: return "HeuristicCheckFailed";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

/// Process exit status for the command-line tool: 2 usage, 3 mathematical
/// precondition, 4 precision, 5 failed heuristic or consistency check.
inline int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::SyntaxError:
      return 2;
    case ErrorCode::PrecisionExhausted:
    case ErrorCode::RootIsolationFailure:
    case ErrorCode::InsufficientPrecision:
    case ErrorCode::PrecisionTooLow:
      return 4;
    case ErrorCode::IndependenceSuspect:
    case ErrorCode::HeuristicCheckFailed:
    case ErrorCode::GrowthUnboundedOnPrefix:
    case ErrorCode::AssertedRelationFailsNumerically:
    case ErrorCode::CertificateInconsistent:
    case ErrorCode::RationalityViolation:
      return 5;
    default:
      return 3;
  }
}

}  // namespace efunc
