#pragma once

#include <stdexcept>
#include <string>

namespace decaylab {

// Every named failure condition in the library. Operations throw Error with
// one of these codes; the CLI maps codes onto process exit codes.
enum class Errc {
  // map / IFS construction
  NotAContraction,
  NotSelfMap,
  DegenerateDerivative,
  SharedFixedPoint,
  EndpointInAttractor,
  AlphabetTooLarge,
  // UNI search
  NotUNI,
  BudgetExhausted,
  // enumeration / iteration limits
  CostCapExceeded,
  Overflow,
  SeriesDiverging,
  // operators and grids
  StripExceeded,
  GridMismatch,
  // random model
  SeparationUnsatisfied,
  PrefixTooShort,
  EpsilonTooLarge,
  ConeViolation,
  DenseSetEmpty,
  // walks / equidistribution
  LatticeDetected,
  // pipeline
  OrientationReversing,
  // configuration
  ParseError,
  ValidationError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NotAContraction: return "NotAContraction";
    case Errc::NotSelfMap: return "NotSelfMap";
    case Errc::DegenerateDerivative: return "DegenerateDerivative";
    case Errc::SharedFixedPoint: return "SharedFixedPoint";
    case Errc::EndpointInAttractor: return "EndpointInAttractor";
    case Errc::AlphabetTooLarge: return "AlphabetTooLarge";
    case Errc::NotUNI: return "NotUNI";
    case Errc::BudgetExhausted: return "BudgetExhausted";
    case Errc::CostCapExceeded: return "CostCapExceeded";
    case Errc::Overflow: return "Overflow";
    case Errc::SeriesDiverging: return "SeriesDiverging";
    case Errc::StripExceeded: return "StripExceeded";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::SeparationUnsatisfied: return "SeparationUnsatisfied";
    case Errc::PrefixTooShort: return "PrefixTooShort";
    case Errc::EpsilonTooLarge: return "EpsilonTooLarge";
    case Errc::ConeViolation: return "ConeViolation";
    case Errc::DenseSetEmpty: return "DenseSetEmpty";
    case Errc::LatticeDetected: return "LatticeDetected";
    case Errc::OrientationReversing: return "OrientationReversing";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
  }
  return "UnknownError";
}

}  // namespace decaylab
