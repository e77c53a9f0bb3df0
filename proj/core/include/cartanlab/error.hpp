#pragma once

#include <stdexcept>
#include <string>

namespace cartanlab {

enum class Err {
  InvalidArgument,
  DimensionMismatch,
  InvalidStructure,   // antisymmetry or Jacobi failure in structure constants
  NotClosed,          // candidate subalgebra basis does not close under brackets
  NotHomomorphism,    // matrix representation fails the bracket identity
  NotInAlgebra,       // matrix does not project back onto the algebra span
  OutOfBranch,        // matrix log outside the principal branch
  SubgroupViolation,  // conjugation leaks outside the algebra span
  SingularCoframe,    // connection form not invertible at a point
  NotReductive,       // complement is not ad(g)-invariant
  NotHorizontal,      // form does not vanish on vertical vectors
  NotInvariant,       // multilinear function fails invariance
  NotGInvariant,      // torsion complement fails group invariance
  ModelMismatch,      // operands live on different local models
  BackendUnsupported, // operation needs a backend the field does not have
  SingularLinearPart, // jet with non-invertible linear part
  TruncationNotClosed,// jet bracket truncation loses nonzero components
  DimensionOverflow,  // jet order or variable count beyond the supported range
  NotType1,
  NotType2,
  UnsupportedCurvedBase,
  NoSolution,
  StepUnstable,       // integrator error estimate exceeded its bound
  UnknownPreset,
  ConfigError,
};

inline const char* to_string(Err code) {
  switch (code) {
    case Err::InvalidArgument:      return "InvalidArgument";
    case Err::DimensionMismatch:    return "DimensionMismatch";
    case Err::InvalidStructure:     return "InvalidStructure";
    case Err::NotClosed:            return "NotClosed";
    case Err::NotHomomorphism:      return "NotHomomorphism";
    case Err::NotInAlgebra:         return "NotInAlgebra";
    case Err::OutOfBranch:          return "OutOfBranch";
    case Err::SubgroupViolation:    return "SubgroupViolation";
    case Err::SingularCoframe:      return "SingularCoframe";
    case Err::NotReductive:         return "NotReductive";
    case Err::NotHorizontal:        return "NotHorizontal";
    case Err::NotInvariant:         return "NotInvariant";
    case Err::NotGInvariant:        return "NotGInvariant";
    case Err::ModelMismatch:        return "ModelMismatch";
    case Err::BackendUnsupported:   return "BackendUnsupported";
    case Err::SingularLinearPart:   return "SingularLinearPart";
    case Err::TruncationNotClosed:  return "TruncationNotClosed";
    case Err::DimensionOverflow:    return "DimensionOverflow";
    case Err::NotType1:             return "NotType1";
    case Err::NotType2:             return "NotType2";
    case Err::UnsupportedCurvedBase:return "UnsupportedCurvedBase";
    case Err::NoSolution:           return "NoSolution";
    case Err::StepUnstable:         return "StepUnstable";
    case Err::UnknownPreset:        return "UnknownPreset";
    case Err::ConfigError:          return "ConfigError";
  }
  return "Error";
}

class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), m_code(code) {}

  Err code() const { return m_code; }

private:
  Err m_code;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Err code, const std::string& what) {
  if (!ok) fail(code, what);
}

} // namespace cartanlab
