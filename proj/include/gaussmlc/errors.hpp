#pragma once

#include <stdexcept>
#include <string>

namespace gaussmlc {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define GAUSSMLC_DEFINE_ERROR(Name)                                  \
  struct Name : Error {                                              \
    explicit Name(const std::string& what = #Name) : Error(what) {}  \
  }

GAUSSMLC_DEFINE_ERROR(ZeroVector);
GAUSSMLC_DEFINE_ERROR(DimensionMismatch);
GAUSSMLC_DEFINE_ERROR(DegeneratePair);
GAUSSMLC_DEFINE_ERROR(AcceptanceStarvation);
GAUSSMLC_DEFINE_ERROR(CalibrationFailure);
GAUSSMLC_DEFINE_ERROR(EmptySample);
GAUSSMLC_DEFINE_ERROR(EmptyCandidates);
GAUSSMLC_DEFINE_ERROR(HypothesisViolated);
GAUSSMLC_DEFINE_ERROR(PreconditionViolated);
GAUSSMLC_DEFINE_ERROR(InvalidGeometryGuess);
GAUSSMLC_DEFINE_ERROR(OrthogonalityViolation);
GAUSSMLC_DEFINE_ERROR(InsufficientSamples);
GAUSSMLC_DEFINE_ERROR(MismatchedSources);
GAUSSMLC_DEFINE_ERROR(FormatError);
GAUSSMLC_DEFINE_ERROR(IoError);
GAUSSMLC_DEFINE_ERROR(ConfigError);

#undef GAUSSMLC_DEFINE_ERROR

}  // namespace gaussmlc
