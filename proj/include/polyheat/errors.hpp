#pragma once

#include <stdexcept>
#include <string>

namespace polyheat {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define POLYHEAT_ERROR(NAME)                                  \
  struct NAME : Error {                                       \
    explicit NAME(const std::string& what) : Error(what) {}   \
  }

POLYHEAT_ERROR(ParseError);
POLYHEAT_ERROR(GluingError);
POLYHEAT_ERROR(AdmissibilityError);
POLYHEAT_ERROR(RangeError);
POLYHEAT_ERROR(DisconnectedError);
POLYHEAT_ERROR(DegenerateError);
POLYHEAT_ERROR(RadiusError);
POLYHEAT_ERROR(MeshError);
POLYHEAT_ERROR(ConvergenceError);
POLYHEAT_ERROR(EmptyDomainError);
POLYHEAT_ERROR(WindowError);
POLYHEAT_ERROR(SizeError);
POLYHEAT_ERROR(AmenabilityError);
POLYHEAT_ERROR(StepError);
POLYHEAT_ERROR(ConstructionError);
POLYHEAT_ERROR(ChainOverflowError);
POLYHEAT_ERROR(IllDefinedTermError);
POLYHEAT_ERROR(TruncationError);
POLYHEAT_ERROR(HorizonError);

#undef POLYHEAT_ERROR

}  // namespace polyheat
