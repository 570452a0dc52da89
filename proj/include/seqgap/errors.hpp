#pragma once

#include <stdexcept>
#include <string>

namespace seqgap {

// Base of every error raised by the library. Each contract violation named by
// the module interfaces gets its own type so callers can catch selectively.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SEQGAP_DEFINE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    explicit Name(const std::string& what)   \
        : Error(#Name ": " + what) {}        \
  }

SEQGAP_DEFINE_ERROR(DimensionMismatch);
SEQGAP_DEFINE_ERROR(NonFiniteValue);
SEQGAP_DEFINE_ERROR(NotSymmetric);
SEQGAP_DEFINE_ERROR(IndefiniteMatrix);
SEQGAP_DEFINE_ERROR(InvalidDimensions);
SEQGAP_DEFINE_ERROR(InvalidGeometry);
SEQGAP_DEFINE_ERROR(UnsupportedGeometry);
SEQGAP_DEFINE_ERROR(InconsistentObservation);
SEQGAP_DEFINE_ERROR(BudgetExceeded);
SEQGAP_DEFINE_ERROR(ProtocolViolation);
SEQGAP_DEFINE_ERROR(Infeasible);
SEQGAP_DEFINE_ERROR(DomainError);
SEQGAP_DEFINE_ERROR(ConfigError);

#undef SEQGAP_DEFINE_ERROR

}  // namespace seqgap
