#pragma once

#include <stdexcept>
#include <string>

namespace rrg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define RRG_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                    \
   public:                                                       \
    using Error::Error;                                          \
    const char* kind() const noexcept override { return #Name; } \
  };

RRG_DEFINE_ERROR(InvalidArgument)
RRG_DEFINE_ERROR(NonPositiveSpectrum)
RRG_DEFINE_ERROR(OutOfDomain)
RRG_DEFINE_ERROR(HorizonExceeded)
RRG_DEFINE_ERROR(NoExit)
RRG_DEFINE_ERROR(OutOfRange)
RRG_DEFINE_ERROR(OutOfRegion)
RRG_DEFINE_ERROR(PreconditionZ)
RRG_DEFINE_ERROR(ChartFailure)
RRG_DEFINE_ERROR(InvalidBumpSpec)
RRG_DEFINE_ERROR(SingularBlock)
RRG_DEFINE_ERROR(CholeskyFailure)
RRG_DEFINE_ERROR(FormatError)

#undef RRG_DEFINE_ERROR

// Raised by the integrator when a path leaves the region where the metric is defined.
class LeftDomain : public Error {
 public:
  LeftDomain(double t, const std::string& what)
      : Error("left domain at t=" + std::to_string(t) + ": " + what), time(t) {}
  const char* kind() const noexcept override { return "LeftDomain"; }
  double time;
};

}  // namespace rrg
