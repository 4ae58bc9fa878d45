#pragma once

#include <stdexcept>
#include <string>

namespace pararelax {

// Every library failure derives from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PARARELAX_ERROR(Name)                 \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  }

PARARELAX_ERROR(DomainError);
PARARELAX_ERROR(NonFiniteObjective);
PARARELAX_ERROR(DegenerateDenominator);
PARARELAX_ERROR(DegenerateInterval);
PARARELAX_ERROR(DegenerateDomain);
PARARELAX_ERROR(IterationLimit);
PARARELAX_ERROR(MinimumIntervalReached);
PARARELAX_ERROR(OutOfDomain);
PARARELAX_ERROR(DomainViolation);
PARARELAX_ERROR(UnsupportedOperation);
PARARELAX_ERROR(DomainMismatch);
PARARELAX_ERROR(DimensionTooLarge);
PARARELAX_ERROR(FormatError);

#undef PARARELAX_ERROR

// Parse failures carry the byte offset of the offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace pararelax
