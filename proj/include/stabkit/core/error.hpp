#pragma once

#include <stdexcept>
#include <string>

namespace stabkit {

// Base of every error raised by the library. The concrete type names the
// failure class; the CLI maps these onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define STABKIT_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  };

STABKIT_DEFINE_ERROR(FormatError)
STABKIT_DEFINE_ERROR(IntegrityError)
STABKIT_DEFINE_ERROR(ValidationError)
STABKIT_DEFINE_ERROR(RangeError)
STABKIT_DEFINE_ERROR(IoError)
STABKIT_DEFINE_ERROR(ShapeError)
STABKIT_DEFINE_ERROR(StateError)
STABKIT_DEFINE_ERROR(ConfigError)
STABKIT_DEFINE_ERROR(DegeneracyError)
STABKIT_DEFINE_ERROR(InsufficientDataError)
STABKIT_DEFINE_ERROR(TrackingError)

#undef STABKIT_DEFINE_ERROR

}  // namespace stabkit
