#pragma once

#include <stdexcept>
#include <string>

namespace redlab {

// Base for every failure the library reports. Verdicts such as Invalid are
// values, not errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define REDLAB_DEFINE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

REDLAB_DEFINE_ERROR(InvalidAssignment);
REDLAB_DEFINE_ERROR(BackendUnavailable);
REDLAB_DEFINE_ERROR(TooLarge);
REDLAB_DEFINE_ERROR(NoWitness);
REDLAB_DEFINE_ERROR(SamplerStall);
REDLAB_DEFINE_ERROR(FieldMismatch);
REDLAB_DEFINE_ERROR(TooManyPoints);
REDLAB_DEFINE_ERROR(TooManyQubits);
REDLAB_DEFINE_ERROR(NotBijective);
REDLAB_DEFINE_ERROR(NoPreimage);
REDLAB_DEFINE_ERROR(Ambiguous);
REDLAB_DEFINE_ERROR(Unsupported);
REDLAB_DEFINE_ERROR(ParseError);
REDLAB_DEFINE_ERROR(ConfigError);

#undef REDLAB_DEFINE_ERROR

}  // namespace redlab
