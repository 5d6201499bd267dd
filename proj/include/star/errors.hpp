#pragma once

#include <stdexcept>
#include <string>

namespace star {

// Base class for every error raised by the library. `kind()` is the stable
// identifier printed by the CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(const char* kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  const char* kind() const noexcept { return kind_; }

 private:
  const char* kind_;
};

#define STAR_DEFINE_ERROR(Name)                                       \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  };

STAR_DEFINE_ERROR(DimsError)
STAR_DEFINE_ERROR(NumericError)
STAR_DEFINE_ERROR(ParamError)
STAR_DEFINE_ERROR(ModeError)
STAR_DEFINE_ERROR(FormatError)
STAR_DEFINE_ERROR(ScheduleParseError)
STAR_DEFINE_ERROR(MetricUndefined)

#undef STAR_DEFINE_ERROR

}  // namespace star
