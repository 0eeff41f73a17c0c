#ifndef FPSHIELD_ERROR_H_
#define FPSHIELD_ERROR_H_

#include <stdexcept>
#include <string>

namespace fpshield {

// Base class for every error raised by the engine. Callers that only care
// about "the input was bad" can catch this; the CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (bad length, out-of-range
// value, malformed address, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A configuration or trace document failed validation. |location| is a
// JSON-pointer-like path to the offending element, e.g. "groups[2].weight".
class ConfigError : public Error {
 public:
  ConfigError(std::string location, const std::string& message)
      : Error(location.empty() ? message : location + ": " + message),
        location_(std::move(location)) {}

  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

// The platform could not provide something the engine cannot run without
// (entropy, sockets).
class SystemError : public Error {
 public:
  using Error::Error;
};

}  // namespace fpshield

#endif  // FPSHIELD_ERROR_H_
