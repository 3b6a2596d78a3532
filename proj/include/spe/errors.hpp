#pragma once

#include <stdexcept>
#include <string>

namespace spe {

enum class ErrorKind {
  parse,
  restriction,
  scope,
  domain,
  zero_probability,
  zero_density,
  unsupported_event,
  too_complex,
  numeric,
  io,
};

class SpeError : public std::runtime_error {
 public:
  SpeError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw SpeError(kind, what);
}

}  // namespace spe
