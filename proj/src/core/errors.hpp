#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace levyfield {

enum class ErrorKind {
  Config,       // invalid configuration or measure specification
  Numeric,      // numeric failure (e.g. covariance not positive semidefinite)
  Fingerprint,  // inputs generated from different characteristic triples
  Argument,     // invalid argument to an operation
  Io,           // file could not be read or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {
template <typename... Parts>
std::string concat(const Parts&... parts) {
  std::ostringstream os;
  os.precision(17);
  (os << ... << parts);
  return os.str();
}
}  // namespace detail

template <typename... Parts>
[[noreturn]] void fail(ErrorKind kind, const Parts&... parts) {
  throw Error(kind, detail::concat(parts...));
}

template <typename... Parts>
void require(bool condition, ErrorKind kind, const Parts&... parts) {
  if (!condition) fail(kind, parts...);
}

}  // namespace levyfield
