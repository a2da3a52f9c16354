#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace haprtr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix shapes that do not agree.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A precondition on the arguments was violated (e.g. tangent vectors based
/// at different points).
class ContractError : public Error {
public:
  using Error::Error;
};

/// Out-of-range configuration or generation parameters.
class ParameterError : public Error {
public:
  using Error::Error;
};

class IndexError : public Error {
public:
  using Error::Error;
};

/// Transport between antipodal points has no unique minimizing geodesic.
class AntipodalError : public Error {
public:
  using Error::Error;
};

/// Degenerate input for which a method has nothing to work with.
class DegenerateInputError : public Error {
public:
  using Error::Error;
};

/// Non-finite value produced by an oracle during optimization.
class NumericError : public Error {
public:
  NumericError(const std::string &what, std::size_t iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::size_t iteration() const { return iteration_; }

private:
  std::size_t iteration_;
};

class IoError : public Error {
public:
  IoError(const std::string &what, std::string path)
      : Error(what + ": " + path), path_(std::move(path)) {}

  const std::string &path() const { return path_; }

private:
  std::string path_;
};

/// Malformed file contents; carries the 1-based line number.
class ParseError : public Error {
public:
  ParseError(const std::string &what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

namespace detail {

inline void require_same_size(std::ptrdiff_t a, std::ptrdiff_t b,
                              const char *where) {
  if (a != b)
    throw DimensionError(std::string(where) + ": length " + std::to_string(a) +
                         " does not match " + std::to_string(b));
}

} // namespace detail
} // namespace haprtr
