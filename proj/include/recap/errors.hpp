#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace recap {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivisionByZero : Error {
  DivisionByZero() : Error("division by zero") {}
  explicit DivisionByZero(const std::string& what) : Error(what) {}
};

/// Inconsistent configuration: mixed scalar backends, bad parameters, etc.
struct ConfigError : Error {
  using Error::Error;
};

struct PoleError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t pos)
      : Error(msg + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

/// A structural check on an R-matrix failed; `check` names it.
struct ValidationError : Error {
  ValidationError(std::string check_name, const std::string& msg)
      : Error(check_name + ": " + msg), check(std::move(check_name)) {}
  std::string check;
};

/// A configured size cap (rule count, degree, rank) was exceeded.
struct ResourceCapError : Error {
  using Error::Error;
};

/// A word exceeds the degree up to which a rewriting system is complete.
struct DegreeOverflow : ResourceCapError {
  using ResourceCapError::ResourceCapError;
};

/// Fixed-q sample point degenerates the rewriting system.
struct BadSpecialization : Error {
  using Error::Error;
};

}  // namespace recap
