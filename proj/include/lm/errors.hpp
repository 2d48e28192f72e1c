#pragma once

#include <stdexcept>
#include <string>

namespace lm {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// API misuse: mixed contexts, out-of-range numerators, malformed programs.
class UsageError : public Error {
public:
  using Error::Error;
};

// An exhaustive operation would exceed its configured cap.
class CapError : public Error {
public:
  using Error::Error;
};

// Malformed text input (rationals, expressions, program files).
class ParseError : public Error {
public:
  using Error::Error;
};

} // namespace lm
