#pragma once

#include <stdexcept>
#include <string>

namespace gbart {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidMove : public Error {
 public:
  using Error::Error;
};

/// A split rule names a variable outside the tree's group.
class GroupViolation : public Error {
 public:
  using Error::Error;
};

/// The response has fewer than two distinct values.
class DegenerateResponse : public Error {
 public:
  using Error::Error;
};

class InvalidPartition : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class InvalidCase : public Error {
 public:
  using Error::Error;
};

class InvalidFold : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace gbart
