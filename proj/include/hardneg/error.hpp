#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hardneg {

// Base for every domain error raised by the library. The CLI maps these to
// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// Raised by remote backends (LLM, encoder) on transport or protocol failure.
class BackendError : public Error {
 public:
  using Error::Error;
};

// Cosine of a zero vector.
class UndefinedSimilarityError : public Error {
 public:
  using Error::Error;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Malformed record in a line-delimited file.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : Error("line " + std::to_string(line) + ", field '" + field + "': " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Non-finite loss during training.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(long step)
      : Error("training diverged (non-finite loss) at step " + std::to_string(step)), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace hardneg
