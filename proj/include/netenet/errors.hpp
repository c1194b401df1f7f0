#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netenet {

enum class ErrorKind {
  InvalidInput,
  DegenerateKernel,
  DegenerateData,
  Singularity,
  Divergence,
  Schema,
  Parse,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::DegenerateKernel: return "degenerate_kernel";
    case ErrorKind::DegenerateData: return "degenerate_data";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

/// Base class for every error raised by the library. The kind is stable and
/// machine readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& m) : Error(ErrorKind::InvalidInput, m) {}
};

class DegenerateKernelError : public Error {
 public:
  explicit DegenerateKernelError(const std::string& m) : Error(ErrorKind::DegenerateKernel, m) {}
};

class DegenerateDataError : public Error {
 public:
  explicit DegenerateDataError(const std::string& m) : Error(ErrorKind::DegenerateData, m) {}
};

class SingularityError : public Error {
 public:
  SingularityError(int node, const std::string& m)
      : Error(ErrorKind::Singularity, m), node_(node) {}
  int node() const noexcept { return node_; }

 private:
  int node_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(int iteration, const std::string& m)
      : Error(ErrorKind::Divergence, m), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& m) : Error(ErrorKind::Schema, m) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& m)
      : Error(ErrorKind::Parse, m), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInputError(message);
}

}  // namespace detail

}  // namespace netenet
