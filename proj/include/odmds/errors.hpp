#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace odmds {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input line. line is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string example_id, const std::string& what)
      : Error("example '" + example_id + "': " + what),
        example_id_(std::move(example_id)) {}
  const std::string& example_id() const { return example_id_; }

 private:
  std::string example_id_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class MissingField : public Error {
 public:
  using Error::Error;
};

class EmptyQuery : public Error {
 public:
  using Error::Error;
};

class MissingVector : public Error {
 public:
  using Error::Error;
};

class EmptyGold : public Error {
 public:
  using Error::Error;
};

class PoolExhausted : public Error {
 public:
  using Error::Error;
};

class TransformerUnavailable : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class RaggedMatrix : public Error {
 public:
  using Error::Error;
};

class BudgetTooSmall : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Gateway failures, raised after all retries are spent.
class GatewayError : public Error {
 public:
  using Error::Error;
};

class Timeout : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class ProtocolError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class RemoteError : public GatewayError {
 public:
  RemoteError(int status, const std::string& upstream)
      : GatewayError("remote error (HTTP " + std::to_string(status) +
                     "): " + upstream),
        status_(status),
        upstream_(upstream) {}
  int status() const { return status_; }
  const std::string& upstream_message() const { return upstream_; }

 private:
  int status_;
  std::string upstream_;
};

}  // namespace odmds
