#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace deql {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Items with no interactions make every H^(i) singular unless a ridge term is
// present.
class ZeroColumnError : public Error {
 public:
  explicit ZeroColumnError(std::vector<std::size_t> items);

  const std::vector<std::size_t>& items() const { return items_; }

 private:
  std::vector<std::size_t> items_;
};

// A symmetric system that should have been positive definite was not.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& context, std::size_t column)
      : Error(context + ": system for column " + std::to_string(column) +
              " is not positive definite"),
        column_(column) {}

  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

class SingularUpdate : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace deql
