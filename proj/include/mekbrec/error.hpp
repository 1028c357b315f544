#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mekb {

// Input file missing or unreadable.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A record violates a load-time invariant (duplicate id, dangling reference).
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class LinkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss or parameters during optimization.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The user has no MeKB, so no embedding can be computed.
class ColdUserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mekb
