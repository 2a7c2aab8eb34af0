#pragma once

#include <stdexcept>
#include <string>

namespace pcm {

// Malformed input files (vtree/circuit/dataset/model text). CLI exit code 3.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg) {}
};

// Violated query precondition (inconsistent evidence, vtree mismatch,
// non-alternating input, determinism violation hit at runtime, ...).
// CLI exit code 2.
class QueryError : public std::runtime_error {
 public:
  explicit QueryError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pcm
