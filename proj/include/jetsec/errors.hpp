#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jetsec {

// Bad input data: jet families that violate ordering constraints, malformed
// files, out-of-domain arguments.  CLI maps these to exit code 1.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numeric procedure failed to converge or hit a pole/overflow.  Exit code 2.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Formula-language syntax error.  `offset` is a byte offset into the source
// string.  Exit code 3.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace jetsec
