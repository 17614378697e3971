#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rnnlab {

// Tensor dimensions disagree with what an operation requires.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A binary or text input does not follow its declared format.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

// Dataset content is well-formed but semantically unusable.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value that must stay finite (loss, gradient) did not.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rnnlab
