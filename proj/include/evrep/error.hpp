#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace evrep {

/// Bad caller-supplied argument (out-of-range parameter, mismatched shapes).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure opening, reading or writing a file or stream.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed on-disk data (bad magic, unsupported version, bad field value).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input ended before a complete header or record could be read.
class TruncationError : public FormatError {
 public:
  TruncationError(const std::string& what, std::uint64_t offset)
      : FormatError(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Data that parsed correctly but violates a stream invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace evrep
