#pragma once

// Little-endian field readers/writers shared by the EVT1 and RGR1 codecs.

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "evrep/error.hpp"

namespace evrep::detail {

class ByteReader {
 public:
  explicit ByteReader(std::istream& in) : in_(in) {}

  void bytes(char* dst, std::size_t n, const char* what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got != n) throw TruncationError(what, offset_ + got);
    offset_ += n;
  }

  std::uint8_t u8(const char* what) { return static_cast<std::uint8_t>(unsigned_le(1, what)); }
  std::int8_t i8(const char* what) { return static_cast<std::int8_t>(unsigned_le(1, what)); }
  std::uint16_t u16(const char* what) { return static_cast<std::uint16_t>(unsigned_le(2, what)); }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(unsigned_le(4, what)); }
  std::int64_t i64(const char* what) { return static_cast<std::int64_t>(unsigned_le(8, what)); }

  double f64(const char* what) {
    const std::uint64_t bits = unsigned_le(8, what);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t unsigned_le(int n, const char* what) {
    unsigned char buf[8];
    bytes(reinterpret_cast<char*>(buf), static_cast<std::size_t>(n), what);
    std::uint64_t v = 0;
    for (int i = n - 1; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
  }

  std::istream& in_;
  std::uint64_t offset_ = 0;
};

class ByteWriter {
 public:
  explicit ByteWriter(std::ostream& out) : out_(out) {}

  void bytes(const char* src, std::size_t n) {
    out_.write(src, static_cast<std::streamsize>(n));
    count_ += n;
  }

  void i8(std::int8_t v) { unsigned_le(static_cast<std::uint8_t>(v), 1); }
  void u16(std::uint16_t v) { unsigned_le(v, 2); }
  void u32(std::uint32_t v) { unsigned_le(v, 4); }
  void i64(std::int64_t v) { unsigned_le(static_cast<std::uint64_t>(v), 8); }

  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof v);
    unsigned_le(bits, 8);
  }

  std::size_t count() const { return count_; }

 private:
  void unsigned_le(std::uint64_t v, int n) {
    char buf[8];
    for (int i = 0; i < n; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    bytes(buf, static_cast<std::size_t>(n));
  }

  std::ostream& out_;
  std::size_t count_ = 0;
};

}  // namespace evrep::detail
