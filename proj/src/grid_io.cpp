#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "byte_io.hpp"
#include "evrep/error.hpp"
#include "evrep/repr.hpp"

namespace evrep {

namespace {

constexpr char kMagic[4] = {'R', 'G', 'R', '1'};

std::string param_block(const ReprGrid& grid) {
  std::string block = "t_start=" + std::to_string(grid.t_start) + "\nt_end=" + std::to_string(grid.t_end);
  for (const auto& [key, value] : grid.params) {
    if (key.find_first_of("=\n") != std::string::npos || value.find('\n') != std::string::npos) {
      throw ArgumentError("parameter '" + key + "' cannot be encoded as a key=value line");
    }
    block += '\n' + key + '=' + value;
  }
  return block;
}

Micros parse_micros(const std::string& text, const char* key) {
  Micros v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError(std::string("bad RGR1 ") + key + " value '" + text + "'");
  }
  return v;
}

}  // namespace

std::size_t write_grid(const ReprGrid& grid, std::ostream& out) {
  constexpr int kMax = std::numeric_limits<std::uint16_t>::max();
  const auto& g = grid.geometry;
  if (g.height <= 0 || g.width <= 0 || g.height > kMax || g.width > kMax) throw ArgumentError("bad grid geometry");
  if (grid.channels <= 0 || grid.data.size() != static_cast<std::size_t>(grid.channels) * g.pixels()) {
    throw ArgumentError("grid data size does not match geometry and channel count");
  }
  const std::string block = param_block(grid);
  if (block.size() > static_cast<std::size_t>(kMax)) throw ArgumentError("RGR1 parameter block too long");

  detail::ByteWriter w(out);
  w.bytes(kMagic, 4);
  w.u16(static_cast<std::uint16_t>(grid.kind));
  w.u16(static_cast<std::uint16_t>(g.height));
  w.u16(static_cast<std::uint16_t>(g.width));
  w.u16(static_cast<std::uint16_t>(grid.channels));
  w.u16(static_cast<std::uint16_t>(block.size()));
  w.bytes(block.data(), block.size());
  for (double v : grid.data) w.f64(v);
  if (!out) throw IoError("write failed");
  return w.count();
}

std::size_t write_grid(const ReprGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto n = write_grid(grid, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
  return n;
}

ReprGrid read_grid(std::istream& in) {
  detail::ByteReader r(in);
  std::array<char, 4> magic{};
  r.bytes(magic.data(), magic.size(), "RGR1 header");
  if (!std::equal(magic.begin(), magic.end(), kMagic)) throw FormatError("bad RGR1 magic");

  ReprGrid grid;
  const auto kind = r.u16("RGR1 header");
  if (kind < 1 || kind > static_cast<std::uint16_t>(ReprKind::Discount)) {
    throw FormatError("unknown RGR1 kind id " + std::to_string(kind));
  }
  grid.kind = static_cast<ReprKind>(kind);
  grid.geometry.height = r.u16("RGR1 header");
  grid.geometry.width = r.u16("RGR1 header");
  grid.channels = r.u16("RGR1 header");
  if (grid.geometry.height == 0 || grid.geometry.width == 0 || grid.channels == 0) {
    throw FormatError("RGR1 dimensions must be positive");
  }
  std::string block(r.u16("RGR1 header"), '\0');
  r.bytes(block.data(), block.size(), "truncated RGR1 parameter block");

  std::istringstream lines(block);
  std::string line;
  bool have_start = false, have_end = false;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("RGR1 parameter line without '=': " + line);
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "t_start") {
      grid.t_start = parse_micros(value, "t_start");
      have_start = true;
    } else if (key == "t_end") {
      grid.t_end = parse_micros(value, "t_end");
      have_end = true;
    } else {
      grid.params.emplace_back(std::move(key), std::move(value));
    }
  }
  if (!have_start || !have_end) throw FormatError("RGR1 parameter block lacks window bounds");

  grid.data.resize(static_cast<std::size_t>(grid.channels) * grid.geometry.pixels());
  for (double& v : grid.data) v = r.f64("truncated RGR1 data");
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after RGR1 data");
  return grid;
}

ReprGrid read_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_grid(in);
}

}  // namespace evrep
