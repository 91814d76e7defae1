#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "byte_io.hpp"
#include "evrep/error.hpp"
#include "evrep/simulate.hpp"

namespace evrep {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

// Next whitespace-separated PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  while (true) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) break;
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
      if (!token.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token += static_cast<char>(c);
  }
  return token;
}

int pgm_int(std::istream& in, const char* field) {
  const std::string token = pgm_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used == token.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw FormatError(std::string("bad PGM ") + field + " '" + token + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw FormatError("config key '" + key + "' has non-numeric value '" + value + "'");
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  if (pgm_token(in) != "P5") throw FormatError(path.string() + " is not a binary PGM (P5)");
  const int width = pgm_int(in, "width");
  const int height = pgm_int(in, "height");
  const int maxval = pgm_int(in, "maxval");
  if (maxval > 255) throw FormatError("only 8-bit PGM is supported");
  Image image(height, width);
  std::string raw(image.values.size(), '\0');
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw FormatError("truncated PGM pixel data");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    image.values[i] = static_cast<unsigned char>(raw[i]) / static_cast<double>(maxval);
  }
  return image;
}

void write_pgm(const Image& image, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  for (double v : image.values) {
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Image read_f32(const std::filesystem::path& path) {
  auto in = open_in(path);
  detail::ByteReader r(in);
  const auto height = r.u32("float32 image header");
  const auto width = r.u32("float32 image header");
  if (height == 0 || width == 0 || height > 65535 || width > 65535) throw FormatError("bad float32 image size");
  Image image(static_cast<int>(height), static_cast<int>(width));
  for (double& v : image.values) {
    const auto bits = r.u32("truncated float32 image data");
    float f;
    std::memcpy(&f, &bits, sizeof f);
    v = f;
  }
  return image;
}

void write_f32(const Image& image, const std::filesystem::path& path) {
  auto out = open_out(path);
  detail::ByteWriter w(out);
  w.u32(static_cast<std::uint32_t>(image.height));
  w.u32(static_cast<std::uint32_t>(image.width));
  for (double v : image.values) {
    const auto f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    w.u32(bits);
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Image read_image(const std::filesystem::path& path) {
  char magic[2] = {};
  {
    auto in = open_in(path);
    in.read(magic, 2);
  }
  if (magic[0] == 'P' && magic[1] == '5') return read_pgm(path);
  return read_f32(path);
}

PerturbationConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  const auto& original = table_configs().front();
  PerturbationConfig cfg;
  cfg.name = kv.count("name") ? kv["name"] : path.stem().string();
  TrajectoryConfig traj = *original.trajectory;
  PhotometricConfig photo = *original.photometric;
  bool has_traj = false, has_photo = false;
  for (const auto& [key, value] : kv) {
    if (key == "name") continue;
    if (key == "shape") {
      auto shape = parse_shape(value);
      if (!shape) throw FormatError("unknown trajectory shape '" + value + "'");
      traj.shape = *shape;
      has_traj = true;
    } else if (key == "frequency") {
      traj.frequency_hz = number(key, value);
      has_traj = true;
    } else if (key == "amplitude") {
      traj.amplitude_mm = number(key, value);
      has_traj = true;
    } else if (key == "mm_to_px") {
      traj.mm_to_px = number(key, value);
      has_traj = true;
    } else if (key == "duration") {
      traj.duration = static_cast<Micros>(number(key, value));
      has_traj = true;
    } else if (key == "brightness") {
      photo.brightness_level = number(key, value);
      has_photo = true;
    } else if (key == "gamma") {
      photo.gamma = number(key, value);
      has_photo = true;
    } else if (key == "illuminance") {
      photo.illuminance_lux = number(key, value);
      has_photo = true;
    } else {
      throw FormatError("unknown config key '" + key + "'");
    }
  }
  if (has_traj) cfg.trajectory = traj;
  if (has_photo) cfg.photometric = photo;
  return cfg;
}

}  // namespace evrep
