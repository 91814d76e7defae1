#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evrep/events.hpp"

namespace evrep {

/// Grayscale intensity image, row-major, values nominally in [0, 1].
struct Image {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  Image() = default;
  Image(int h, int w, double fill = 0.0) : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {}

  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  /// Bilinear sample at fractional coordinates inside the image.
  double sample(double x, double y) const;
};

enum class TrajectoryShape { Vertical, Horizontal, SquareCCW };

std::string_view shape_name(TrajectoryShape shape);
std::optional<TrajectoryShape> parse_shape(std::string_view name);

/// Camera vibration. `amplitude_mm` is peak-to-peak for the sinusoidal shapes
/// and the diagonal length for the square.
struct TrajectoryConfig {
  TrajectoryShape shape = TrajectoryShape::SquareCCW;
  double frequency_hz = 5.0;
  double amplitude_mm = 3.0;
  double mm_to_px = 8.0;
  Micros duration = 50000;

  friend bool operator==(const TrajectoryConfig&, const TrajectoryConfig&) = default;
};

/// Monitor setting. Illuminance is carried as metadata only.
struct PhotometricConfig {
  double brightness_level = 50.0;  // 0..100
  double gamma = 1.0;
  double illuminance_lux = 0.0;

  friend bool operator==(const PhotometricConfig&, const PhotometricConfig&) = default;
};

struct SensorConfig {
  Geometry geometry{48, 64};
  double contrast_threshold = 0.2;  // log-intensity step
  Micros refractory = 0;
  Micros dt = 500;                  // sampling step
  std::uint64_t seed = 0;           // reserved; generation itself is deterministic
};

struct NoiseConfig {
  double ba_rate = 0.0;          // background events per pixel per second
  int hot_pixel_count = 0;
  double hot_rate = 0.0;         // events per second per hot pixel
  std::uint64_t seed = 0;
};

/// One row of the acquisition tables. Trajectory-only rows leave the
/// photometric part unset and vice versa; the original setting has both.
struct PerturbationConfig {
  std::string name;
  std::optional<TrajectoryConfig> trajectory;
  std::optional<PhotometricConfig> photometric;
};

struct PixelOffset {
  double dx = 0.0;
  double dy = 0.0;
};

/// Camera displacement in pixels at time t (microseconds).
PixelOffset trajectory_offset(const TrajectoryConfig& cfg, Micros t);

/// Largest |dx| and |dy| the trajectory can reach.
PixelOffset max_excursion(const TrajectoryConfig& cfg);

/// out = (brightness_level / 100) * in^gamma, clamped to [0, 1].
Image apply_photometrics(const Image& image, const PhotometricConfig& cfg);

/// Simulates a moving sensor over a still image. Every pixel samples the
/// displaced image each `dt`; an event is emitted whenever log(I + 1e-3)
/// moves a full contrast threshold away from the level at the pixel's last
/// event, with the crossing time interpolated inside the step.
EventStream generate_events(const Image& image, const TrajectoryConfig& traj, const PhotometricConfig& photo,
                            const SensorConfig& sensor);

/// Adds background activity (Poisson per pixel, random polarity) and hot
/// pixels (Poisson at fixed pixels with fixed polarity) over the stream window.
EventStream inject_noise(const EventStream& stream, const NoiseConfig& cfg);

/// The ten named settings: Original and Validation 1..9.
const std::vector<PerturbationConfig>& table_configs();
std::optional<PerturbationConfig> find_config(std::string_view name);

/// Full trajectory + photometric setting of a row; unset parts come from Original.
TrajectoryConfig resolved_trajectory(const PerturbationConfig& cfg);
PhotometricConfig resolved_photometric(const PerturbationConfig& cfg);

/// Parses a UTF-8 key=value config file (`#` comments). Keys: name, shape,
/// frequency, amplitude, mm_to_px, duration, brightness, gamma, illuminance.
/// Unset values come from Original.
PerturbationConfig read_config_file(const std::filesystem::path& path);

// Image files: binary PGM (P5, maxval <= 255) or the raw float32 grid
// (u32 height, u32 width, then height*width little-endian float32).
Image read_pgm(const std::filesystem::path& path);
void write_pgm(const Image& image, const std::filesystem::path& path);
Image read_f32(const std::filesystem::path& path);
void write_f32(const Image& image, const std::filesystem::path& path);
/// Dispatches on the file content: "P5" magic means PGM, anything else float32.
Image read_image(const std::filesystem::path& path);

}  // namespace evrep
