#include "evrep/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numbers>
#include <random>

#include "evrep/error.hpp"

namespace evrep {

namespace {

constexpr double kLogEps = 1e-3;

void check_trajectory(const TrajectoryConfig& cfg) {
  if (!(cfg.frequency_hz > 0.0) || !std::isfinite(cfg.frequency_hz)) throw ArgumentError("frequency must be > 0");
  if (!(cfg.amplitude_mm >= 0.0) || !std::isfinite(cfg.amplitude_mm)) throw ArgumentError("amplitude must be >= 0");
  if (!(cfg.mm_to_px > 0.0) || !std::isfinite(cfg.mm_to_px)) throw ArgumentError("mm_to_px must be > 0");
  if (cfg.duration <= 0) throw ArgumentError("duration must be > 0");
}

// Half peak-to-peak excursion in pixels.
double half_amplitude_px(const TrajectoryConfig& cfg) { return cfg.amplitude_mm * cfg.mm_to_px / 2.0; }

}  // namespace

double Image::sample(double x, double y) const {
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double ax = x - fx0;
  const double ay = y - fy0;
  const double top = at(x0, y0) * (1.0 - ax) + at(x1, y0) * ax;
  const double bottom = at(x0, y1) * (1.0 - ax) + at(x1, y1) * ax;
  return top * (1.0 - ay) + bottom * ay;
}

std::string_view shape_name(TrajectoryShape shape) {
  switch (shape) {
    case TrajectoryShape::Vertical: return "vertical";
    case TrajectoryShape::Horizontal: return "horizontal";
    case TrajectoryShape::SquareCCW: return "square_ccw";
  }
  return "unknown";
}

std::optional<TrajectoryShape> parse_shape(std::string_view name) {
  for (auto s : {TrajectoryShape::Vertical, TrajectoryShape::Horizontal, TrajectoryShape::SquareCCW}) {
    if (shape_name(s) == name) return s;
  }
  return std::nullopt;
}

PixelOffset trajectory_offset(const TrajectoryConfig& cfg, Micros t) {
  const double a = half_amplitude_px(cfg);
  const double cycles = cfg.frequency_hz * static_cast<double>(t) * 1e-6;
  switch (cfg.shape) {
    case TrajectoryShape::Vertical: return {0.0, a * std::sin(2.0 * std::numbers::pi * cycles)};
    case TrajectoryShape::Horizontal: return {a * std::sin(2.0 * std::numbers::pi * cycles), 0.0};
    case TrajectoryShape::SquareCCW: {
      // Diagonal 2a, so the half side is a / sqrt(2). Image y points down:
      // bottom-left -> bottom-right -> top-right -> top-left, constant speed.
      const double h = a / std::numbers::sqrt2;
      static constexpr double corners[5][2] = {{-1, 1}, {1, 1}, {1, -1}, {-1, -1}, {-1, 1}};
      const double phase = 4.0 * (cycles - std::floor(cycles));
      const int edge = std::min(3, static_cast<int>(phase));
      const double u = phase - edge;
      return {h * (corners[edge][0] + u * (corners[edge + 1][0] - corners[edge][0])),
              h * (corners[edge][1] + u * (corners[edge + 1][1] - corners[edge][1]))};
    }
  }
  return {};
}

PixelOffset max_excursion(const TrajectoryConfig& cfg) {
  const double a = half_amplitude_px(cfg);
  switch (cfg.shape) {
    case TrajectoryShape::Vertical: return {0.0, a};
    case TrajectoryShape::Horizontal: return {a, 0.0};
    case TrajectoryShape::SquareCCW: return {a / std::numbers::sqrt2, a / std::numbers::sqrt2};
  }
  return {};
}

Image apply_photometrics(const Image& image, const PhotometricConfig& cfg) {
  if (!(cfg.brightness_level >= 0.0 && cfg.brightness_level <= 100.0)) {
    throw ArgumentError("brightness level must be in [0, 100]");
  }
  if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma)) throw ArgumentError("gamma must be > 0");
  Image out = image;
  const double gain = cfg.brightness_level / 100.0;
  for (double& v : out.values) v = std::clamp(gain * std::pow(std::clamp(v, 0.0, 1.0), cfg.gamma), 0.0, 1.0);
  return out;
}

EventStream generate_events(const Image& image, const TrajectoryConfig& traj, const PhotometricConfig& photo,
                            const SensorConfig& sensor) {
  check_trajectory(traj);
  const Geometry g = sensor.geometry;
  if (g.height <= 0 || g.width <= 0 || g.height > 65535 || g.width > 65535) throw ArgumentError("bad sensor geometry");
  if (!(sensor.contrast_threshold > 0.0)) throw ArgumentError("contrast threshold must be > 0");
  if (sensor.refractory < 0) throw ArgumentError("refractory period must be >= 0");
  if (sensor.dt <= 0) throw ArgumentError("time step must be > 0");
  const PixelOffset reach = max_excursion(traj);
  if (image.width - g.width < 2.0 * reach.dx || image.height - g.height < 2.0 * reach.dy) {
    throw ArgumentError("image " + std::to_string(image.height) + "x" + std::to_string(image.width) +
                        " too small for sensor plus trajectory excursion");
  }

  const Image scene = apply_photometrics(image, photo);
  const double ox = (image.width - g.width) / 2.0;
  const double oy = (image.height - g.height) / 2.0;
  auto log_level = [&](int x, int y, PixelOffset d) {
    const double sx = std::clamp(x + ox + d.dx, 0.0, image.width - 1.0);
    const double sy = std::clamp(y + oy + d.dy, 0.0, image.height - 1.0);
    return std::log(scene.sample(sx, sy) + kLogEps);
  };

  const std::size_t n = g.pixels();
  std::vector<double> reference(n), previous(n);
  std::vector<Micros> last_event(n, std::numeric_limits<Micros>::min() / 2);
  const PixelOffset start = trajectory_offset(traj, 0);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const auto i = static_cast<std::size_t>(y) * g.width + x;
      reference[i] = previous[i] = log_level(x, y, start);
    }
  }

  EventStream stream;
  stream.geometry = g;
  stream.t_start = 0;
  stream.t_end = traj.duration;
  const double theta = sensor.contrast_threshold;
  for (Micros t = sensor.dt; t <= traj.duration; t += sensor.dt) {
    const PixelOffset d = trajectory_offset(traj, t);
    const Micros t_prev = t - sensor.dt;
    for (int y = 0; y < g.height; ++y) {
      for (int x = 0; x < g.width; ++x) {
        const auto i = static_cast<std::size_t>(y) * g.width + x;
        const double level = log_level(x, y, d);
        const double from = previous[i];
        previous[i] = level;
        const double change = level - from;
        while (std::abs(level - reference[i]) >= theta) {
          const int sign = level > reference[i] ? 1 : -1;
          reference[i] += sign * theta;
          const double frac = change != 0.0 ? std::clamp((reference[i] - from) / change, 0.0, 1.0) : 1.0;
          const Micros te = t_prev + std::llround(frac * static_cast<double>(sensor.dt));
          if (te - last_event[i] < sensor.refractory) continue;
          last_event[i] = te;
          stream.events.push_back({static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), te,
                                   static_cast<std::int8_t>(sign)});
        }
      }
    }
  }
  std::stable_sort(stream.events.begin(), stream.events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
  return stream;
}

EventStream inject_noise(const EventStream& stream, const NoiseConfig& cfg) {
  if (!(cfg.ba_rate >= 0.0) || !(cfg.hot_rate >= 0.0) || cfg.hot_pixel_count < 0) {
    throw ArgumentError("noise rates and counts must be >= 0");
  }
  require_valid(stream);
  const Geometry g = stream.geometry;
  if (static_cast<std::size_t>(cfg.hot_pixel_count) > g.pixels()) {
    throw ArgumentError("more hot pixels than sensor pixels");
  }

  std::mt19937_64 rng(cfg.seed);
  const double seconds = static_cast<double>(stream.t_end - stream.t_start) * 1e-6;
  std::uniform_int_distribution<Micros> when(stream.t_start, stream.t_end);
  std::bernoulli_distribution coin(0.5);
  std::vector<Event> added;

  auto emit = [&](std::size_t pixel, double rate, std::optional<std::int8_t> fixed_polarity) {
    if (rate <= 0.0 || seconds <= 0.0) return;
    std::poisson_distribution<long long> count(rate * seconds);
    const long long k = count(rng);
    for (long long j = 0; j < k; ++j) {
      const auto p = fixed_polarity ? *fixed_polarity : static_cast<std::int8_t>(coin(rng) ? 1 : -1);
      added.push_back({static_cast<std::uint16_t>(pixel % g.width), static_cast<std::uint16_t>(pixel / g.width),
                       when(rng), p});
    }
  };

  for (std::size_t pixel = 0; pixel < g.pixels(); ++pixel) emit(pixel, cfg.ba_rate, std::nullopt);

  if (cfg.hot_pixel_count > 0) {
    // Partial Fisher-Yates: the first hot_pixel_count slots are a uniform sample.
    std::vector<std::size_t> order(g.pixels());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int k = 0; k < cfg.hot_pixel_count; ++k) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k), order.size() - 1);
      std::swap(order[static_cast<std::size_t>(k)], order[pick(rng)]);
    }
    for (int k = 0; k < cfg.hot_pixel_count; ++k) {
      const auto polarity = static_cast<std::int8_t>(coin(rng) ? 1 : -1);
      emit(order[static_cast<std::size_t>(k)], cfg.hot_rate, polarity);
    }
  }

  auto by_time = [](const Event& a, const Event& b) { return a.t < b.t; };
  std::stable_sort(added.begin(), added.end(), by_time);
  EventStream out;
  out.geometry = g;
  out.t_start = stream.t_start;
  out.t_end = stream.t_end;
  out.events.reserve(stream.events.size() + added.size());
  std::merge(stream.events.begin(), stream.events.end(), added.begin(), added.end(), std::back_inserter(out.events),
             by_time);
  return out;
}

const std::vector<PerturbationConfig>& table_configs() {
  using S = TrajectoryShape;
  auto traj = [](double f, double a, S shape) {
    TrajectoryConfig c;
    c.frequency_hz = f;
    c.amplitude_mm = a;
    c.shape = shape;
    return c;
  };
  auto photo = [](double level, double gamma, double lux) { return PhotometricConfig{level, gamma, lux}; };
  static const std::vector<PerturbationConfig> configs = {
      {"Original", traj(5, 3, S::SquareCCW), photo(50, 1, 70.00)},
      {"Validation 1", traj(8.33, 4.5, S::Vertical), std::nullopt},
      {"Validation 2", traj(5, 3, S::Horizontal), std::nullopt},
      {"Validation 3", traj(5, 6, S::Vertical), std::nullopt},
      {"Validation 4", traj(5, 6, S::Horizontal), std::nullopt},
      {"Validation 5", traj(5, 6, S::SquareCCW), std::nullopt},
      {"Validation 6", std::nullopt, photo(0, 0.7, 12.75)},
      {"Validation 7", std::nullopt, photo(0, 1, 23.38)},
      {"Validation 8", std::nullopt, photo(100, 1, 95.50)},
      {"Validation 9", std::nullopt, photo(100, 1.5, 111.00)},
  };
  return configs;
}

std::optional<PerturbationConfig> find_config(std::string_view name) {
  for (const auto& c : table_configs()) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

TrajectoryConfig resolved_trajectory(const PerturbationConfig& cfg) {
  return cfg.trajectory ? *cfg.trajectory : *table_configs().front().trajectory;
}

PhotometricConfig resolved_photometric(const PerturbationConfig& cfg) {
  return cfg.photometric ? *cfg.photometric : *table_configs().front().photometric;
}

}  // namespace evrep
