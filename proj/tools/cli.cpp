#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "evrep/error.hpp"
#include "evrep/events.hpp"
#include "evrep/manifest.hpp"
#include "evrep/parallel.hpp"
#include "evrep/repr.hpp"
#include "evrep/robust.hpp"
#include "evrep/simulate.hpp"

namespace evrep::cli {

namespace fs = std::filesystem;

namespace {

std::string valid_config_names() {
  std::string names;
  for (const auto& c : table_configs()) names += (names.empty() ? "" : ", ") + c.name;
  return names;
}

PerturbationConfig resolve_config(const std::string& name_or_file) {
  if (auto cfg = find_config(name_or_file)) return *cfg;
  if (fs::is_regular_file(name_or_file)) return read_config_file(name_or_file);
  throw ArgumentError("unknown config '" + name_or_file + "'; valid names: " + valid_config_names());
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

ReprKind resolve_kind(const std::string& name) {
  auto kind = parse_kind(name);
  if (!kind) {
    std::string names;
    for (ReprKind k : all_kinds()) names += (names.empty() ? "" : ", ") + std::string(kind_name(k));
    throw ArgumentError("unknown representation kind '" + name + "'; valid kinds: " + names);
  }
  return *kind;
}

// Sensor size that leaves room for the widest trajectory in the tables, so
// every named setting can run on the same image with the same geometry.
Geometry default_sensor(const Image& image, const TrajectoryConfig& chosen) {
  double margin_x = max_excursion(chosen).dx, margin_y = max_excursion(chosen).dy;
  for (const auto& c : table_configs()) {
    if (!c.trajectory) continue;
    TrajectoryConfig t = *c.trajectory;
    t.mm_to_px = chosen.mm_to_px;
    margin_x = std::max(margin_x, max_excursion(t).dx);
    margin_y = std::max(margin_y, max_excursion(t).dy);
  }
  Geometry g{image.height - 2 * static_cast<int>(std::ceil(margin_y)),
             image.width - 2 * static_cast<int>(std::ceil(margin_x))};
  if (g.height <= 0 || g.width <= 0) throw ArgumentError("image too small for the trajectory excursion");
  return g;
}

struct SensorFlags {
  int height = 0;
  int width = 0;
  double threshold = SensorConfig{}.contrast_threshold;
  Micros refractory = 0;
  Micros dt = SensorConfig{}.dt;
  double mm_to_px = TrajectoryConfig{}.mm_to_px;
  Micros duration = TrajectoryConfig{}.duration;

  void attach(CLI::App* app) {
    app->add_option("--height", height, "Sensor rows (default: image minus trajectory margin)")->check(CLI::NonNegativeNumber);
    app->add_option("--width", width, "Sensor columns (default: image minus trajectory margin)")->check(CLI::NonNegativeNumber);
    app->add_option("--threshold", threshold, "Log-intensity contrast threshold")->check(CLI::PositiveNumber);
    app->add_option("--refractory", refractory, "Refractory period, us")->check(CLI::NonNegativeNumber);
    app->add_option("--dt", dt, "Simulation time step, us")->check(CLI::PositiveNumber);
    app->add_option("--mm-to-px", mm_to_px, "Pixels per millimetre of camera travel")->check(CLI::PositiveNumber);
    app->add_option("--duration", duration, "Recording length, us")->check(CLI::PositiveNumber);
  }

  SensorConfig sensor(const Image& image, const TrajectoryConfig& traj, std::uint64_t seed) const {
    SensorConfig s;
    s.geometry = default_sensor(image, traj);
    if (height > 0) s.geometry.height = height;
    if (width > 0) s.geometry.width = width;
    s.contrast_threshold = threshold;
    s.refractory = refractory;
    s.dt = dt;
    s.seed = seed;
    return s;
  }

  void record(RunManifest& m, const SensorConfig& s) const {
    m.parameters.emplace_back("sensor_height", std::to_string(s.geometry.height));
    m.parameters.emplace_back("sensor_width", std::to_string(s.geometry.width));
    m.parameters.emplace_back("threshold", format_real(s.contrast_threshold));
    m.parameters.emplace_back("refractory", std::to_string(s.refractory));
    m.parameters.emplace_back("dt", std::to_string(s.dt));
  }
};

struct ReprFlags {
  ReprParams params;

  void attach(CLI::App* app) {
    app->add_option("--alpha", params.alpha, "Discount factor")->capture_default_str();
    app->add_option("--rho", params.rho, "Neighborhood radius (> 1)")->capture_default_str();
    app->add_option("--tau", params.tau, "Time-surface decay, us")->capture_default_str();
    app->add_option("--cell", params.cell, "HATS tile size")->capture_default_str();
    app->add_option("--tile", params.sort_tile, "Sorted time surface tile (0 = global)")->capture_default_str();
  }

  void record(RunManifest& m) const {
    m.parameters.emplace_back("alpha", format_real(params.alpha));
    m.parameters.emplace_back("rho", std::to_string(params.rho));
    m.parameters.emplace_back("tau", format_real(params.tau));
    m.parameters.emplace_back("cell", std::to_string(params.cell));
    m.parameters.emplace_back("sort_tile", std::to_string(params.sort_tile));
  }
};

struct NoiseFlags {
  NoiseConfig noise;

  void attach(CLI::App* app) {
    app->add_option("--ba-rate", noise.ba_rate, "Background activity, events/pixel/s")->check(CLI::NonNegativeNumber);
    app->add_option("--hot-count", noise.hot_pixel_count, "Number of hot pixels")->check(CLI::NonNegativeNumber);
    app->add_option("--hot-rate", noise.hot_rate, "Events/s per hot pixel")->check(CLI::NonNegativeNumber);
  }

  void record(RunManifest& m) const {
    m.parameters.emplace_back("ba_rate", format_real(noise.ba_rate));
    m.parameters.emplace_back("hot_pixel_count", std::to_string(noise.hot_pixel_count));
    m.parameters.emplace_back("hot_rate", format_real(noise.hot_rate));
    m.parameters.emplace_back("seed", std::to_string(noise.seed));
  }
};

void record_config(RunManifest& m, const PerturbationConfig& cfg, const TrajectoryConfig& t,
                   const PhotometricConfig& p) {
  m.parameters.emplace_back("config", cfg.name);
  m.parameters.emplace_back("shape", std::string(shape_name(t.shape)));
  m.parameters.emplace_back("frequency_hz", format_real(t.frequency_hz));
  m.parameters.emplace_back("amplitude_mm", format_real(t.amplitude_mm));
  m.parameters.emplace_back("mm_to_px", format_real(t.mm_to_px));
  m.parameters.emplace_back("duration", std::to_string(t.duration));
  m.parameters.emplace_back("brightness_level", format_real(p.brightness_level));
  m.parameters.emplace_back("gamma", format_real(p.gamma));
  m.parameters.emplace_back("illuminance_lux", format_real(p.illuminance_lux));
}

void require_out(const std::string& out) {
  if (out.empty()) throw ArgumentError("missing output path");
}

// Library check of representation parameters before any file is touched.
void precheck(ReprKind kind, const ReprParams& p) {
  if ((kind == ReprKind::Dit || kind == ReprKind::Dist) && p.rho < 2) {
    throw ArgumentError("rho must be > 1 for " + std::string(kind_name(kind)) + ", got " + std::to_string(p.rho));
  }
  if ((kind == ReprKind::Dit || kind == ReprKind::Dist) && !(p.alpha >= 0.0)) throw ArgumentError("alpha must be >= 0");
  if ((kind == ReprKind::TimeSurface || kind == ReprKind::Hats) && !(p.tau > 0.0)) throw ArgumentError("tau must be > 0");
  if (kind == ReprKind::Hats && p.cell < 1) throw ArgumentError("cell must be >= 1");
  if (kind == ReprKind::SortedTimeSurface && p.sort_tile < 0) throw ArgumentError("tile must be >= 0");
}

std::vector<fs::path> corpus_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("corpus directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".f32")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event-camera representations, simulation and robustness studies", "evrep"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // gen
  auto* gen = app.add_subcommand("gen", "Simulate an event stream from a still image");
  std::string gen_image, gen_config = "Original", gen_out;
  std::uint64_t gen_seed = 0;
  SensorFlags gen_sensor;
  gen->add_option("image", gen_image, "Input image (PGM P5 or float32 grid)")->required();
  gen->add_option("config,--config", gen_config, "Named setting (Original, Validation 1..9) or key=value file");
  gen->add_option("seed,--seed", gen_seed, "Seed");
  gen->add_option("out,--out", gen_out, "Output EVT1 file");
  gen_sensor.attach(gen);

  // repr
  auto* repr = app.add_subcommand("repr", "Compute a representation of an EVT1 stream");
  std::string repr_stream, repr_kind, repr_out;
  ReprFlags repr_flags;
  repr->add_option("stream", repr_stream, "Input EVT1 file")->required();
  repr->add_option("kind", repr_kind, "binary|histogram|timestamp|event_image|time_surface|hats|sorted_ts|dit|dist")
      ->required();
  repr->add_option("out,--out", repr_out, "Output RGR1 file");
  repr_flags.attach(repr);

  // compare
  auto* compare = app.add_subcommand("compare", "SSIM between two RGR1 grids");
  std::string cmp_a, cmp_b;
  SsimParams ssim_params;
  compare->add_option("a", cmp_a, "First RGR1 file")->required();
  compare->add_option("b", cmp_b, "Second RGR1 file")->required();
  compare->add_option("--window", ssim_params.window, "SSIM window (odd)")->capture_default_str();

  // inject
  auto* inject = app.add_subcommand("inject", "Add background activity and hot pixels to a stream");
  std::string inj_stream, inj_out;
  NoiseFlags inj_noise;
  inject->add_option("stream", inj_stream, "Input EVT1 file")->required();
  inject->add_option("out,--out", inj_out, "Output EVT1 file");
  inject->add_option("--seed", inj_noise.noise.seed, "Seed");
  inj_noise.attach(inject);

  // study
  auto* study = app.add_subcommand("study", "Representation consistency across perturbations");
  std::string study_dir, study_out, study_kinds, study_variants;
  ReprFlags study_repr;
  SensorFlags study_sensor;
  NoiseFlags study_noise;
  study_noise.noise = StudyOptions{}.noise;
  study->add_option("corpus", study_dir, "Directory of .pgm / .f32 images")->required();
  study->add_option("out,--out", study_out, "Output directory");
  study->add_option("--kinds", study_kinds, "Comma-separated kinds (default: all two-channel kinds)");
  study->add_option("--variants", study_variants, "Comma-separated setting names or files (default: Validation 1..9)");
  study->add_option("--window", ssim_params.window, "SSIM window (odd)")->capture_default_str();
  study->add_option("--seed", study_noise.noise.seed, "Base noise seed")->capture_default_str();
  study_repr.attach(study);
  study_sensor.attach(study);
  study_noise.attach(study);

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Write the 16-image synthetic corpus as PGM files");
  std::string corpus_out;
  int corpus_h = 112, corpus_w = 128;
  std::uint64_t corpus_seed = 7;
  corpus->add_option("out,--out", corpus_out, "Output directory")->required();
  corpus->add_option("--height", corpus_h, "Image rows")->capture_default_str();
  corpus->add_option("--width", corpus_w, "Image columns")->capture_default_str();
  corpus->add_option("--seed", corpus_seed, "Texture seed")->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  RunManifest manifest;
  manifest.command_line = args;
  try {
    if (*gen) {
      require_out(gen_out);
      const auto cfg = resolve_config(gen_config);
      TrajectoryConfig traj = resolved_trajectory(cfg);
      traj.mm_to_px = gen_sensor.mm_to_px;
      if (!cfg.trajectory || gen->count("--duration") > 0) traj.duration = gen_sensor.duration;
      const PhotometricConfig photo = resolved_photometric(cfg);
      const Image image = read_image(gen_image);
      const SensorConfig sensor = gen_sensor.sensor(image, traj, gen_seed);
      const EventStream stream = generate_events(image, traj, photo, sensor);
      write_stream(stream, fs::path(gen_out));
      record_config(manifest, cfg, traj, photo);
      gen_sensor.record(manifest, sensor);
      manifest.parameters.emplace_back("seed", std::to_string(gen_seed));
      manifest.add_input(gen_image);
      if (fs::is_regular_file(gen_config)) manifest.add_input(gen_config);
      manifest.add_output(gen_out);
      manifest.write(manifest_path_for(gen_out));
      out << "wrote " << stream.size() << " events to " << gen_out << "\n";
    } else if (*repr) {
      const ReprKind kind = resolve_kind(repr_kind);
      precheck(kind, repr_flags.params);
      require_out(repr_out);
      const EventStream stream = read_stream(fs::path(repr_stream));
      const ReprGrid grid = compute(kind, stream, repr_flags.params);
      write_grid(grid, fs::path(repr_out));
      manifest.parameters.emplace_back("kind", std::string(kind_name(kind)));
      repr_flags.record(manifest);
      manifest.add_input(repr_stream);
      manifest.add_output(repr_out);
      manifest.write(manifest_path_for(repr_out));
    } else if (*compare) {
      const ReprGrid a = read_grid(fs::path(cmp_a));
      const ReprGrid b = read_grid(fs::path(cmp_b));
      const double value = ssim(a, b, ssim_params);
      out << "ssim=" << std::fixed << std::setprecision(6) << value << "\n";
    } else if (*inject) {
      require_out(inj_out);
      const EventStream stream = read_stream(fs::path(inj_stream));
      const EventStream noisy = inject_noise(stream, inj_noise.noise);
      write_stream(noisy, fs::path(inj_out));
      inj_noise.record(manifest);
      manifest.add_input(inj_stream);
      manifest.add_output(inj_out);
      manifest.write(manifest_path_for(inj_out));
      out << "added " << noisy.size() - stream.size() << " noise events\n";
    } else if (*study) {
      require_out(study_out);
      std::vector<ReprKind> kinds;
      for (const auto& name : split_list(study_kinds)) kinds.push_back(resolve_kind(name));
      if (kinds.empty()) {
        for (ReprKind k : all_kinds()) {
          if (k != ReprKind::EventImage) kinds.push_back(k);
        }
      }
      for (ReprKind k : kinds) precheck(k, study_repr.params);
      std::vector<PerturbationConfig> variants;
      for (const auto& name : split_list(study_variants)) variants.push_back(resolve_config(name));
      if (variants.empty()) variants.assign(table_configs().begin() + 1, table_configs().end());

      const auto files = corpus_files(study_dir);
      if (files.empty()) throw ArgumentError("empty corpus");
      std::vector<NamedImage> images;
      for (const auto& f : files) images.push_back({f.filename().string(), read_image(f)});

      StudyOptions options;
      options.repr = study_repr.params;
      options.ssim = ssim_params;
      options.noise = study_noise.noise;
      TrajectoryConfig widest = resolved_trajectory(*find_config("Original"));
      widest.mm_to_px = study_sensor.mm_to_px;
      options.sensor = study_sensor.sensor(images.front().image, widest, study_noise.noise.seed);
      if (study_sensor.mm_to_px != TrajectoryConfig{}.mm_to_px || study->count("--duration") > 0) {
        for (auto& v : variants) {
          if (!v.trajectory) v.trajectory = resolved_trajectory(v);
          v.trajectory->mm_to_px = study_sensor.mm_to_px;
          v.trajectory->duration = study_sensor.duration;
        }
      }
      const ConsistencyReport report = consistency_study(images, kinds, variants, options);

      fs::create_directories(fs::path(study_out) / "samples");
      const fs::path csv_path = fs::path(study_out) / "report.csv";
      const fs::path json_path = fs::path(study_out) / "report.json";
      {
        std::ofstream csv(csv_path);
        write_report_csv(report, csv);
        std::ofstream json(json_path);
        write_report_json(report, json);
        if (!csv || !json) throw IoError("cannot write study reports to " + study_out);
      }
      study_repr.record(manifest);
      study_sensor.record(manifest, options.sensor);
      study_noise.record(manifest);
      manifest.parameters.emplace_back("ssim_window", std::to_string(ssim_params.window));
      for (const auto& f : files) manifest.add_input(f);
      manifest.add_output(csv_path);
      manifest.add_output(json_path);
      manifest.write(fs::path(study_out) / "study.manifest.json");

      for (std::size_t i = 0; i < report.samples.size(); ++i) {
        const auto& sample = report.samples[i];
        RunManifest m;
        m.command_line = args;
        m.parameters.emplace_back("noise_seed", std::to_string(sample.noise_seed));
        for (const auto& [variant, digest] : sample.stream_digests) {
          m.parameters.emplace_back("stream_fnv1a64:" + variant, hex_digest(digest));
        }
        m.add_input(files[i]);
        m.write(fs::path(study_out) / "samples" / (sample.name + ".manifest.json"));
      }
      for (const auto& f : report.failures) err << "sample " << f.sample << " failed: " << f.message << "\n";
      out << "study: " << images.size() << " images, " << variants.size() << " variants, " << report.failures.size()
          << " failures\n";
      if (!report.failures.empty()) return kValidation;
    } else if (*corpus) {
      fs::create_directories(corpus_out);
      for (const auto& img : synthetic_corpus(corpus_h, corpus_w, corpus_seed)) {
        write_pgm(img.image, fs::path(corpus_out) / (img.name + ".pgm"));
      }
    }
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << "\n";
    return kValidation;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}

}  // namespace evrep::cli
