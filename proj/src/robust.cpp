#include "evrep/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <json.hpp>

#include "evrep/error.hpp"
#include "evrep/manifest.hpp"
#include "evrep/parallel.hpp"

namespace evrep {

namespace {

// Mean local SSIM of one channel. Window sums are formed directly (no running
// subtraction) in two separable passes.
double channel_ssim(std::span<const double> a, std::span<const double> b, int H, int W, const SsimParams& p) {
  const int w = p.window;
  const int out_w = W - w + 1;
  const int out_h = H - w + 1;
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
  const double area = static_cast<double>(w) * w;

  // Horizontal pass: moments summed over w columns, H x out_w each.
  const std::size_t row_cells = static_cast<std::size_t>(H) * out_w;
  std::vector<double> sa(row_cells), sb(row_cells), saa(row_cells), sbb(row_cells), sab(row_cells);
  parallel_for(0, static_cast<std::size_t>(H), [&](std::size_t y) {
    for (int x0 = 0; x0 < out_w; ++x0) {
      double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
      for (int dx = 0; dx < w; ++dx) {
        const std::size_t i = y * static_cast<std::size_t>(W) + static_cast<std::size_t>(x0 + dx);
        const double va = a[i], vb = b[i];
        ma += va;
        mb += vb;
        maa += va * va;
        mbb += vb * vb;
        mab += va * vb;
      }
      const std::size_t o = y * static_cast<std::size_t>(out_w) + static_cast<std::size_t>(x0);
      sa[o] = ma;
      sb[o] = mb;
      saa[o] = maa;
      sbb[o] = mbb;
      sab[o] = mab;
    }
  });

  std::vector<double> row_totals(static_cast<std::size_t>(out_h), 0.0);
  parallel_for(0, static_cast<std::size_t>(out_h), [&](std::size_t y0) {
    double total = 0.0;
    for (int x0 = 0; x0 < out_w; ++x0) {
      double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
      for (int dy = 0; dy < w; ++dy) {
        const std::size_t o = (y0 + static_cast<std::size_t>(dy)) * static_cast<std::size_t>(out_w) +
                              static_cast<std::size_t>(x0);
        ma += sa[o];
        mb += sb[o];
        maa += saa[o];
        mbb += sbb[o];
        mab += sab[o];
      }
      const double mu_a = ma / area, mu_b = mb / area;
      const double var_a = maa / area - mu_a * mu_a;
      const double var_b = mbb / area - mu_b * mu_b;
      const double cov = mab / area - mu_a * mu_b;
      total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
    }
    row_totals[y0] = total;
  });

  double sum = 0.0;
  for (double t : row_totals) sum += t;
  return sum / (static_cast<double>(out_h) * out_w);
}

}  // namespace

double ssim(const ReprGrid& a, const ReprGrid& b, const SsimParams& params) {
  if (a.geometry != b.geometry || a.channels != b.channels) {
    throw ArgumentError("SSIM needs grids of equal geometry and channel count");
  }
  if (params.window < 3 || params.window % 2 == 0) throw ArgumentError("SSIM window must be odd and >= 3");
  if (params.window > a.geometry.height || params.window > a.geometry.width) {
    throw ArgumentError("SSIM window larger than the grid");
  }
  if (!(params.k1 > 0.0) || !(params.k2 > 0.0) || !(params.dynamic_range > 0.0)) {
    throw ArgumentError("SSIM constants must be positive");
  }
  double sum = 0.0;
  for (int c = 0; c < a.channels; ++c) {
    sum += channel_ssim(a.channel(c), b.channel(c), a.geometry.height, a.geometry.width, params);
  }
  return sum / a.channels;
}

std::string variant_group(std::string_view variant) {
  if (variant == "Original") return "original";
  if (variant == "Validation 1" || variant == "Validation 2") return "trajectory-small";
  if (variant == "Validation 3" || variant == "Validation 4" || variant == "Validation 5") return "trajectory-big";
  if (variant == "Validation 7" || variant == "Validation 8") return "brightness-small";
  if (variant == "Validation 6" || variant == "Validation 9") return "brightness-big";
  return "custom";
}

std::optional<double> ConsistencyReport::mean(ReprKind kind, std::string_view variant) const {
  for (const auto& e : entries) {
    if (e.kind == kind && e.variant == variant && e.n > 0) return e.mean_ssim;
  }
  return std::nullopt;
}

std::optional<double> ConsistencyReport::group_mean(ReprKind kind, std::string_view group) const {
  for (const auto& g : groups) {
    if (g.kind == kind && g.group == group && g.n > 0) return g.mean_ssim;
  }
  return std::nullopt;
}

ConsistencyReport consistency_study(const std::vector<NamedImage>& images, const std::vector<ReprKind>& requested,
                                    const std::vector<PerturbationConfig>& variants, const StudyOptions& options) {
  if (images.empty()) throw ArgumentError("empty corpus");
  if (variants.empty()) throw ArgumentError("no variants requested");
  std::vector<ReprKind> kinds;
  for (ReprKind k : requested) {
    if (k == ReprKind::EventImage || k == ReprKind::Discount) continue;
    if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
  }
  if (kinds.empty()) throw ArgumentError("no comparable two-channel kinds requested");

  const auto original = *find_config("Original");
  const std::size_t n_img = images.size();
  const std::size_t n_cfg = variants.size() + 1;  // slot 0 is the original setting
  auto config_at = [&](std::size_t c) -> const PerturbationConfig& { return c == 0 ? original : variants[c - 1]; };

  struct Slot {
    std::vector<ReprGrid> grids;  // one per kind
    std::uint64_t digest = 0;
    std::string error;
  };
  std::vector<Slot> slots(n_img * n_cfg);
  parallel_for(0, slots.size(), [&](std::size_t job) {
    const std::size_t i = job / n_cfg;
    const std::size_t c = job % n_cfg;
    Slot& slot = slots[job];
    try {
      const auto& cfg = config_at(c);
      NoiseConfig noise = options.noise;
      noise.seed = options.noise.seed + i;
      EventStream s = generate_events(images[i].image, resolved_trajectory(cfg), resolved_photometric(cfg),
                                      options.sensor);
      s = inject_noise(s, noise);
      slot.digest = fnv1a64(encode_stream(s));
      for (ReprKind k : kinds) slot.grids.push_back(compute(k, s, options.repr));
    } catch (const std::exception& e) {
      slot.error = config_at(c).name + ": " + e.what();
    }
  });

  ConsistencyReport report;
  std::vector<bool> failed(n_img, false);
  for (std::size_t i = 0; i < n_img; ++i) {
    SampleRecord record{images[i].name, options.noise.seed + i, {}};
    for (std::size_t c = 0; c < n_cfg; ++c) {
      const Slot& slot = slots[i * n_cfg + c];
      if (!slot.error.empty()) {
        failed[i] = true;
        report.failures.push_back({images[i].name, slot.error});
      } else {
        record.stream_digests.emplace_back(config_at(c).name, slot.digest);
      }
    }
    report.samples.push_back(std::move(record));
  }

  // ssim_values[(i * n_variants + v) * n_kinds + k]
  const std::size_t n_var = variants.size();
  std::vector<double> values(n_img * n_var * kinds.size(), 0.0);
  parallel_for(0, values.size(), [&](std::size_t job) {
    const std::size_t k = job % kinds.size();
    const std::size_t v = (job / kinds.size()) % n_var;
    const std::size_t i = job / (kinds.size() * n_var);
    if (failed[i]) return;
    values[job] = ssim(slots[i * n_cfg].grids[k], slots[i * n_cfg + v + 1].grids[k], options.ssim);
  });

  for (std::size_t k = 0; k < kinds.size(); ++k) {
    for (std::size_t v = 0; v < n_var; ++v) {
      ConsistencyEntry e{kinds[k], variants[v].name, variant_group(variants[v].name), 0.0, 0};
      double sum = 0.0;
      for (std::size_t i = 0; i < n_img; ++i) {
        if (failed[i]) continue;
        sum += values[(i * n_var + v) * kinds.size() + k];
        ++e.n;
      }
      e.mean_ssim = e.n > 0 ? sum / e.n : 0.0;
      report.entries.push_back(std::move(e));
    }
    for (std::string_view group : kVariantGroups) {
      GroupEntry g{kinds[k], std::string(group), 0.0, 0};
      double sum = 0.0;
      for (std::size_t v = 0; v < n_var; ++v) {
        if (variant_group(variants[v].name) != group) continue;
        for (std::size_t i = 0; i < n_img; ++i) {
          if (failed[i]) continue;
          sum += values[(i * n_var + v) * kinds.size() + k];
          ++g.n;
        }
      }
      if (g.n == 0) continue;
      g.mean_ssim = sum / g.n;
      report.groups.push_back(std::move(g));
    }
  }
  return report;
}

void write_report_csv(const ConsistencyReport& report, std::ostream& out) {
  out << "# evrep consistency report v" << kReportFormatVersion << "\n";
  out << "kind,variant,group,mean_ssim,n\n";
  auto row = [&](ReprKind kind, const std::string& variant, const std::string& group, double mean, int n) {
    out << kind_name(kind) << ',' << variant << ',' << group << ',' << format_real(mean) << ',' << n << '\n';
  };
  for (const auto& e : report.entries) row(e.kind, e.variant, e.group, e.mean_ssim, e.n);
  for (const auto& g : report.groups) row(g.kind, "*", g.group, g.mean_ssim, g.n);
}

void write_report_json(const ConsistencyReport& report, std::ostream& out) {
  nlohmann::ordered_json j;
  j["format"] = "evrep.consistency";
  j["version"] = kReportFormatVersion;
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"kind", kind_name(e.kind)}, {"variant", e.variant}, {"group", e.group},
                       {"mean_ssim", e.mean_ssim}, {"n", e.n}});
  }
  j["entries"] = entries;
  auto groups = nlohmann::ordered_json::array();
  for (const auto& g : report.groups) {
    groups.push_back({{"kind", kind_name(g.kind)}, {"group", g.group}, {"mean_ssim", g.mean_ssim}, {"n", g.n}});
  }
  j["groups"] = groups;
  auto failures = nlohmann::ordered_json::array();
  for (const auto& f : report.failures) failures.push_back({{"sample", f.sample}, {"message", f.message}});
  j["failures"] = failures;
  out << j.dump(2) << '\n';
}

std::vector<NamedImage> synthetic_corpus(int height, int width, std::uint64_t seed) {
  if (height < 8 || width < 8) throw ArgumentError("corpus images must be at least 8x8");
  std::vector<NamedImage> corpus;
  auto make = [&](std::string name, auto&& fn) {
    Image img(height, width);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) img.at(x, y) = std::clamp(fn(x, y), 0.0, 1.0);
    }
    corpus.push_back({std::move(name), std::move(img)});
  };
  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;

  for (int cell : {5, 8, 12, 19}) {
    make("checker_" + std::to_string(cell), [cell](int x, int y) { return ((x / cell + y / cell) % 2) ? 0.85 : 0.15; });
  }
  make("edge_vertical", [&](int x, int) { return x < cx ? 0.2 : 0.8; });
  make("edge_horizontal", [&](int, int y) { return y < cy ? 0.75 : 0.25; });
  make("edge_diagonal", [&](int x, int y) { return (x - cx) + 0.6 * (y - cy) < 0 ? 0.3 : 0.9; });
  make("disc", [&](int x, int y) { return std::hypot(x - cx, y - cy) < 0.3 * std::min(width, height) ? 0.85 : 0.2; });

  make("gradient_horizontal", [&](int x, int) { return 0.1 + 0.8 * x / (width - 1.0); });
  make("gradient_vertical", [&](int, int y) { return 0.9 - 0.8 * y / (height - 1.0); });
  make("gradient_radial", [&](int x, int y) { return 0.9 - 0.8 * std::hypot(x - cx, y - cy) / std::hypot(cx, cy); });
  make("gradient_sinusoid", [&](int x, int y) {
    return 0.5 + 0.35 * std::sin(2 * std::numbers::pi * (x / 23.0)) * std::cos(2 * std::numbers::pi * (y / 31.0));
  });

  // Value noise: uniform samples on a coarse lattice, bilinearly upsampled.
  for (int scale : {3, 6, 10, 16}) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(scale));
    std::uniform_real_distribution<double> u(0.1, 0.9);
    const int lh = height / scale + 2;
    const int lw = width / scale + 2;
    Image lattice(lh, lw);
    for (double& v : lattice.values) v = u(rng);
    make("texture_" + std::to_string(scale), [&](int x, int y) {
      return lattice.sample(static_cast<double>(x) / scale, static_cast<double>(y) / scale);
    });
  }
  return corpus;
}

}  // namespace evrep
