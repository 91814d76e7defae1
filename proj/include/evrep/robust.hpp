#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evrep/repr.hpp"
#include "evrep/simulate.hpp"

namespace evrep {

struct SsimParams {
  int window = 11;  // odd, >= 3
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

/// Mean structural similarity of two grids of equal geometry and channel
/// count. Local statistics use a uniform window over every position where it
/// fits entirely inside the grid (population variances); the per-channel means
/// are averaged with equal weight.
double ssim(const ReprGrid& a, const ReprGrid& b, const SsimParams& params = {});

/// Table-6 style grouping of a variant name: "trajectory-small" (Validation
/// 1, 2), "trajectory-big" (3, 4, 5), "brightness-small" (7, 8),
/// "brightness-big" (6, 9), "original" or "custom".
std::string variant_group(std::string_view variant);

inline constexpr std::string_view kVariantGroups[] = {"trajectory-small", "trajectory-big", "brightness-small",
                                                      "brightness-big"};

struct NamedImage {
  std::string name;
  Image image;
};

struct StudyOptions {
  SensorConfig sensor;
  NoiseConfig noise{0.5, 2, 40.0, 1};  // seed is the base; each image gets seed + index
  ReprParams repr;
  SsimParams ssim;
};

struct ConsistencyEntry {
  ReprKind kind;
  std::string variant;
  std::string group;
  double mean_ssim = 0.0;
  int n = 0;
};

struct GroupEntry {
  ReprKind kind;
  std::string group;
  double mean_ssim = 0.0;
  int n = 0;
};

/// Per-image provenance: the EVT1 digest of every generated stream.
struct SampleRecord {
  std::string name;
  std::uint64_t noise_seed = 0;
  std::vector<std::pair<std::string, std::uint64_t>> stream_digests;  // variant -> FNV-1a of EVT1 bytes
};

struct SampleFailure {
  std::string sample;
  std::string message;
};

struct ConsistencyReport {
  std::vector<ConsistencyEntry> entries;  // kinds outer, variants inner, in request order
  std::vector<GroupEntry> groups;         // only groups that received samples
  std::vector<SampleRecord> samples;
  std::vector<SampleFailure> failures;

  std::optional<double> mean(ReprKind kind, std::string_view variant) const;
  std::optional<double> group_mean(ReprKind kind, std::string_view group) const;
};

/// For every image, simulates the original setting and each variant with a
/// shared per-image noise seed, computes each representation and averages
/// SSIM(original, variant). Four-channel kinds (event_image) and the auxiliary
/// discount grid are skipped. Images that fail are recorded in `failures` and
/// left out of the means.
ConsistencyReport consistency_study(const std::vector<NamedImage>& images, const std::vector<ReprKind>& kinds,
                                    const std::vector<PerturbationConfig>& variants, const StudyOptions& options = {});

inline constexpr int kReportFormatVersion = 1;

/// `# evrep consistency report v1` then `kind,variant,group,mean_ssim,n`
/// rows; group aggregates follow with variant `*`.
void write_report_csv(const ConsistencyReport& report, std::ostream& out);
void write_report_json(const ConsistencyReport& report, std::ostream& out);

/// The synthetic corpus used by the consistency checks: 16 images of
/// checkerboards, edges, gradients and smoothed noise textures.
std::vector<NamedImage> synthetic_corpus(int height, int width, std::uint64_t seed = 7);

}  // namespace evrep
