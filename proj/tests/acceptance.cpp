// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "evrep/events.hpp"
#include "evrep/manifest.hpp"
#include "evrep/neighborhood.hpp"
#include "evrep/repr.hpp"
#include "evrep/robust.hpp"
#include "evrep/simulate.hpp"
#include "oracle.hpp"
#include "random_stream.hpp"

using namespace evrep;
using evrep::testing::affine;
using evrep::testing::random_stream;
namespace fs = std::filesystem;
using Rational = boost::multiprecision::cpp_rational;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, double limit_s, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) {
    o.pass = false;
    o.detail += "; over time limit";
  }
  if (!o.pass) ++failures;
  std::printf("%s %s %s: %s (%.2f s)\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// AC1 ---------------------------------------------------------------------

Outcome oracle_equivalence() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> side(8, 32), events(0, 500), rho_pick(2, 4), cell_pick(1, 8);
  const double alphas[] = {0.0, 0.5, 1.0, 5.0, 37.25, 1e-3};
  const int instances = 520;
  double max_err = 0.0;
  int mismatches = 0;
  for (int i = 0; i < instances; ++i) {
    const Geometry g{side(rng), side(rng)};
    const auto s = random_stream(rng, g, events(rng), i * 37, i % 3 == 0 ? 300 : 200000);
    ReprParams p;
    p.alpha = alphas[i % 6];
    p.rho = rho_pick(rng);
    p.tau = 1000.0 + 97.0 * i;
    p.cell = cell_pick(rng);
    p.sort_tile = i % 4 == 0 ? 5 : 0;

    const int stat_rho = i % 5;
    if (!(compute_stats(s, stat_rho) == oracle::brute_stats(s, stat_rho))) ++mismatches;

    for (ReprKind k : all_kinds()) {
      const auto prod = compute(k, s, p);
      const auto ref = oracle::brute_repr(s, k, p);
      if (prod.data.size() != ref.data.size()) {
        ++mismatches;
        continue;
      }
      const bool exact = k == ReprKind::Dist || k == ReprKind::SortedTimeSurface;
      for (std::size_t j = 0; j < prod.data.size(); ++j) {
        const double err = std::abs(prod.data[j] - ref.data[j]);
        if (exact ? prod.data[j] != ref.data[j] : !(err <= 1e-10)) ++mismatches;
        max_err = std::max(max_err, err);
      }
    }

    SsimParams sp;
    sp.window = std::min({7, g.height, g.width}) | 1;
    if (sp.window > std::min(g.height, g.width)) sp.window -= 2;
    const auto a = compute(ReprKind::Dist, s, p), b = compute(ReprKind::TimeSurface, s, p);
    const double err = std::abs(ssim(a, b, sp) - oracle::brute_ssim(a, b, sp));
    if (!(err <= 1e-10)) ++mismatches;
    max_err = std::max(max_err, err);
  }
  return {mismatches == 0, std::to_string(instances) + " instances, " + std::to_string(mismatches) +
                               " mismatches, max abs err " + fmt("%.3g", max_err)};
}

// AC2 ---------------------------------------------------------------------

Outcome speed_invariance() {
  std::mt19937_64 rng(202);
  int broken = 0, checks = 0;
  for (int i = 0; i < 100; ++i) {
    // Even timestamps so a = 0.5 stays on the integer microsecond grid.
    const auto s = random_stream(rng, {16 + i % 17, 20 + i % 13}, 50 + 4 * i, 0, 40000, true);
    const auto d = dist(s, 5.0, 3).data;
    const auto st = sorted_time_surface(s).data;
    for (double a : {0.5, 2.0, 10.0}) {
      for (Micros b : {Micros{0}, Micros{1000000}}) {
        const auto moved = affine(s, a, b);
        checks += 2;
        broken += dist(moved, 5.0, 3).data != d;
        broken += sorted_time_surface(moved).data != st;
      }
    }
  }
  // Counterexample: a faster pass (a = 0.5) inside the same fixed window.
  EventStream slow;
  slow.geometry = {1, 3};
  slow.events = {{0, 0, 100, 1}, {1, 0, 400, 1}, {2, 0, 900, 1}};
  slow.t_end = 1000;
  EventStream fast = slow;
  for (auto& e : fast.events) e.t /= 2;
  const bool ts_changes = timestamp_image(slow).data != timestamp_image(fast).data;
  const bool ranks_hold = dist(slow, 5, 2).data == dist(fast, 5, 2).data;
  return {broken == 0 && ts_changes && ranks_hold,
          std::to_string(checks - broken) + "/" + std::to_string(checks) + " bitwise-identical transforms; " +
              "timestamp_image counterexample " + (ts_changes ? "differs" : "does not differ")};
}

// AC3 ---------------------------------------------------------------------

Outcome noise_suppression() {
  // One row, rho = 2. Background activity: two isolated events far apart in
  // time at x = 2, 4. Normal: an edge crossing x = 12..35, two events per
  // pixel. Hot pixel: x = 44 firing every 2 ms.
  const int rho = 2;
  std::vector<Event> ev = {{2, 0, 1000, 1}, {4, 0, 8000, 1}};
  for (int x = 12; x <= 35; ++x) {
    const Micros t = 3000 + 120 * (x - 12);
    ev.push_back({static_cast<std::uint16_t>(x), 0, t, 1});
    ev.push_back({static_cast<std::uint16_t>(x), 0, t + 50, 1});
  }
  for (Micros t = 500; t <= 8500; t += 2000) ev.push_back({44, 0, t, 1});
  std::stable_sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
  EventStream s;
  s.geometry = {1, 48};
  s.events = ev;
  s.t_end = ev.back().t;

  const std::vector<int> noise = {2, 4, 44};
  std::vector<int> normal;
  for (int x = 12; x <= 35; ++x) normal.push_back(x);

  // Eq. 2 per pixel in exact rationals from the neighborhood statistics.
  const auto st = oracle::brute_stats(s, rho);
  const auto px = oracle::brute_stats(s, 0);
  auto D = [&](int x) { return Rational(st.newest(x, 0, 1) - st.oldest(x, 0, 1)) / st.events(x, 0, 1); };
  auto t_new = [&](int x) { return Rational(px.newest(x, 0, 1)); };

  Rational max_normal = 0;
  for (int m : normal) max_normal = std::max(max_normal, D(m));
  bool discounts_ok = true;
  for (int n : noise) discounts_ok = discounts_ok && D(n) > max_normal;

  // S_D(n) < S_D(m) for all pairs iff alpha > (t_n - t_m) / (D_n - D_m) whenever positive.
  Rational threshold = 0;
  for (int n : noise) {
    for (int m : normal) threshold = std::max(threshold, (t_new(n) - t_new(m)) / (D(n) - D(m)));
  }
  const double alpha = static_cast<double>(boost::multiprecision::numerator(threshold) /
                                           boost::multiprecision::denominator(threshold)) + 1.0;

  auto ranks_separate = [&](double a) {
    const auto g = dist(s, a, rho);
    long long m = 0;
    for (double v : g.data) m += v > 0;
    long long worst_noise = 0, best_normal = m + 1;
    for (int n : noise) worst_noise = std::max(worst_noise, std::llround(g.at(n, 0, 1) * m));
    for (int x : normal) best_normal = std::min(best_normal, std::llround(g.at(x, 0, 1) * m));
    return worst_noise < best_normal;
  };
  const bool suppressed = ranks_separate(alpha);
  const bool needed = !ranks_separate(0.0);  // without discounting the hot pixel is newest
  std::ostringstream detail;
  detail << "D(noise) > max D(normal) = " << max_normal << ": " << (discounts_ok ? "yes" : "no") << "; threshold "
         << threshold << ", alpha " << alpha << " ranks noise below normal: " << (suppressed ? "yes" : "no")
         << "; alpha 0 does not: " << (needed ? "yes" : "no");
  return {discounts_ok && suppressed && needed, detail.str()};
}

// AC4 ---------------------------------------------------------------------

Outcome consistency_order() {
  const auto corpus = synthetic_corpus(112, 128);
  std::vector<PerturbationConfig> variants(table_configs().begin() + 1, table_configs().end());
  StudyOptions options;
  options.sensor.geometry = {112 - 48, 128 - 48};
  const std::vector<ReprKind> kinds = {ReprKind::Timestamp, ReprKind::SortedTimeSurface, ReprKind::Dit,
                                       ReprKind::Dist};
  const auto r = consistency_study(corpus, kinds, variants, options);
  if (!r.failures.empty()) return {false, "sample failure: " + r.failures[0].message};
  const char* group = "trajectory-big";
  const double dist_m = *r.group_mean(ReprKind::Dist, group);
  const double ts_m = *r.group_mean(ReprKind::Timestamp, group);
  const double dit_m = *r.group_mean(ReprKind::Dit, group);
  const double sorted_m = *r.group_mean(ReprKind::SortedTimeSurface, group);
  std::ostringstream detail;
  detail.precision(4);
  detail << std::fixed << group << ": dist " << dist_m << " vs timestamp " << ts_m << ", dit " << dit_m
         << " vs sorted_ts " << sorted_m << " (16 images, 10 settings)";
  return {dist_m >= ts_m && dit_m >= sorted_m, detail.str()};
}

// AC5 ---------------------------------------------------------------------

Outcome table_fidelity() {
  using S = TrajectoryShape;
  struct Traj {
    const char* name;
    double f, a;
    S shape;
  };
  struct Photo {
    const char* name;
    double level, gamma, lux;
  };
  const Traj traj[] = {{"Original", 5, 3, S::SquareCCW},      {"Validation 1", 8.33, 4.5, S::Vertical},
                       {"Validation 2", 5, 3, S::Horizontal}, {"Validation 3", 5, 6, S::Vertical},
                       {"Validation 4", 5, 6, S::Horizontal}, {"Validation 5", 5, 6, S::SquareCCW}};
  const Photo photo[] = {{"Original", 50, 1, 70.00},
                         {"Validation 6", 0, 0.7, 12.75},
                         {"Validation 7", 0, 1, 23.38},
                         {"Validation 8", 100, 1, 95.50},
                         {"Validation 9", 100, 1.5, 111.00}};
  int bad = table_configs().size() == 10 ? 0 : 1;
  for (const auto& t : traj) {
    auto c = find_config(t.name);
    bad += !(c && c->trajectory && c->trajectory->frequency_hz == t.f && c->trajectory->amplitude_mm == t.a &&
             c->trajectory->shape == t.shape);
    bad += c && std::string(t.name) != "Original" && c->photometric.has_value();
  }
  for (const auto& p : photo) {
    auto c = find_config(p.name);
    bad += !(c && c->photometric && c->photometric->brightness_level == p.level && c->photometric->gamma == p.gamma &&
             c->photometric->illuminance_lux == p.lux);
    bad += c && std::string(p.name) != "Original" && c->trajectory.has_value();
  }
  return {bad == 0, "10 rows checked, " + std::to_string(bad) + " discrepancies"};
}

// AC6 ---------------------------------------------------------------------

Outcome round_trips() {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> side(1, 40), count(0, 300);
  int bad = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const auto s = random_stream(rng, {side(rng), side(rng)}, count(rng), rng() % 5000000000LL, 1 + rng() % 1000000);
    const auto bytes = encode_stream(s);
    bad += bytes.size() != kEvt1HeaderBytes + kEvt1RecordBytes * s.size();
    const auto back = decode_stream(bytes);
    bad += !(back == s) || encode_stream(back) != bytes;

    ReprGrid g = compute(all_kinds()[i % all_kinds().size()], s);
    if (i % 7 == 0) {
      std::uniform_real_distribution<double> u(-1e300, 1e300);
      for (double& v : g.data) v = u(rng);
    }
    std::stringstream buf;
    const auto written = write_grid(g, buf);
    std::size_t block = ("t_start=" + std::to_string(g.t_start) + "\nt_end=" + std::to_string(g.t_end)).size();
    for (const auto& [k, v] : g.params) block += 2 + k.size() + v.size();
    bad += written != 14 + block + 8 * g.data.size() || buf.str().size() != written;
    const std::string raw = buf.str();
    const auto g2 = read_grid(buf);
    std::stringstream again;
    write_grid(g2, again);
    bad += !(g2 == g) || again.str() != raw;
  }
  return {bad == 0, std::to_string(n) + " EVT1 + " + std::to_string(n) + " RGR1 artifacts, " + std::to_string(bad) +
                        " failures"};
}

// AC7 ---------------------------------------------------------------------

std::map<std::string, std::uint64_t> digests(const fs::path& dir) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = fnv1a64_file(e.path());
  }
  return out;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "evrep_acceptance_ac7";
  fs::remove_all(root);
  fs::create_directories(root / "corpus");
  const auto corpus = synthetic_corpus(96, 112);
  for (int i : {1, 6, 10, 15}) write_pgm(corpus[i].image, root / "corpus" / (corpus[i].name + ".pgm"));

  const std::string tool = EVREP_TOOL_PATH;
  const std::string w = (root / "work").string();
  const std::string img = (root / "corpus" / "edge_diagonal.pgm").string();
  const std::vector<std::string> commands = {
      "gen '" + img + "' 'Validation 5' 9 '" + w + "/s.evt1'",
      "inject '" + w + "/s.evt1' '" + w + "/n.evt1' --seed 4 --ba-rate 3 --hot-count 3 --hot-rate 200",
      "repr '" + w + "/n.evt1' dist '" + w + "/dist.rgr1'",
      "repr '" + w + "/n.evt1' sorted_ts '" + w + "/sts.rgr1' --tile 8",
      "repr '" + w + "/n.evt1' dit '" + w + "/dit.rgr1'",
      "study '" + (root / "corpus").string() + "' '" + w + "/study' --seed 3",
      "corpus '" + w + "/corpus' --seed 11 --height 40 --width 48",
  };
  std::vector<std::map<std::string, std::uint64_t>> runs;
  for (const char* threads : {"1", "1", "4", "4"}) {
    fs::remove_all(w);
    fs::create_directories(w);
    for (const auto& c : commands) {
      const std::string line = std::string("EVREP_THREADS=") + threads + " '" + tool + "' " + c + " > /dev/null";
      if (std::system(line.c_str()) != 0) return {false, "command failed: " + c};
    }
    runs.push_back(digests(w));
  }
  fs::remove_all(root);
  bool same = true;
  for (const auto& r : runs) same = same && r == runs.front();
  return {same && runs.front().size() >= 10, std::to_string(commands.size()) + " seeded commands, " +
                                                 std::to_string(runs.front().size()) +
                                                 " output files; digests identical over 2 runs x threads {1, 4}: " +
                                                 (same ? "yes" : "no")};
}

// AC8 ---------------------------------------------------------------------

Outcome throughput() {
  std::mt19937_64 rng(808);
  const auto big = random_stream(rng, {480, 640}, 1000000, 0, 5000000);
  auto t0 = std::chrono::steady_clock::now();
  const auto g = dist(big, 5.0, 3);
  const double big_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto small = random_stream(rng, {64, 64}, 10000, 0, 1000000);
  t0 = std::chrono::steady_clock::now();
  const int reps = 20;
  ReprGrid fast;
  for (int i = 0; i < reps; ++i) fast = dist(small, 5.0, 3);
  const double fast_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
  ReprParams p;
  p.rho = 3;
  t0 = std::chrono::steady_clock::now();
  const auto slow = oracle::brute_repr(small, ReprKind::Dist, p);
  const double slow_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double speedup = slow_s / fast_s;
  const bool ok = big_s < 1.0 && speedup >= 10.0 && slow.data == fast.data && !g.data.empty();
  return {ok, "480x640 / 1e6 events: " + fmt("%.3f", big_s) + " s; 64x64 / 1e4 events: " + fmt("%.2f", speedup) +
                  "x faster than the oracle"};
}

}  // namespace

int main() {
  report("AC1", "oracle equivalence", 120, oracle_equivalence);
  report("AC2", "speed invariance", 30, speed_invariance);
  report("AC3", "noise suppression", 1, noise_suppression);
  report("AC4", "consistency ordering", 600, consistency_order);
  report("AC5", "table fidelity", 0, table_fidelity);
  report("AC6", "format round-trips", 0, round_trips);
  report("AC7", "determinism", 0, determinism);
  report("AC8", "throughput", 0, throughput);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
