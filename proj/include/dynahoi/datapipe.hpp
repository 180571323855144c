#pragma once

// Collection and post-processing: on-disk episode archives, per-dimension
// action statistics, outlier clipping and trajectory rejection, and the
// retrying, multi-worker corpus collector that writes a manifest.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dynahoi/catalog.hpp"
#include "dynahoi/episode.hpp"
#include "dynahoi/metrics.hpp"
#include "dynahoi/oracle.hpp"
#include "dynahoi/serialize.hpp"

namespace dynahoi {

namespace fs = std::filesystem;

inline constexpr Vec3 kWristOffset{0.0, -0.08, 0.0};

inline std::string episode_dir_name(std::uint64_t id) { return "episode_" + std::to_string(id); }

inline std::string frame_file_name(int t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "joints_%04d.json", t);
  return buf;
}

/// Every tracked transform of one frame: 15 joints, 5 fingertips, wrist root,
/// palm center and camera, each as position + orientation.
inline json tracked_transforms(const EpisodeConfig& cfg, const HandState& h) {
  const HandChain chain = fk_chain(cfg.hand, h.palm, h.joints);
  json joints = json::array();
  for (int f = 0; f < kFingers; ++f) {
    for (int j = 0; j < kJointsPerFinger; ++j) {
      json p = chain.joints[f * kJointsPerFinger + j];
      p["name"] = std::string(kFingerNames[f]) + "_" + std::to_string(j + 1);
      joints.push_back(p);
    }
  }
  json tips = json::array();
  for (int f = 0; f < kFingers; ++f) {
    json p = chain.fingertips[f];
    p["name"] = std::string(kFingerNames[f]) + "_tip";
    tips.push_back(p);
  }
  return {{"joints", joints},
          {"fingertips", tips},
          {"wrist_root", Pose{h.palm + kWristOffset, Quat{}}},
          {"palm_center", Pose{h.palm, Quat{}}},
          {"camera", Pose{h.palm + cfg.camera.offset, Quat{}}}};
}

inline json archive_meta(const EpisodeRecord& rec) {
  const EpisodeConfig& cfg = rec.config;
  json target = nullptr;
  json speed = nullptr;
  try {
    const InterceptPlan plan = plan_intercept(cfg, Trajectory(cfg.motion));
    target = plan.target_position;
    speed = plan.move_speed;
  } catch (const Error&) {
    // No feasible oracle plan; both stay null.
  }
  return {{"task_type", cfg.motion.subcategory},
          {"family", std::string(to_string(cfg.motion.family()))},
          {"motion", cfg.motion},
          {"targetPosition", target},
          {"moveSpeed", speed},
          {"frames", rec.frames.size()},
          {"config", cfg},
          {"attach_frame", rec.attach_frame ? json(*rec.attach_frame) : json(nullptr)},
          {"logged_times", rec.logged_times},
          {"logged_palm", rec.logged_palm},
          {"img", nullptr}};
}

/// Test hook: throw after this many files have been written (negative = never).
struct WriteFaults {
  int fail_after_files = -1;
};

namespace detail {

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw Error("io_failure", "cannot write " + p.string());
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("io_failure", "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json_file(const fs::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::exception& e) {
    throw Error("bad_archive", p.string() + ": " + e.what());
  }
}

}  // namespace detail

/// Writes root/episode_{id}/ through a temporary directory and a rename, so a
/// failed write never leaves a directory with the final name.
inline fs::path write_archive(const EpisodeRecord& rec, const fs::path& root, const WriteFaults& faults = {}) {
  const std::string name = episode_dir_name(rec.config.episode_id);
  const fs::path final_dir = root / name;
  const fs::path tmp = root / (".tmp_" + name);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error("io_failure", "cannot create " + root.string() + ": " + ec.message());
  fs::remove_all(tmp, ec);
  try {
    fs::create_directory(tmp);
    int written = 0;
    const auto put = [&](const fs::path& p, const json& j) {
      if (faults.fail_after_files >= 0 && written >= faults.fail_after_files) {
        throw Error("io_failure", "injected failure writing " + p.filename().string());
      }
      detail::write_text(p, j.dump(1) + "\n");
      ++written;
    };
    put(tmp / "meta_data.json", archive_meta(rec));
    for (std::size_t t = 0; t < rec.frames.size(); ++t) {
      const FrameRecord& f = rec.frames[t];
      put(tmp / frame_file_name(static_cast<int>(t)),
          {{"frame", t}, {"tracked", tracked_transforms(rec.config, f.obs.hand)}, {"record", f}});
    }
    const fs::path old = root / (".old_" + name);
    fs::remove_all(old, ec);
    if (fs::exists(final_dir)) fs::rename(final_dir, old);
    fs::rename(tmp, final_dir);
    fs::remove_all(old, ec);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(tmp, ec);
    throw Error("io_failure", e.what());
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
  return final_dir;
}

/// Reads an archive back; checks meta presence and consecutive frame files.
inline EpisodeRecord read_archive(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("missing_archive", "no archive at " + dir.string());
  const fs::path meta_path = dir / "meta_data.json";
  if (!fs::exists(meta_path)) throw Error("bad_archive", "missing meta_data.json in " + dir.string());
  try {
    const json meta = detail::read_json_file(meta_path);
    EpisodeRecord rec;
    rec.config = meta.at("config").get<EpisodeConfig>();
    rec.attach_frame = meta.at("attach_frame").is_null() ? std::nullopt : std::optional<int>(meta["attach_frame"].get<int>());
    rec.logged_times = meta.at("logged_times").get<std::vector<double>>();
    rec.logged_palm = meta.at("logged_palm").get<std::vector<Vec3>>();
    const auto n = meta.at("frames").get<std::size_t>();
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().filename().string().rfind("joints_", 0) == 0) ++files;
    }
    if (files != n) {
      throw Error("bad_archive", dir.string() + ": meta lists " + std::to_string(n) + " frames, found " +
                                     std::to_string(files) + " frame files");
    }
    for (std::size_t t = 0; t < n; ++t) {
      const fs::path p = dir / frame_file_name(static_cast<int>(t));
      if (!fs::exists(p)) throw Error("bad_archive", "missing " + p.string());
      const json j = detail::read_json_file(p);
      if (j.at("frame").get<std::size_t>() != t) throw Error("bad_archive", p.string() + ": frame index mismatch");
      rec.frames.push_back(j.at("record").get<FrameRecord>());
    }
    return rec;
  } catch (const json::exception& e) {
    throw Error("bad_archive", dir.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Action statistics

inline constexpr int kActionDims = 18;
inline constexpr int kDefaultHistogramBins = 20;

inline std::string action_dim_name(int d) {
  static constexpr std::array<std::string_view, 3> xyz = {"loc_x", "loc_y", "loc_z"};
  if (d < 3) return std::string(xyz[d]);
  const int j = d - 3;
  return "gras_" + std::string(kFingerNames[j / kJointsPerFinger]) + "_" + std::to_string(j % kJointsPerFinger + 1);
}

struct DimStats {
  double min = 0.0;
  double max = 0.0;
  double q01 = 0.0;
  double q99 = 0.0;
  std::vector<std::size_t> histogram;
  friend bool operator==(const DimStats&, const DimStats&) = default;
};

struct ActionStats {
  std::array<DimStats, kActionDims> dims{};
  std::size_t samples = 0;
  friend bool operator==(const ActionStats&, const ActionStats&) = default;
};

/// Nearest-rank quantile of a sorted sample: element min(n - 1, floor(pct * n / 100)).
inline double nearest_rank(const std::vector<double>& sorted, int pct) {
  expects(!sorted.empty(), "quantile of an empty sample");
  const std::size_t n = sorted.size();
  return sorted[std::min(n - 1, static_cast<std::size_t>(pct) * n / 100)];
}

/// Statistics over the applied actions of every frame in the corpus.
inline ActionStats compute_action_stats(std::span<const EpisodeRecord> corpus, int bins = kDefaultHistogramBins) {
  std::size_t n = 0;
  for (const auto& r : corpus) n += r.frames.size();
  if (n == 0) throw Error("empty_corpus", "action statistics need at least one frame");
  ActionStats s;
  s.samples = n;
  std::vector<double> v(n);
  for (int d = 0; d < kActionDims; ++d) {
    std::size_t k = 0;
    for (const auto& r : corpus) {
      for (const auto& f : r.frames) v[k++] = f.action.as_vector()[d];
    }
    std::sort(v.begin(), v.end());
    DimStats& ds = s.dims[d];
    ds.min = v.front();
    ds.max = v.back();
    ds.q01 = nearest_rank(v, 1);
    ds.q99 = nearest_rank(v, 99);
    ds.histogram.assign(static_cast<std::size_t>(bins), 0);
    const double width = (ds.max - ds.min) / bins;
    for (double x : v) {
      const auto b = width > 0.0 ? static_cast<std::size_t>((x - ds.min) / width) : 0;
      ++ds.histogram[std::min(b, static_cast<std::size_t>(bins - 1))];
    }
  }
  return s;
}

inline std::string histogram_csv(const ActionStats& s) {
  std::ostringstream out;
  out << std::setprecision(17) << "dim,name,bin,lo,hi,count\n";
  for (int d = 0; d < kActionDims; ++d) {
    const DimStats& ds = s.dims[d];
    const auto bins = ds.histogram.size();
    const double width = (ds.max - ds.min) / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      out << d << ',' << action_dim_name(d) << ',' << b << ',' << ds.min + width * b << ','
          << (b + 1 == bins ? ds.max : ds.min + width * (b + 1)) << ',' << ds.histogram[b] << '\n';
    }
  }
  return out.str();
}

inline void to_json(json& j, const ActionStats& s) {
  json dims = json::array();
  for (int d = 0; d < kActionDims; ++d) {
    const DimStats& ds = s.dims[d];
    dims.push_back({{"name", action_dim_name(d)},
                    {"min", ds.min},
                    {"max", ds.max},
                    {"q01", ds.q01},
                    {"q99", ds.q99},
                    {"histogram", ds.histogram}});
  }
  j = {{"samples", s.samples}, {"dims", dims}};
}

// ---------------------------------------------------------------------------
// Outlier filtering

inline constexpr double kDefaultOutlierMargin = 0.05;

struct FilterOptions {
  double margin = kDefaultOutlierMargin;  // fraction of (q99 - q01)
  int saturation_run = 10;                // consecutive frames at the control limit
};

struct Rejection {
  std::uint64_t episode_id = 0;
  std::string rule;  // "invalid", "jump" or "saturation"
  std::string detail;
  friend bool operator==(const Rejection&, const Rejection&) = default;
};

struct FilterResult {
  std::vector<EpisodeRecord> kept;
  std::vector<Rejection> rejected;
  std::size_t clipped = 0;
};

namespace detail {

inline std::optional<std::string> invalid_reason(const EpisodeRecord& r) {
  if (static_cast<int>(r.frames.size()) != r.config.frames) {
    return "has " + std::to_string(r.frames.size()) + " frames, expected " + std::to_string(r.config.frames);
  }
  for (std::size_t t = 0; t < r.frames.size(); ++t) {
    const FrameRecord& f = r.frames[t];
    const std::string at = "frame " + std::to_string(t);
    if (f.obs.frame != static_cast<int>(t)) return at + ": out-of-sequence frame index";
    if (!is_finite(f.obs.hand.palm) || !is_finite(f.target)) return at + ": non-finite position";
    for (double q : f.obs.hand.joints) {
      if (!(q >= 0.0 && q <= kMaxGrabRotation)) return at + ": joint outside [0, pi/2]";
    }
    for (double a : f.action.as_vector()) {
      if (!std::isfinite(a)) return at + ": non-finite action";
    }
  }
  return std::nullopt;
}

inline std::optional<std::string> jump_reason(const EpisodeRecord& r) {
  for (std::size_t t = 1; t < r.frames.size(); ++t) {
    const HandState& a = r.frames[t - 1].obs.hand;
    const HandState& b = r.frames[t].obs.hand;
    const double step = distance(a.palm, b.palm);
    if (step > kLocCap * (1.0 + 1e-9)) {
      return "palm moved " + std::to_string(step) + " m between frames " + std::to_string(t - 1) + " and " +
             std::to_string(t);
    }
    for (int i = 0; i < kJoints; ++i) {
      if (std::abs(b.joints[i] - a.joints[i]) > kGrasCap * (1.0 + 1e-9)) {
        return "joint " + std::to_string(i) + " jumped between frames " + std::to_string(t - 1) + " and " +
               std::to_string(t);
      }
    }
  }
  return std::nullopt;
}

inline bool saturated(const Action& a) {
  if (norm(a.loc) >= kLocCap * (1.0 - 1e-9)) return true;
  return std::any_of(a.gras.begin(), a.gras.end(), [](double g) { return std::abs(g) >= kGrasCap * (1.0 - 1e-9); });
}

inline std::optional<std::string> saturation_reason(const EpisodeRecord& r, int run) {
  int streak = 0;
  for (std::size_t t = 0; t < r.frames.size(); ++t) {
    streak = saturated(r.frames[t].action) ? streak + 1 : 0;
    if (streak >= run) return std::to_string(run) + " consecutive frames at the action cap ending at frame " + std::to_string(t);
  }
  return std::nullopt;
}

}  // namespace detail

/// Clips each action sample into [q01 - m, q99 + m] per dimension, then
/// rejects whole episodes by rule. Idempotent for fixed `stats`.
inline FilterResult filter_outliers(std::span<const EpisodeRecord> corpus, const ActionStats& stats,
                                    const FilterOptions& opt = {}) {
  FilterResult out;
  for (const EpisodeRecord& src : corpus) {
    EpisodeRecord r = src;
    for (auto& f : r.frames) {
      auto v = f.action.as_vector();
      bool changed = false;
      for (int d = 0; d < kActionDims; ++d) {
        const DimStats& ds = stats.dims[d];
        const double m = opt.margin * (ds.q99 - ds.q01);
        const double c = std::clamp(v[d], ds.q01 - m, ds.q99 + m);
        if (c != v[d]) {
          v[d] = c;
          changed = true;
          ++out.clipped;
        }
      }
      if (changed) f.action = Action::from_vector(v);
    }
    const std::uint64_t id = r.config.episode_id;
    if (auto why = detail::invalid_reason(r)) {
      out.rejected.push_back({id, "invalid", *why});
    } else if (auto why2 = detail::jump_reason(r)) {
      out.rejected.push_back({id, "jump", *why2});
    } else if (auto why3 = detail::saturation_reason(r, opt.saturation_run)) {
      out.rejected.push_back({id, "saturation", *why3});
    } else {
      out.kept.push_back(std::move(r));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Collection

struct CollectOptions {
  std::vector<std::string> subcategories;  // empty: the whole catalog, weighted
  int episodes = 10;
  std::uint64_t seed = 0;
  int retries = 3;
  int workers = 1;
  EpisodeOptions episode;
  std::optional<double> intercept_time;  // overrides the oracle's T_i
  std::optional<fs::path> out;           // archives + manifest.json
  bool keep_records = false;
};

struct ManifestEntry {
  std::uint64_t episode_id = 0;
  std::string subcategory;
  std::uint64_t seed = 0;  // seed of the last attempt
  int attempts = 0;
  bool ok = false;
  std::string error;
  std::string family;
  std::string periodicity;
  std::string duration_bucket;
  std::string length_bucket;
  int frames = 0;
  std::string archive;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  std::uint64_t seed = 0;
  int requested = 0;
  int retries = 3;
  std::string catalog_checksum;
  std::vector<std::string> selection;
  std::vector<ManifestEntry> entries;

  int successes() const {
    return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.ok; }));
  }
  int failures() const { return static_cast<int>(entries.size()) - successes(); }
  int retried() const {
    int n = 0;
    for (const auto& e : entries) n += e.attempts - 1;
    return n;
  }
  friend bool operator==(const Manifest&, const Manifest&) = default;
};

inline void to_json(json& j, const ManifestEntry& e) {
  j = {{"episode_id", e.episode_id},
       {"subcategory", e.subcategory},
       {"seed", e.seed},
       {"attempts", e.attempts},
       {"status", e.ok ? "ok" : "failed"},
       {"error", e.error},
       {"family", e.family},
       {"periodicity", e.periodicity},
       {"duration_bucket", e.duration_bucket},
       {"length_bucket", e.length_bucket},
       {"frames", e.frames},
       {"archive", e.archive}};
}
inline void from_json(const json& j, ManifestEntry& e) {
  e.episode_id = j.at("episode_id").get<std::uint64_t>();
  e.subcategory = j.at("subcategory").get<std::string>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.attempts = j.at("attempts").get<int>();
  e.ok = j.at("status").get<std::string>() == "ok";
  e.error = j.at("error").get<std::string>();
  e.family = j.at("family").get<std::string>();
  e.periodicity = j.at("periodicity").get<std::string>();
  e.duration_bucket = j.at("duration_bucket").get<std::string>();
  e.length_bucket = j.at("length_bucket").get<std::string>();
  e.frames = j.at("frames").get<int>();
  e.archive = j.at("archive").get<std::string>();
}

inline void to_json(json& j, const Manifest& m) {
  j = {{"seed", m.seed},
       {"requested", m.requested},
       {"retries", m.retries},
       {"catalog_checksum", m.catalog_checksum},
       {"selection", m.selection},
       {"entries", m.entries},
       {"successes", m.successes()},
       {"failures", m.failures()}};
}
inline void from_json(const json& j, Manifest& m) {
  m.seed = j.at("seed").get<std::uint64_t>();
  m.requested = j.at("requested").get<int>();
  m.retries = j.at("retries").get<int>();
  m.catalog_checksum = j.at("catalog_checksum").get<std::string>();
  m.selection = j.at("selection").get<std::vector<std::string>>();
  m.entries = j.at("entries").get<std::vector<ManifestEntry>>();
}

struct CollectResult {
  Manifest manifest;
  std::vector<EpisodeRecord> records;  // successful episodes, by id, when keep_records
  std::vector<MetricsReport> reports;  // successful episodes, by id
};

/// Subcategory of episode `index`: weighted draw over the selection.
inline const SubcategorySpec& pick_subcategory(const MotionCatalog& catalog, const std::vector<std::string>& selection,
                                               std::uint64_t seed, std::uint64_t index) {
  if (selection.size() == 1) return catalog.find(selection.front());
  Rng rng(derive_seed(seed, "pick", index));
  if (selection.empty()) return sample_subcategory(catalog, rng);
  double total = 0.0;
  for (const auto& id : selection) total += catalog.find(id).weight;
  double u = rng.uniform() * total;
  for (const auto& id : selection) {
    const SubcategorySpec& s = catalog.find(id);
    if (u < s.weight) return s;
    u -= s.weight;
  }
  return catalog.find(selection.back());
}

namespace detail {

struct Attempted {
  ManifestEntry entry;
  std::optional<EpisodeRecord> record;
  std::optional<MetricsReport> report;
};

inline Attempted collect_one(const MotionCatalog& catalog, const CollectOptions& opt, std::uint64_t id) {
  Attempted out;
  ManifestEntry& e = out.entry;
  e.episode_id = id;
  const SubcategorySpec& spec = pick_subcategory(catalog, opt.subcategories, opt.seed, id);
  e.subcategory = spec.id;
  const std::uint64_t base = derive_seed(opt.seed, "episode", id);
  for (int attempt = 0; attempt <= opt.retries; ++attempt) {
    e.attempts = attempt + 1;
    e.seed = attempt == 0 ? base : derive_seed(base, "retry", attempt);
    std::error_code ec;
    try {
      EpisodeConfig cfg = make_episode(catalog, spec.id, id, e.seed, opt.episode);
      if (opt.intercept_time) cfg.oracle.intercept_time = *opt.intercept_time;
      EpisodeRecord rec = run_gt_episode(cfg);
      MetricsReport rep = evaluate(rec);
      if (!rep.s_loc || !rep.s_gra) throw Error("oracle_miss", "oracle did not localize and grasp");
      e.family = rep.family;
      e.periodicity = rep.periodicity;
      e.duration_bucket = rep.duration_bucket;
      e.length_bucket = rep.length_bucket;
      e.frames = rep.frames;
      if (opt.out) e.archive = write_archive(rec, *opt.out).filename().string();
      e.ok = true;
      e.error.clear();
      out.report = std::move(rep);
      if (opt.keep_records) out.record = std::move(rec);
      return out;
    } catch (const Error& err) {
      e.error = err.code() + ": " + err.what();
    } catch (const std::exception& err) {
      e.error = std::string("internal: ") + err.what();
    }
    if (opt.out) fs::remove_all(*opt.out / episode_dir_name(id), ec);
  }
  return out;
}

}  // namespace detail

/// Runs the oracle on `episodes` sampled configs, retrying each failure up to
/// `retries` times with fresh derived seeds. Output order is by episode id
/// regardless of the worker count.
inline CollectResult collect_dataset(const MotionCatalog& catalog, const CollectOptions& opt) {
  if (opt.episodes < 0) throw Error("invalid_option", "episode count must be non-negative");
  for (const auto& s : opt.subcategories) catalog.find(s);
  std::vector<detail::Attempted> slots(static_cast<std::size_t>(opt.episodes));
  std::atomic<int> next{0};
  const auto work = [&] {
    for (int i = next++; i < opt.episodes; i = next++) {
      slots[static_cast<std::size_t>(i)] = detail::collect_one(catalog, opt, static_cast<std::uint64_t>(i));
    }
  };
  const int workers = std::clamp(opt.workers, 1, 256);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  CollectResult res;
  Manifest& m = res.manifest;
  m.seed = opt.seed;
  m.requested = opt.episodes;
  m.retries = opt.retries;
  m.catalog_checksum = catalog.checksum;
  m.selection = opt.subcategories;
  for (auto& s : slots) {
    m.entries.push_back(s.entry);
    if (s.report) res.reports.push_back(*s.report);
    if (s.record) res.records.push_back(std::move(*s.record));
  }
  if (opt.out) detail::write_text(*opt.out / "manifest.json", json(m).dump(2) + "\n");
  return res;
}

inline Manifest read_manifest(const fs::path& p) {
  try {
    return detail::read_json_file(p).get<Manifest>();
  } catch (const json::exception& e) {
    throw Error("bad_manifest", p.string() + ": " + e.what());
  }
}

/// Loads every successful archive listed in `root`/manifest.json.
inline std::vector<EpisodeRecord> read_corpus(const fs::path& root) {
  const Manifest m = read_manifest(root / "manifest.json");
  std::vector<EpisodeRecord> out;
  for (const auto& e : m.entries) {
    if (e.ok) out.push_back(read_archive(root / e.archive));
  }
  return out;
}

}  // namespace dynahoi
