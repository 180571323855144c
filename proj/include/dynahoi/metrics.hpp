#pragma once

// Episode and corpus metrics: localization, grasp, trajectory quality,
// completion time, per-frame grasp rates and stratified aggregates.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynahoi/core.hpp"
#include "dynahoi/engine.hpp"
#include "dynahoi/kinematics.hpp"
#include "dynahoi/motion.hpp"
#include "dynahoi/oracle.hpp"

namespace dynahoi {

inline double q_smooth(std::span<const Vec3> track) {
  if (track.size() < 2) throw Error("invalid_track", "Q_smooth needs at least two positions");
  const std::size_t n = track.size() - 1;
  std::vector<double> d(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = distance(track[i + 1], track[i]);
    mean += d[i];
  }
  mean /= static_cast<double>(n);
  if (mean == 0.0) return 1.0;
  double var = 0.0;
  for (double x : d) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n);
  return 1.0 / (1.0 + std::sqrt(var) / mean);
}

inline double q_line(std::span<const Vec3> track) {
  if (track.size() < 2) throw Error("invalid_track", "Q_line needs at least two positions");
  const Vec3 span = track.back() - track.front();
  const double len = norm(span);
  if (len == 0.0) return 0.0;
  const Vec3 v = span / len;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < track.size(); ++i) {
    const Vec3 s = track[i + 1] - track[i];
    const double sl = norm(s);
    if (sl > 0.0) acc += dot(s, v) / sl;
  }
  return acc / static_cast<double>(track.size() - 1);
}

/// `completion` is the 1-based completion frame T.
inline double r_time(int frames, std::optional<int> completion) {
  if (frames < 1) throw Error("invalid_track", "R_time needs N >= 1");
  if (!completion) return 0.0;
  if (*completion < 1 || *completion > frames) throw Error("invalid_track", "completion frame outside [1, N]");
  return 1.0 - static_cast<double>(*completion) / frames;
}

struct LocalizationResult {
  bool success = false;
  double e_loc = 0.0;
  std::optional<int> first_frame;
};

inline LocalizationResult localization(const EpisodeRecord& rec, double threshold) {
  LocalizationResult r;
  r.e_loc = std::numeric_limits<double>::infinity();
  for (const auto& f : rec.frames) {
    const double d = distance(f.obs.hand.palm, f.target);
    r.e_loc = std::min(r.e_loc, d);
    if (!r.first_frame && d <= threshold) r.first_frame = f.obs.frame;
  }
  r.success = r.first_frame.has_value();
  return r;
}

/// Sign agreement and at least 0.9 of the reference magnitude (inclusive, up
/// to rounding of the 0.9 product); zero references pass.
inline bool joint_matches(double pred, double gt) {
  if (gt == 0.0) return true;
  if ((pred > 0.0) != (gt > 0.0) || pred == 0.0) return false;
  return std::abs(pred) >= 0.9 * std::abs(gt) * (1.0 - 1e-12);
}

inline bool grasp_matches(const JointArray& pred, const JointArray& gt) {
  for (int i = 0; i < kJoints; ++i) {
    if (!joint_matches(pred[i], gt[i])) return false;
  }
  return true;
}

inline int fingers_matching(const JointArray& pred, const JointArray& gt) {
  int n = 0;
  for (int f = 0; f < kFingers; ++f) {
    bool ok = true;
    for (int j = 0; j < kJointsPerFinger; ++j) {
      ok = ok && joint_matches(pred[f * kJointsPerFinger + j], gt[f * kJointsPerFinger + j]);
    }
    n += ok ? 1 : 0;
  }
  return n;
}

struct GraspResult {
  bool success = false;
  double e_gra = 0.0;
};

/// Grasp is judged only at `eval_frame`, the first localization frame.
inline GraspResult grasping(const EpisodeRecord& rec, const JointArray& gt, std::optional<int> eval_frame) {
  GraspResult r;
  r.e_gra = std::numeric_limits<double>::infinity();
  for (const auto& f : rec.frames) {
    r.e_gra = std::min(r.e_gra, fingertip_surface_distance(f.obs.hand, rec.config.object.at(f.target)));
  }
  if (eval_frame) {
    if (*eval_frame < 0 || *eval_frame >= static_cast<int>(rec.frames.size())) {
      throw Error("invalid_record", "grasp evaluation frame outside the record");
    }
    r.success = grasp_matches(rec.frames[*eval_frame].action.gras, gt);
  }
  return r;
}

enum class GraspLevel { Loose = 3, Medium = 4, Strict = 5 };
enum class HoldRule { Joint, Contact };

inline double per_frame_grasp_rate(const EpisodeRecord& rec, const JointArray& gt, GraspLevel level,
                                   HoldRule rule = HoldRule::Joint) {
  if (rec.frames.empty()) return 0.0;
  const int k = static_cast<int>(level);
  int hits = 0;
  for (const auto& f : rec.frames) {
    int holding = 0;
    if (rule == HoldRule::Joint) {
      holding = fingers_matching(f.action.gras, gt);
    } else {
      for (bool c : contact_test(rec.config.hand, f.obs.hand, rec.config.object.at(f.target))) holding += c ? 1 : 0;
    }
    hits += holding >= k ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(rec.frames.size());
}

// ---------------------------------------------------------------------------
// Stratification.

inline std::string periodicity_tag(MotionFamily f) {
  switch (f) {
    case MotionFamily::CircularArc: return "Circular";
    case MotionFamily::SimpleHarmonic:
    case MotionFamily::Pendulum: return "Periodic";
    case MotionFamily::StraightLine:
    case MotionFamily::Projectile:
    case MotionFamily::InclinedRolling: return "Linear";
    case MotionFamily::ImpactResponse: return "Impact";
    case MotionFamily::Hybrid: return "Hybrid";
  }
  return "?";
}

/// Left-closed frame-count buckets.
inline std::string duration_bucket(int frames) {
  if (frames < 20) return "<20";
  if (frames < 40) return "20-40";
  if (frames < 60) return "40-60";
  if (frames < 80) return "60-80";
  if (frames < 120) return "80-120";
  return ">120";
}

inline std::string length_bucket(double meters) {
  if (meters < 0.5) return "0-0.5";
  if (meters < 2.0) return "0.5-2";
  if (meters < 4.0) return "2-4";
  return ">4";
}

/// Arc length of the scripted motion sampled at the frame times.
inline double motion_path_length(const MotionConfig& motion, int frames, double dt) {
  const Trajectory tr(motion);
  double len = 0.0;
  Vec3 prev = tr.position_at(0.0);
  for (int k = 1; k <= frames; ++k) {
    const Vec3 p = tr.position_at(std::min(k * dt, tr.duration()));
    len += distance(p, prev);
    prev = p;
  }
  return len;
}

// ---------------------------------------------------------------------------

struct GraspRates {
  double loose = 0.0;
  double medium = 0.0;
  double strict = 0.0;
  friend bool operator==(const GraspRates&, const GraspRates&) = default;
};

struct MetricsReport {
  std::uint64_t episode_id = 0;
  std::string subcategory;
  std::string family;
  std::string periodicity;
  std::string duration_bucket;
  std::string length_bucket;
  int frames = 0;
  double path_length = 0.0;

  bool s_loc = false;
  bool s_loc_lenient = false;
  double e_loc = 0.0;
  std::optional<int> first_loc_frame;
  bool s_gra = false;
  double e_gra = 0.0;
  double q_smooth = 0.0;
  double q_line = 0.0;
  double r_time = 0.0;
  GraspRates grasp_rates;          // joint rule (reported)
  GraspRates contact_grasp_rates;  // contact rule

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Palm track between the first acting frame and the completion frame
/// (the last frame when the episode never completes).
inline std::vector<Vec3> quality_window(const EpisodeRecord& rec, std::optional<int> completion) {
  std::vector<Vec3> scratch;
  const std::vector<Vec3>& track = rec.metric_track(scratch);
  const int n = static_cast<int>(track.size());
  const int begin = std::min(rec.config.observe_frames, n - 1);
  int end = completion ? *completion : n - 1;
  end = std::clamp(end, std::min(begin + 1, n - 1), n - 1);
  return {track.begin() + begin, track.begin() + end + 1};
}

/// Positions covered by the frames labelled `phase`, including the position
/// reached after the last such frame.
inline std::vector<Vec3> phase_track(const EpisodeRecord& rec, Phase phase) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < rec.frames.size(); ++i) {
    if (rec.frames[i].phase != phase) continue;
    if (out.empty()) out.push_back(rec.frames[i].obs.hand.palm);
    out.push_back(rec.frames[i].obs.hand.palm + rec.frames[i].action.loc);
  }
  return out;
}

inline MetricsReport evaluate(const EpisodeRecord& rec, const JointArray& gt) {
  const EpisodeConfig& cfg = rec.config;
  MetricsReport r;
  r.episode_id = cfg.episode_id;
  r.subcategory = cfg.motion.subcategory;
  r.family = std::string(to_string(cfg.motion.family()));
  r.periodicity = periodicity_tag(cfg.motion.family());
  r.frames = static_cast<int>(rec.frames.size());
  r.duration_bucket = duration_bucket(r.frames);
  r.path_length = motion_path_length(cfg.motion, cfg.frames, cfg.dt);
  r.length_bucket = length_bucket(r.path_length);

  const LocalizationResult loc = localization(rec, cfg.thresholds.loc);
  r.s_loc = loc.success;
  r.e_loc = loc.e_loc;
  r.first_loc_frame = loc.first_frame;
  r.s_loc_lenient = localization(rec, cfg.thresholds.lenient).success;
  const GraspResult gra = grasping(rec, gt, loc.first_frame);
  r.s_gra = loc.success && gra.success;
  r.e_gra = gra.e_gra;

  if (!rec.frames.empty()) {
    const std::vector<Vec3> window = quality_window(rec, loc.first_frame);
    if (window.size() >= 2) {
      r.q_smooth = q_smooth(window);
      r.q_line = q_line(window);
    }
  }
  r.r_time = r_time(r.frames, loc.first_frame ? std::optional<int>(*loc.first_frame + 1) : std::nullopt);
  r.grasp_rates = {per_frame_grasp_rate(rec, gt, GraspLevel::Loose), per_frame_grasp_rate(rec, gt, GraspLevel::Medium),
                   per_frame_grasp_rate(rec, gt, GraspLevel::Strict)};
  r.contact_grasp_rates = {per_frame_grasp_rate(rec, gt, GraspLevel::Loose, HoldRule::Contact),
                           per_frame_grasp_rate(rec, gt, GraspLevel::Medium, HoldRule::Contact),
                           per_frame_grasp_rate(rec, gt, GraspLevel::Strict, HoldRule::Contact)};
  return r;
}

/// Evaluates against the oracle closing step of the record's own settings.
inline MetricsReport evaluate(const EpisodeRecord& rec) {
  return evaluate(rec, oracle_grasp_reference(rec.config.oracle, rec.config.dt));
}

struct CorpusSummary {
  int episodes = 0;
  double s_loc = 0.0;
  double s_loc_lenient = 0.0;
  double s_gra = 0.0;
  double s_gra_given_loc = 0.0;
  double e_loc = 0.0;
  double e_gra = 0.0;
  double q_smooth = 0.0;
  double q_line = 0.0;
  double r_time = 0.0;
  GraspRates grasp_rates;
  GraspRates contact_grasp_rates;
  friend bool operator==(const CorpusSummary&, const CorpusSummary&) = default;
};

inline CorpusSummary summarize(std::span<const MetricsReport> reports) {
  CorpusSummary s;
  s.episodes = static_cast<int>(reports.size());
  if (reports.empty()) return s;
  int localized = 0;
  int grasped = 0;
  for (const auto& r : reports) {
    s.s_loc += r.s_loc;
    s.s_loc_lenient += r.s_loc_lenient;
    s.s_gra += r.s_gra;
    localized += r.s_loc;
    grasped += r.s_gra;
    s.e_loc += r.e_loc;
    s.e_gra += r.e_gra;
    s.q_smooth += r.q_smooth;
    s.q_line += r.q_line;
    s.r_time += r.r_time;
    s.grasp_rates.loose += r.grasp_rates.loose;
    s.grasp_rates.medium += r.grasp_rates.medium;
    s.grasp_rates.strict += r.grasp_rates.strict;
    s.contact_grasp_rates.loose += r.contact_grasp_rates.loose;
    s.contact_grasp_rates.medium += r.contact_grasp_rates.medium;
    s.contact_grasp_rates.strict += r.contact_grasp_rates.strict;
  }
  const double n = static_cast<double>(reports.size());
  for (double* v : {&s.s_loc, &s.s_loc_lenient, &s.s_gra, &s.e_loc, &s.e_gra, &s.q_smooth, &s.q_line, &s.r_time,
                    &s.grasp_rates.loose, &s.grasp_rates.medium, &s.grasp_rates.strict,
                    &s.contact_grasp_rates.loose, &s.contact_grasp_rates.medium, &s.contact_grasp_rates.strict}) {
    *v /= n;
  }
  s.s_gra_given_loc = localized > 0 ? static_cast<double>(grasped) / localized : 0.0;
  return s;
}

enum class Stratum { Periodicity, Duration, Length, Family, Subcategory };

inline std::string stratum_key(const MetricsReport& r, Stratum by) {
  switch (by) {
    case Stratum::Periodicity: return r.periodicity;
    case Stratum::Duration: return r.duration_bucket;
    case Stratum::Length: return r.length_bucket;
    case Stratum::Family: return r.family;
    case Stratum::Subcategory: return r.subcategory;
  }
  return "?";
}

inline std::map<std::string, CorpusSummary> stratify(std::span<const MetricsReport> reports, Stratum by) {
  std::map<std::string, std::vector<MetricsReport>> groups;
  for (const auto& r : reports) groups[stratum_key(r, by)].push_back(r);
  std::map<std::string, CorpusSummary> out;
  for (const auto& [k, g] : groups) out[k] = summarize(g);
  return out;
}

}  // namespace dynahoi
